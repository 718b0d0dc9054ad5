#include "corrfolio/metrics.hpp"

#include "corrfolio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace corrfolio {

namespace {

void require_year(const EquityCurve& curve, const char* what) {
  if (curve.periods() < kPeriodsPerYear) {
    throw DataError(std::string(what) + ": " + std::to_string(curve.periods()) +
                    " periods, need at least " + std::to_string(kPeriodsPerYear));
  }
}

}  // namespace

double metric_annualized_return(const EquityCurve& curve) {
  require_year(curve, "annualized return");
  return std::pow(curve.terminal(), static_cast<double>(kPeriodsPerYear) / static_cast<double>(curve.periods())) - 1.0;
}

double metric_sharpe(const EquityCurve& curve, const Eigen::Ref<const Vector>& riskfree) {
  require_year(curve, "sharpe");
  if (riskfree.size() != curve.periods()) throw DataError("sharpe: risk-free series misaligned");
  const Vector excess = curve.period_returns - riskfree;
  if (stats::is_constant(excess)) throw NumericalError("sharpe: zero volatility");
  return stats::mean(excess) / stats::volatility(excess) * std::sqrt(static_cast<double>(kPeriodsPerYear));
}

std::pair<double, double> metric_max_up_dd(const EquityCurve& curve) {
  require_year(curve, "max up/dd");
  double up = -std::numeric_limits<double>::infinity();
  double dd = std::numeric_limits<double>::infinity();
  for (Index k = 0; k + kPeriodsPerYear <= curve.periods(); ++k) {
    double growth = 1.0;
    for (Index j = k; j < k + kPeriodsPerYear; ++j) growth *= 1.0 + curve.period_returns(j);
    up = std::max(up, growth - 1.0);
    dd = std::min(dd, growth - 1.0);
  }
  return {up, dd};
}

double metric_peak_trough_dd(const EquityCurve& curve) {
  double peak = curve.values(0);
  double worst = 0.0;
  for (Index k = 0; k < curve.values.size(); ++k) {
    peak = std::max(peak, curve.values(k));
    worst = std::min(worst, curve.values(k) / peak - 1.0);
  }
  return worst;
}

Index metric_months_plus(const EquityCurve& curve, const EquityCurve& baseline) {
  if (curve.periods() != baseline.periods() || curve.dates != baseline.dates) {
    throw DataError("months+: curves are not aligned");
  }
  return (curve.period_returns.array() > baseline.period_returns.array()).count();
}

double binomial_cdf_below(Index n, double p, Index k) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw DataError("binomial: invalid parameters");
  if (k <= 0) return 0.0;
  if (k > n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double total = 0.0;
  for (Index j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j);
    const double log_pmf = lgn - std::lgamma(jj + 1.0) - std::lgamma(static_cast<double>(n - j) + 1.0) +
                           jj * lp + static_cast<double>(n - j) * lq;
    total += std::exp(log_pmf);
  }
  return std::min(total, 1.0);
}

FidelityResult metric_fidelity(std::span<const std::vector<Index>> selections,
                               std::span<const Vector> realized) {
  if (selections.size() != realized.size()) throw DataError("fidelity: selections and returns misaligned");
  FidelityResult out;
  double sum = 0.0;
  for (std::size_t t = 0; t < selections.size(); ++t) {
    const Vector& r = realized[t];
    const auto& sel = selections[t];
    if (sel.empty()) {
      ++out.months_skipped;
      continue;
    }
    if (r.size() == 0) throw DataError("fidelity: empty basket");
    const double avg = r.mean();
    const Index m = (r.array() > avg).count();
    Index k = 0;
    for (Index a : sel) {
      if (a < 0 || a >= r.size()) throw DataError("fidelity: selected asset outside basket");
      if (r(a) > avg) ++k;
    }
    const double p = static_cast<double>(m) / static_cast<double>(r.size());
    sum += binomial_cdf_below(static_cast<Index>(sel.size()), p, k);
    ++out.months_used;
  }
  if (out.months_used == 0) throw DataError("fidelity: no month with a nonempty selection");
  out.value = sum / static_cast<double>(out.months_used);
  return out;
}

BacktestReport make_report(const BacktestResult& result) {
  BacktestReport report;
  const bool have_ew = result.has(Strategy::EW);
  const auto realized = result.realized();
  for (const auto& curve : result.curves) {
    StrategyMetrics row;
    row.strategy = curve.strategy;
    row.months = curve.periods();
    auto attempt = [&](const char* name, auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        row.notes.push_back(std::string(name) + " undefined: " + e.what());
      }
    };
    attempt("return", [&] { row.annualized_return = metric_annualized_return(curve); });
    attempt("sharpe", [&] { row.sharpe = metric_sharpe(curve, result.period_riskfree); });
    attempt("max_up_dd", [&] {
      const auto [up, dd] = metric_max_up_dd(curve);
      row.max_up = up;
      row.max_dd = dd;
    });
    row.max_peak_trough_dd = metric_peak_trough_dd(curve);
    if (curve.strategy != Strategy::EW && have_ew) {
      attempt("months_plus", [&] { row.months_plus = metric_months_plus(curve, result.curve(Strategy::EW)); });
    }
    if (curve.strategy == Strategy::EF || curve.strategy == Strategy::RC || curve.strategy == Strategy::RCStar) {
      attempt("fidelity", [&] {
        const auto sel = result.selections(curve.strategy);
        const FidelityResult f = metric_fidelity(sel, realized);
        row.fidelity = f.value;
        if (f.months_skipped > 0) {
          row.notes.push_back("fidelity skipped " + std::to_string(f.months_skipped) + " empty months");
        }
      });
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace corrfolio
