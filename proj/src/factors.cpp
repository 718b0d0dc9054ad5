#include "corrfolio/factors.hpp"

#include "corrfolio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace corrfolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinCoverage = 0.9;

double leg_mean(const Matrix& returns, Index day, const std::vector<Index>& leg) {
  double s = 0.0;
  for (Index a : leg) s += returns(day, a);
  return s / static_cast<double>(leg.size());
}

}  // namespace

std::string factor_name(FactorField field) {
  switch (field) {
    case FactorField::DivYield: return "DIVYIELD";
    case FactorField::EV: return "EV";
    case FactorField::MtB: return "MTB";
    case FactorField::EvEbitda: return "EVEBITDA";
  }
  return "?";
}

Vector factor_values(const PanelData& panel, FactorField field, Index day) {
  const auto& f = panel.fundamentals();
  if (f.empty()) throw DataError("factor " + factor_name(field) + ": panel has no fundamentals");
  switch (field) {
    case FactorField::DivYield: return f[Fundamental::DivYield].row(day).transpose();
    case FactorField::EV: return f[Fundamental::EV].row(day).transpose();
    case FactorField::MtB: return f[Fundamental::MtB].row(day).transpose();
    case FactorField::EvEbitda: {
      Vector out(panel.assets());
      for (Index a = 0; a < panel.assets(); ++a) {
        const double ebitda = f[Fundamental::Ebitda](day, a);
        out(a) = ebitda > 0.0 ? f[Fundamental::EV](day, a) / ebitda : kNaN;
      }
      return out;
    }
  }
  return {};
}

FactorIndex build_factor_index(const PanelData& panel, FactorField field,
                               std::span<const Index> schedule, SortOrder order) {
  const Index n = panel.assets();
  const Index t = panel.days();
  const std::string name = factor_name(field);
  if (n < 6) throw DataError("factor " + name + ": need at least 6 assets");
  if (schedule.empty()) throw DataError("factor " + name + ": empty rebalance schedule");

  FactorIndex out;
  out.name = name;
  out.returns = Vector::Constant(t, kNaN);
  const Matrix& r = panel.returns();

  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const Index s = schedule[j];
    if (s < 0 || s >= t || (j > 0 && s <= schedule[j - 1])) {
      throw DataError("factor " + name + ": invalid rebalance schedule");
    }
    const Index info_day = std::max<Index>(s - 1, 0);
    const Vector key = factor_values(panel, field, info_day);

    std::vector<Index> avail;
    for (Index a = 0; a < n; ++a) {
      if (std::isfinite(key(a))) avail.push_back(a);
    }
    if (static_cast<double>(avail.size()) < kMinCoverage * static_cast<double>(n)) {
      throw DataError("factor " + name + ": field covers " + std::to_string(avail.size()) +
                      " of " + std::to_string(n) + " assets on " +
                      format_date(panel.calendar()[info_day]));
    }
    std::stable_sort(avail.begin(), avail.end(), [&](Index a, Index b) {
      return order == SortOrder::Ascending ? key(a) < key(b) : key(a) > key(b);
    });
    const auto leg = static_cast<std::ptrdiff_t>(avail.size() / 3);
    std::vector<Index> low(avail.begin(), avail.begin() + leg);
    std::vector<Index> high(avail.end() - leg, avail.end());
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());

    const Index until = j + 1 < schedule.size() ? schedule[j + 1] : t;
    for (Index d = std::max<Index>(s, 1); d < until; ++d) {
      out.returns(d) = leg_mean(r, d, low) - leg_mean(r, d, high);
    }
    out.rebalance_days.push_back(s);
    out.low_legs.push_back(std::move(low));
    out.high_legs.push_back(std::move(high));
  }
  return out;
}

double cross_pair_index(const Eigen::Ref<const Matrix>& returns) {
  if (returns.rows() < 3) throw DataError("cross_pair_index: window shorter than 3 days");
  std::vector<Index> live;
  for (Index a = 0; a < returns.cols(); ++a) {
    if (!stats::is_constant(returns.col(a))) live.push_back(a);
  }
  if (live.size() < 2) throw DataError("cross_pair_index: need 2 nonconstant assets");

  const Index m = static_cast<Index>(live.size());
  Matrix z(returns.rows(), m);
  for (Index j = 0; j < m; ++j) {
    const auto col = returns.col(live[static_cast<std::size_t>(j)]);
    z.col(j) = col.array() - col.mean();
    z.col(j) /= z.col(j).norm();
  }
  const Matrix corr = z.transpose() * z;
  double sum = 0.0;
  for (Index j = 1; j < m; ++j) {
    for (Index i = 0; i < j; ++i) sum += std::clamp(corr(i, j), -1.0, 1.0);
  }
  return sum / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

double cross_pair_index(const PanelData& panel, DayRange window) {
  if (window.begin < 1 || window.end > panel.days() || window.length() < 3) {
    throw DataError("cross_pair_index: window must hold at least 3 return days");
  }
  return cross_pair_index(panel.excess().middleRows(window.begin, window.length()));
}

CrossPairIndex cross_pair_series(const PanelData& panel, Index window_length, Index step) {
  const Index available = panel.days() - 1;
  if (window_length < 3 || window_length > available) {
    throw DataError("cross_pair_series: window of " + std::to_string(window_length) +
                    " days does not fit a panel with " + std::to_string(available) +
                    " return days");
  }
  if (step < 1) throw DataError("cross_pair_series: step must be positive");
  CrossPairIndex out;
  std::vector<double> values;
  for (Index begin = 1; begin + window_length <= panel.days(); begin += step) {
    const DayRange w{begin, begin + window_length};
    out.windows.push_back(w);
    values.push_back(cross_pair_index(panel, w));
  }
  out.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  return out;
}

std::string factor_benchmark_csv(const TradingCalendar& calendar,
                                 std::span<const FactorIndex> factors) {
  std::ostringstream out;
  out << "date,name,close\n";
  std::vector<double> level(factors.size(), std::numeric_limits<double>::quiet_NaN());
  for (Index d = 0; d < calendar.size(); ++d) {
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const double r = d < factors[f].returns.size() ? factors[f].returns(d) : kNaN;
      if (std::isnan(level[f])) {
        if (d + 1 < factors[f].returns.size() && !std::isnan(factors[f].returns(d + 1))) {
          level[f] = 1.0;
        }
      } else if (!std::isnan(r)) {
        level[f] *= 1.0 + r;
      }
      if (!std::isnan(level[f])) {
        out << format_date(calendar[d]) << ',' << factors[f].name << ','
            << format_number(level[f]) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace corrfolio
