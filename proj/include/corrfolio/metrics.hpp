#pragma once

#include "corrfolio/backtest.hpp"

#include <optional>
#include <span>
#include <utility>

namespace corrfolio {

/// Periods per year for monthly curves.
inline constexpr int kPeriodsPerYear = 12;

/// terminal^(12/M) - 1.
double metric_annualized_return(const EquityCurve& curve);

/// Mean monthly excess return over its sample deviation, times sqrt(12).
double metric_sharpe(const EquityCurve& curve, const Eigen::Ref<const Vector>& riskfree);

/// Best and worst compounded return over every run of 12 consecutive periods.
std::pair<double, double> metric_max_up_dd(const EquityCurve& curve);

/// Largest peak-to-trough fall of the compounded value (negative fraction).
double metric_peak_trough_dd(const EquityCurve& curve);

/// Periods in which the curve's return strictly beats the baseline's.
Index metric_months_plus(const EquityCurve& curve, const EquityCurve& baseline);

/// P[Binomial(n, p) < k], exact.
double binomial_cdf_below(Index n, double p, Index k);

struct FidelityResult {
  double value = 0.0;
  Index months_used = 0;
  Index months_skipped = 0;  // months with an empty selection
};

/// Average over months of P[Binomial(n, p) < k] where p is the share of the
/// basket beating the basket mean, n the selection size and k the number of
/// selected outperformers.
FidelityResult metric_fidelity(std::span<const std::vector<Index>> selections,
                               std::span<const Vector> realized);

/// One row of the strategy comparison table.  Unset metrics are undefined
/// for the strategy (or the curve is too short).
struct StrategyMetrics {
  Strategy strategy = Strategy::EW;
  std::optional<double> annualized_return;
  std::optional<double> sharpe;
  std::optional<double> max_up;
  std::optional<double> max_dd;
  std::optional<Index> months_plus;
  std::optional<double> fidelity;
  std::optional<double> max_peak_trough_dd;
  Index months = 0;
  std::vector<std::string> notes;
};

struct BacktestReport {
  std::vector<StrategyMetrics> rows;
};

/// Months+ needs an EW curve in the result; fidelity is reported for EF, RC and RC*.
BacktestReport make_report(const BacktestResult& result);

}  // namespace corrfolio
