#pragma once

// Monthly rebalance loop over two-year lookbacks.

#include "corrfolio/allocation.hpp"
#include "corrfolio/explanatory.hpp"
#include "corrfolio/regression.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corrfolio {

/// One rebalance.  Weights decided with data through the close of day-1
/// are held over `holding`, which starts at `day`.
struct RebalancePeriod {
  Index day = 0;
  Date date{};
  Date end_date{};        // last trading day of the holding period
  DayRange window_prev;   // trailing 252 return days
  DayRange window_prev2;  // the 252 days before window_prev
  DayRange holding;
};

struct RebalanceSchedule {
  std::vector<RebalancePeriod> periods;

  std::size_t size() const { return periods.size(); }
};

/// Lookback needed before the first rebalance (two trading years).
inline constexpr Index kLookbackDays = 2 * kTradingYear;

/// Rebalances on the first trading day of every month in [from, to]; the
/// last holding period ends with the last trading day on or before `to`.
RebalanceSchedule make_schedule(const PanelData& panel, const Date& from, const Date& to);

/// Compounded strategy value; values has one more entry than
/// period_returns and starts at 1.
struct EquityCurve {
  Strategy strategy = Strategy::EW;
  std::vector<Date> dates;  // rebalance date of each period
  Vector period_returns;
  Vector values;

  Index periods() const { return period_returns.size(); }
  double terminal() const { return values(values.size() - 1); }
};

/// Builds the compounded curve; a period return at or below -100% is an error.
EquityCurve compound(Strategy strategy, std::vector<Date> dates, const Vector& period_returns);

enum class AdaptiveMode { Auto, ForceOff, ForceOn };

struct BacktestOptions {
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  FieldSpec fields = FieldSpec::ten_factor();
  AdaptiveMode adaptive = AdaptiveMode::Auto;
  FrontierOptions frontier;
  FitOptions fit;
};

/// What happened at one rebalance.
struct MonthRecord {
  RebalancePeriod period;
  Vector asset_returns;    // compounded holding-period return per panel asset
  double riskfree = 0.0;   // compounded holding-period risk-free return
  std::map<Strategy, WeightVector> weights;
  std::optional<AdaptiveState> adaptive;
  std::optional<FrontierSolution> frontier;  // weights cleared; diagnostics only
  std::optional<double> frontier_minus_ew_return;
  std::optional<double> rc_r_squared;
  std::vector<std::string> diagnostics;
};

struct BacktestResult {
  RebalanceSchedule schedule;
  std::vector<EquityCurve> curves;  // in the requested strategy order
  std::vector<MonthRecord> months;
  Vector period_riskfree;

  const EquityCurve& curve(Strategy s) const;
  bool has(Strategy s) const;
  /// Selected assets per month for a strategy (support of its weights).
  std::vector<std::vector<Index>> selections(Strategy s) const;
  /// Per-month per-asset realized holding returns.
  std::vector<Vector> realized() const;
};

BacktestResult run_backtest(const PanelData& panel, const RebalanceSchedule& schedule,
                            const BacktestOptions& options = {});
BacktestResult run_backtest(const PanelData& panel, const Date& from, const Date& to,
                            const BacktestOptions& options = {});

}  // namespace corrfolio
