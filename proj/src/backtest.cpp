#include "corrfolio/backtest.hpp"

#include "corrfolio/stats.hpp"

#include <algorithm>
#include <cmath>

namespace corrfolio {

namespace {

std::string at_date(const Date& date) { return "backtest " + format_date(date) + ": "; }

// Every input window must close before the first day of the holding period.
void check_no_look_ahead(const RebalancePeriod& p) {
  if (p.window_prev.end > p.day || p.window_prev2.end > p.window_prev.begin ||
      p.holding.begin != p.day || p.window_prev2.begin < 1 || p.holding.empty()) {
    throw std::logic_error("look-ahead in schedule at " + format_date(p.date));
  }
}

}  // namespace

RebalanceSchedule make_schedule(const PanelData& panel, const Date& from, const Date& to) {
  if (from > to) throw ConfigError("backtest: range start " + format_date(from) + " after end " + format_date(to));
  const DayRange span = panel.range(from, to);
  if (span.empty()) throw DataError("backtest: no trading days in " + format_date(from) + ".." + format_date(to));

  std::vector<Index> starts;
  for (Index s : panel.calendar().month_starts()) {
    if (span.contains(s)) starts.push_back(s);
  }
  if (starts.empty()) throw DataError("backtest: no month start in " + format_date(from) + ".." + format_date(to));

  RebalanceSchedule schedule;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    RebalancePeriod p;
    p.day = starts[k];
    p.date = panel.calendar()[p.day];
    if (p.day - kLookbackDays < 1) {
      throw DataError(at_date(p.date) + "insufficient history (" + std::to_string(p.day - 1) +
                      " return days before rebalance, need " + std::to_string(kLookbackDays) + ")");
    }
    p.window_prev = {p.day - kTradingYear, p.day};
    p.window_prev2 = {p.day - kLookbackDays, p.day - kTradingYear};
    p.holding = {p.day, k + 1 < starts.size() ? starts[k + 1] : span.end};
    p.end_date = panel.calendar()[p.holding.end - 1];
    check_no_look_ahead(p);
    schedule.periods.push_back(p);
  }
  return schedule;
}

EquityCurve compound(Strategy strategy, std::vector<Date> dates, const Vector& period_returns) {
  EquityCurve curve;
  curve.strategy = strategy;
  curve.dates = std::move(dates);
  curve.period_returns = period_returns;
  curve.values.resize(period_returns.size() + 1);
  curve.values(0) = 1.0;
  for (Index k = 0; k < period_returns.size(); ++k) {
    if (!(period_returns(k) > -1.0)) {
      throw NumericalError(strategy_name(strategy) + " period return at or below -100% on " +
                           format_date(curve.dates[static_cast<std::size_t>(k)]));
    }
    curve.values(k + 1) = curve.values(k) * (1.0 + period_returns(k));
  }
  return curve;
}

const EquityCurve& BacktestResult::curve(Strategy s) const {
  for (const auto& c : curves) {
    if (c.strategy == s) return c;
  }
  throw DataError("backtest: no curve for " + strategy_name(s));
}

bool BacktestResult::has(Strategy s) const {
  return std::any_of(curves.begin(), curves.end(), [s](const EquityCurve& c) { return c.strategy == s; });
}

std::vector<std::vector<Index>> BacktestResult::selections(Strategy s) const {
  std::vector<std::vector<Index>> out;
  for (const auto& m : months) out.push_back(m.weights.at(s).support());
  return out;
}

std::vector<Vector> BacktestResult::realized() const {
  std::vector<Vector> out;
  for (const auto& m : months) out.push_back(m.asset_returns);
  return out;
}

namespace {

bool wants(const std::vector<Strategy>& set, Strategy s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

struct RcOutcome {
  Vector rc;
  Vector rc_star;
};

RcOutcome rc_weights(const PanelData& panel, const DriverSet& drivers, const RebalancePeriod& p,
                     const BacktestOptions& options, bool need_star, MonthRecord& record) {
  const Index n = panel.assets();
  const FieldMatrix lagged = compute_fields(panel, drivers, p.window_prev2, options.fields);
  const FieldMatrix current = compute_fields(panel, drivers, p.window_prev, options.fields);
  for (const auto& d : lagged.diagnostics) record.diagnostics.push_back("fields prev2: " + d);
  for (const auto& d : current.diagnostics) record.diagnostics.push_back("fields prev: " + d);
  if (current.rows() == 0) throw DataError(at_date(p.date) + "empty retained-asset set");

  RcOutcome out;
  RegressionModel model;
  try {
    model = fit(lagged, window_means(panel, p.window_prev), options.fit);
  } catch (const Error& e) {
    record.diagnostics.push_back(std::string("RC fit failed, using EW: ") + e.what());
    out.rc = ew_weights(n);
    out.rc_star = out.rc;
    return out;
  }
  record.rc_r_squared = model.r_squared;
  for (const auto& f : model.dropped_fields) record.diagnostics.push_back("RC dropped field " + f);
  out.rc = current.rows() >= 2 ? rc_select(predict(model, current), n) : ew_weights(current.assets, n);
  if (!need_star) return out;

  AdaptiveState state;
  switch (options.adaptive) {
    case AdaptiveMode::ForceOff: state.flip = false; break;
    case AdaptiveMode::ForceOn: state.flip = true; break;
    case AdaptiveMode::Auto:
      try {
        state = adaptive_trigger(panel, p.window_prev);
      } catch (const DataError& e) {
        record.diagnostics.push_back(std::string("adaptive trigger unavailable: ") + e.what());
      }
      break;
  }
  record.adaptive = state;
  if (state.flip && current.rows() >= 2) {
    out.rc_star = rc_select(predict(flip_coefficients(model), current), n);
  } else {
    out.rc_star = out.rc;
  }
  return out;
}

Vector ef_weights(const PanelData& panel, const RebalancePeriod& p, const BacktestOptions& options,
                  MonthRecord& record) {
  const Index n = panel.assets();
  const auto window = panel.excess().middleRows(p.window_prev.begin, p.window_prev.length());
  const Vector mu = window.colwise().mean().transpose();
  const Matrix cov = sample_covariance(window);
  const Vector ew = ew_weights(n);
  const double target = std::sqrt(std::max(ew.dot(cov * ew), 0.0));
  if (!(target > 0.0)) {
    record.diagnostics.push_back("EF: equal-weight volatility is zero, using EW");
    return ew;
  }
  FrontierSolution sol = solve_frontier(mu, cov, target, options.frontier);
  if (!sol.converged) {
    record.diagnostics.push_back("EF: frontier did not reach target volatility (achieved " +
                                 format_number(sol.volatility) + ", target " + format_number(target) + ")");
  }
  record.frontier_minus_ew_return = sol.expected_return - mu.dot(ew);
  Vector w = ef_select(sol, n);
  sol.weights.resize(0);
  record.frontier = sol;
  return w;
}

}  // namespace

BacktestResult run_backtest(const PanelData& panel, const RebalanceSchedule& schedule,
                            const BacktestOptions& options) {
  if (schedule.periods.empty()) throw DataError("backtest: empty schedule");
  if (options.strategies.empty()) throw ConfigError("backtest: no strategies requested");
  const auto& want = options.strategies;
  const bool need_star = wants(want, Strategy::RCStar);
  const bool need_rc = need_star || wants(want, Strategy::RC) || wants(want, Strategy::MIX);
  const bool need_ef = wants(want, Strategy::EF) || wants(want, Strategy::MIX);

  DriverSet drivers;
  if (need_rc) {
    // Factor legs rebalance on month starts, including those in the lookback.
    drivers = build_drivers(panel);
  }

  BacktestResult result;
  result.schedule = schedule;
  const Index n = panel.assets();
  const auto months = static_cast<Index>(schedule.periods.size());
  std::map<Strategy, Vector> returns;
  for (Strategy s : want) returns[s] = Vector::Zero(months);
  result.period_riskfree.resize(months);
  std::vector<Date> dates;

  for (Index k = 0; k < months; ++k) {
    const RebalancePeriod& p = schedule.periods[static_cast<std::size_t>(k)];
    check_no_look_ahead(p);
    if (p.holding.end > panel.days()) throw DataError(at_date(p.date) + "holding period outside panel");
    MonthRecord record;
    record.period = p;
    dates.push_back(p.date);

    record.asset_returns = Vector::Zero(n);
    for (Index a = 0; a < n; ++a) {
      double growth = 1.0;
      for (Index d = p.holding.begin; d < p.holding.end; ++d) growth *= 1.0 + panel.returns()(d, a);
      record.asset_returns(a) = growth - 1.0;
    }
    double rf_growth = 1.0;
    for (Index d = p.holding.begin; d < p.holding.end; ++d) {
      rf_growth *= 1.0 + panel.riskfree()(d) / static_cast<double>(kTradingYear);
    }
    record.riskfree = rf_growth - 1.0;
    result.period_riskfree(k) = record.riskfree;

    std::map<Strategy, Vector> w;
    w[Strategy::EW] = ew_weights(n);
    if (need_rc) {
      RcOutcome rc = rc_weights(panel, drivers, p, options, need_star, record);
      w[Strategy::RC] = std::move(rc.rc);
      if (need_star) w[Strategy::RCStar] = std::move(rc.rc_star);
    }
    if (need_ef) w[Strategy::EF] = ef_weights(panel, p, options, record);
    if (wants(want, Strategy::MIX)) w[Strategy::MIX] = mix_weights(w[Strategy::EF], w[Strategy::RC]);

    // Buy and hold: the period return is the weighted sum of asset growths.
    for (Strategy s : want) {
      returns[s](k) = w[s].dot(record.asset_returns);
      record.weights[s] = WeightVector{s, p.date, w[s]};
    }
    result.months.push_back(std::move(record));
  }

  for (Strategy s : want) result.curves.push_back(compound(s, dates, returns[s]));
  return result;
}

BacktestResult run_backtest(const PanelData& panel, const Date& from, const Date& to,
                            const BacktestOptions& options) {
  return run_backtest(panel, make_schedule(panel, from, to), options);
}

}  // namespace corrfolio
