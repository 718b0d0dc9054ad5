#include "corrfolio/report.hpp"

#include <json.hpp>

#include <sstream>

namespace corrfolio {

namespace {

using Json = nlohmann::ordered_json;

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*v);
  } else {
    return std::to_string(*v);
  }
}

template <class T>
Json json_or_null(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json estimate_json(const stats::CorrelationEstimate& e) {
  Json j;
  j["rho"] = e.rho;
  j["ci_low"] = e.ci_low;
  j["ci_high"] = e.ci_high;
  j["n"] = e.n;
  return j;
}

Json range_json(const PanelData& panel, DayRange r) {
  Json j;
  j["from"] = format_date(panel.calendar()[r.begin]);
  j["to"] = format_date(panel.calendar()[r.end - 1]);
  j["days"] = r.length();
  return j;
}

}  // namespace

std::string study_csv(const CorrelationReport& report, StudyLeg leg) {
  std::ostringstream out;
  out << "field,leg,rho,ci_low,ci_high,n\n";
  const char* name = leg == StudyLeg::Contemporary ? "contemporary" : "lagged";
  for (const auto& row : report.rows) {
    const auto& e = leg == StudyLeg::Contemporary ? row.contemporary : row.lagged;
    out << row.field << ',' << name << ',' << format_number(e.rho) << ',' << format_number(e.ci_low) << ','
        << format_number(e.ci_high) << ',' << e.n << '\n';
  }
  return out.str();
}

std::string study_json(const CorrelationReport& report, const PanelData& panel) {
  Json j;
  j["window_a"] = range_json(panel, report.window_a);
  j["window_b"] = range_json(panel, report.window_b);
  j["n_assets"] = report.n_assets;
  j["confidence"] = 0.95;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r;
    r["field"] = row.field;
    r["contemporary"] = estimate_json(row.contemporary);
    r["lagged"] = estimate_json(row.lagged);
    rows.push_back(std::move(r));
  }
  j["fields"] = std::move(rows);
  j["diagnostics"] = report.diagnostics;
  return j.dump(2) + "\n";
}

std::string curves_csv(const BacktestResult& result) {
  std::ostringstream out;
  out << "date,strategy,period_return,compounded_value\n";
  for (const auto& curve : result.curves) {
    for (Index k = 0; k < curve.periods(); ++k) {
      const auto& p = result.months[static_cast<std::size_t>(k)].period;
      out << format_date(p.end_date) << ',' << strategy_name(curve.strategy) << ','
          << format_number(curve.period_returns(k)) << ',' << format_number(curve.values(k + 1)) << '\n';
    }
  }
  return out.str();
}

std::string weights_csv(const BacktestResult& result, const PanelData& panel) {
  std::ostringstream out;
  out << "date,strategy,asset_id,weight\n";
  for (const auto& m : result.months) {
    for (const auto& curve : result.curves) {
      const WeightVector& w = m.weights.at(curve.strategy);
      for (Index a = 0; a < w.weights.size(); ++a) {
        if (w.weights(a) == 0.0) continue;
        out << format_date(w.date) << ',' << strategy_name(curve.strategy) << ','
            << panel.asset_ids()[static_cast<std::size_t>(a)] << ',' << format_number(w.weights(a)) << '\n';
      }
    }
  }
  return out.str();
}

std::string report_csv(const BacktestReport& report) {
  std::ostringstream out;
  out << "strategy,return,sharpe,max_up,max_dd,months_plus,fidelity,max_peak_trough_dd,months\n";
  for (const auto& r : report.rows) {
    out << strategy_name(r.strategy) << ',' << cell(r.annualized_return) << ',' << cell(r.sharpe) << ','
        << cell(r.max_up) << ',' << cell(r.max_dd) << ',' << cell(r.months_plus) << ',' << cell(r.fidelity)
        << ',' << cell(r.max_peak_trough_dd) << ',' << r.months << '\n';
  }
  return out.str();
}

std::string report_json(const BacktestReport& report, const BacktestResult& result) {
  Json j;
  Json meta;
  meta["periods"] = result.months.size();
  if (!result.months.empty()) {
    meta["first_rebalance"] = format_date(result.months.front().period.date);
    meta["last_period_end"] = format_date(result.months.back().period.end_date);
  }
  meta["annualization"] = "geometric return over 12 periods per year; sharpe scaled by sqrt(12)";
  meta["max_up_dd"] = "best and worst compounded return over rolling 12-period windows";
  meta["max_peak_trough_dd"] = "peak-to-trough drawdown of the compounded value; informational, not a table column";
  meta["fidelity_null"] =
      "binomial with p = share of basket above the basket mean; selection is without replacement, "
      "so the exact null would be hypergeometric";
  meta["months_plus"] = "periods with return strictly above EW";
  j["metadata"] = std::move(meta);
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["strategy"] = strategy_name(r.strategy);
    row["return"] = json_or_null(r.annualized_return);
    row["sharpe"] = json_or_null(r.sharpe);
    row["max_up"] = json_or_null(r.max_up);
    row["max_dd"] = json_or_null(r.max_dd);
    row["months_plus"] = json_or_null(r.months_plus);
    row["fidelity"] = json_or_null(r.fidelity);
    row["max_peak_trough_dd"] = json_or_null(r.max_peak_trough_dd);
    row["months"] = r.months;
    row["notes"] = r.notes;
    rows.push_back(std::move(row));
  }
  j["strategies"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string diagnostics_json(const BacktestResult& result, const PanelData& panel) {
  Json j;
  j["panel"] = panel.diagnostics();
  Json months = Json::array();
  for (const auto& m : result.months) {
    Json month;
    month["date"] = format_date(m.period.date);
    month["window_prev"] = range_json(panel, m.period.window_prev);
    month["window_prev2"] = range_json(panel, m.period.window_prev2);
    month["holding"] = range_json(panel, m.period.holding);
    if (m.frontier) {
      Json f;
      f["converged"] = m.frontier->converged;
      f["volatility"] = m.frontier->volatility;
      f["expected_return"] = m.frontier->expected_return;
      f["lambda"] = m.frontier->lambda;
      f["bisections"] = m.frontier->bisections;
      f["iterations"] = m.frontier->iterations;
      f["return_above_ew"] = json_or_null(m.frontier_minus_ew_return);
      month["frontier"] = std::move(f);
    }
    if (m.adaptive) {
      Json a;
      a["trigger"] = m.adaptive->trigger;
      a["flip"] = m.adaptive->flip;
      month["adaptive"] = std::move(a);
    }
    month["rc_r_squared"] = json_or_null(m.rc_r_squared);
    Json selected;
    for (const auto& curve : result.curves) {
      selected[strategy_name(curve.strategy)] = m.weights.at(curve.strategy).support().size();
    }
    month["selected"] = std::move(selected);
    month["diagnostics"] = m.diagnostics;
    months.push_back(std::move(month));
  }
  j["months"] = std::move(months);
  return j.dump(2) + "\n";
}

}  // namespace corrfolio
