#pragma once

// Serialization of study and backtest results.  Every writer returns the
// file contents so callers can commit a whole set at once.

#include "corrfolio/metrics.hpp"

#include <string>

namespace corrfolio {

enum class StudyLeg { Contemporary, Lagged };

/// `field,leg,rho,ci_low,ci_high,n`
std::string study_csv(const CorrelationReport& report, StudyLeg leg);
std::string study_json(const CorrelationReport& report, const PanelData& panel);

/// `date,strategy,period_return,compounded_value`, one row per holding
/// period dated by its last trading day.
std::string curves_csv(const BacktestResult& result);

/// `date,strategy,asset_id,weight` for nonzero weights.
std::string weights_csv(const BacktestResult& result, const PanelData& panel);

std::string report_csv(const BacktestReport& report);
std::string report_json(const BacktestReport& report, const BacktestResult& result);

/// Per-month convergence flags, dropped assets and fields, adaptive state.
std::string diagnostics_json(const BacktestResult& result, const PanelData& panel);

}  // namespace corrfolio
