#pragma once

// Per-asset explanatory fields over a window and the contemporary/lagged
// cross-sectional correlation study.

#include "corrfolio/factors.hpp"
#include "corrfolio/stats.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace corrfolio {

/// Identifier of one explanatory field.
struct FieldId {
  enum class Kind { Sharpe, Mean, Skew, SkewStar, RhoPairs, Sigma, Rho, Beta };

  Kind kind = Kind::Mean;
  std::string driver;  // benchmark or factor name for Rho/Beta

  /// Canonical name, e.g. SIGMA, BETA_MARKET, SKEW_STAR.
  std::string name() const;
  friend bool operator==(const FieldId&, const FieldId&) = default;
};

/// Drivers accepted by RHO_<x> / BETA_<x>.
inline constexpr std::array<const char*, 11> kDriverNames = {
    "MARKET", "VIX", "OIL", "Y10", "MOMENTUM", "GROWTH", "VALUE",
    "DIVYIELD", "EV", "MTB", "EVEBITDA"};

/// Ordered, duplicate-free list of fields.
class FieldSpec {
 public:
  FieldSpec() = default;
  explicit FieldSpec(std::vector<FieldId> fields);

  /// Parses a comma-separated list such as "SIGMA,BETA_MARKET".
  static FieldSpec parse(std::string_view text);
  /// zeta*, sigma and betas vs MARKET, MOMENTUM, GROWTH, Y10, VIX, DIVYIELD, EV, MTB.
  static FieldSpec ten_factor();
  /// Every recognized field.
  static FieldSpec full_study();

  const std::vector<FieldId>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  std::vector<std::string> names() const;

 private:
  std::vector<FieldId> fields_;
};

FieldId parse_field_id(std::string_view token);

/// Daily driver return series on the panel calendar (row 0 NaN): benchmarks
/// (MARKET net of the risk-free rate, Y10 as yield changes), factor indexes,
/// and PAIRS, the equal-weighted basket excess return.
struct DriverSet {
  std::map<std::string, Vector> series;
  std::vector<std::string> diagnostics;

  const Vector& at(const std::string& name) const;
  bool has(const std::string& name) const { return series.count(name) != 0; }
};

/// Builds every driver the panel supports; factor indexes refresh on
/// `factor_schedule`.  Drivers that cannot be built are recorded in
/// diagnostics and left out.
DriverSet build_drivers(const PanelData& panel, std::span<const Index> factor_schedule);
/// Same with factor legs refreshed on the first trading day of each month.
DriverSet build_drivers(const PanelData& panel);

/// Field values for the retained assets of one window.
struct FieldMatrix {
  DayRange window;
  std::vector<Index> assets;  // panel asset index per row
  std::vector<std::string> fields;
  Matrix values;              // assets x fields
  std::vector<std::string> diagnostics;

  Index rows() const { return values.rows(); }
  /// Column of a field by name; -1 when absent.
  Index column(const std::string& field) const;
};

/// Minimum window for field estimation.
inline constexpr Index kMinFieldWindow = 60;

FieldMatrix compute_fields(const PanelData& panel, const DriverSet& drivers, DayRange window,
                           const FieldSpec& spec);
FieldMatrix compute_fields(const PanelData& panel, DayRange window, const FieldSpec& spec);

/// Mean excess return of every panel asset over the window.
Vector window_means(const PanelData& panel, DayRange window);

struct FieldCorrelation {
  std::string field;
  stats::CorrelationEstimate contemporary;
  stats::CorrelationEstimate lagged;
};

struct CorrelationReport {
  DayRange window_a;
  DayRange window_b;
  Index n_assets = 0;
  std::vector<FieldCorrelation> rows;
  std::vector<std::string> diagnostics;
};

/// Cross-sectional correlation of field values on `window_a` with mean excess
/// returns on `window_a` (contemporary) and on `window_b` (lagged).
CorrelationReport correlation_study(const PanelData& panel, const DriverSet& drivers,
                                    DayRange window_a, DayRange window_b, const FieldSpec& spec);
CorrelationReport correlation_study(const PanelData& panel, DayRange window_a, DayRange window_b,
                                    const FieldSpec& spec);

/// Confidence interval of a cross-sectional correlation; collapses to the
/// point when |rho| reaches 1.
stats::CorrelationEstimate cross_sectional_estimate(double rho, Index n);

}  // namespace corrfolio
