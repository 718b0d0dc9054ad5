#pragma once

#include "corrfolio/core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corrfolio {

/// Ordered trading days; strictly increasing.
class TradingCalendar {
 public:
  TradingCalendar() = default;
  explicit TradingCalendar(std::vector<Date> dates);

  Index size() const { return static_cast<Index>(dates_.size()); }
  const Date& operator[](Index d) const { return dates_[static_cast<std::size_t>(d)]; }
  const std::vector<Date>& dates() const { return dates_; }

  /// Index of the first trading day on or after `date`; size() if none.
  Index lower_bound(const Date& date) const;
  /// Index of the last trading day on or before `date`; -1 if none.
  Index last_on_or_before(const Date& date) const;
  std::optional<Index> find(const Date& date) const;

  /// Indices of the first trading day of every calendar month (includes day 0).
  std::vector<Index> month_starts() const;

 private:
  std::vector<Date> dates_;
};

enum class Fundamental : int { Cap = 0, MtB, EV, DivYield, Ebitda };
inline constexpr std::size_t kFundamentalCount = 5;
inline constexpr std::array<const char*, kFundamentalCount> kFundamentalColumns = {
    "cap", "mtb", "ev", "div_yield", "ebitda"};

/// Forward-filled fundamentals.  `values` is days x assets (NaN before the
/// first report); `age` counts trading days since the last report (0 on a
/// report day, -1 before any report).
struct FundamentalPanel {
  std::array<Matrix, kFundamentalCount> values;
  std::array<Eigen::MatrixXi, kFundamentalCount> age;

  bool empty() const { return values[0].size() == 0; }
  const Matrix& operator[](Fundamental f) const { return values[static_cast<std::size_t>(f)]; }
  bool reported(Fundamental f, Index day, Index asset) const {
    return age[static_cast<std::size_t>(f)](day, asset) == 0;
  }
};

inline constexpr std::array<const char*, 7> kBenchmarkNames = {
    "MARKET", "OIL", "VIX", "Y10", "VALUE", "GROWTH", "MOMENTUM"};

/// Benchmark closes (levels) keyed by reserved name.  Y10 holds a yield
/// level, everything else a price index.
struct BenchmarkSet {
  std::map<std::string, Vector> levels;

  bool has(const std::string& name) const { return levels.count(name) != 0; }
};

/// Immutable aligned panel of N assets over a shared trading calendar.
class PanelData {
 public:
  PanelData(TradingCalendar calendar, std::vector<std::string> asset_ids, Matrix prices,
            FundamentalPanel fundamentals, BenchmarkSet benchmarks, Vector riskfree,
            std::vector<std::string> diagnostics = {});

  const TradingCalendar& calendar() const { return calendar_; }
  Index days() const { return calendar_.size(); }
  Index assets() const { return static_cast<Index>(asset_ids_.size()); }
  const std::vector<std::string>& asset_ids() const { return asset_ids_; }

  /// days x assets closes.
  const Matrix& prices() const { return prices_; }
  /// days x assets simple returns; row 0 is NaN.
  const Matrix& returns() const { return returns_; }
  /// Returns net of the daily risk-free rate; row 0 is NaN.
  const Matrix& excess() const { return excess_; }
  /// Annualized risk-free yield per day (fraction).
  const Vector& riskfree() const { return riskfree_; }
  const FundamentalPanel& fundamentals() const { return fundamentals_; }
  const BenchmarkSet& benchmarks() const { return benchmarks_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  /// Daily return series of a benchmark (row 0 NaN).  MARKET is net of the
  /// risk-free rate; Y10 is the daily change in yield.
  Vector benchmark_returns(const std::string& name) const;

  /// Calendar days covered by [from, to] that have a prior close.
  DayRange range(const Date& from, const Date& to) const;

 private:
  TradingCalendar calendar_;
  std::vector<std::string> asset_ids_;
  Matrix prices_;
  Matrix returns_;
  Matrix excess_;
  FundamentalPanel fundamentals_;
  BenchmarkSet benchmarks_;
  Vector riskfree_;
  std::vector<std::string> diagnostics_;
};

struct PanelFiles {
  std::filesystem::path prices;
  std::filesystem::path fundamentals;  // optional; empty path = no fundamentals
  std::filesystem::path benchmarks;
  std::filesystem::path riskfree;
};

/// Tolerances applied while aligning raw price data.
struct LoadPolicy {
  int max_fill_gap = 3;           // consecutive missing closes that may be forward-filled
  double max_missing_frac = 0.05; // above this the asset is rejected
};

/// Loads and aligns the four CSV inputs.  The calendar is the intersection
/// of the price, benchmark and risk-free dates.
PanelData load_panel(const PanelFiles& files, const LoadPolicy& policy = {});

/// Writes the panel back out in the loader's CSV formats.  Fundamentals are
/// written only on report days, so forward-filled values stay sparse.
void write_panel(const PanelData& panel, const std::filesystem::path& dir);

/// Fills NaN holes in a days x assets matrix from the previous row and returns
/// the age of each value in days (-1 where nothing has been reported yet).
Eigen::MatrixXi forward_fill(Matrix& values);

// --------------------------------------------------------------------------
// Synthetic panels

/// Multi-factor generator with per-year asset parameters.  Daily asset return
///   r = drift[a,y] + sum_k loading[a,y,k] f[k,t] + idio[a,y] eps + shock
/// where the yearly drift may depend on the prior year's cross-sectional
/// z-scores of total volatility and market loading (the planted lagged
/// signal), and on the same year's volatility z-score (regime term).
struct SynthConfig {
  Index n_assets = 100;
  Index n_days = 1260;
  Index n_factors = 3;
  std::vector<double> loadings = {1.0};    // per-factor mean, or n_assets*n_factors explicit
  double loading_dispersion = 0.0;         // cross-sectional std of loadings
  std::vector<double> factor_vol = {0.01};
  std::vector<double> factor_drift = {0.0003};
  double idio_vol = 0.01;
  double idio_dispersion = 0.0;            // log-std of per-asset idiosyncratic vol
  double persistence = 0.0;                // share of parameter variance fixed across years
  double skew_mix = 0.0;                   // daily shock probability
  double skew_size = -0.05;                // shock size added on shock days
  std::vector<double> planted_coeffs = {}; // {on z(sigma) prior year, on z(beta) prior year}
  double noise_vol = 0.0;                  // per asset-year drift noise
  double base_drift = 0.0;                 // common asset drift
  std::vector<double> regime_market_drift = {};  // per-year market factor drift override
  std::vector<double> regime_sigma_coeff = {};   // per-year drift on same-year z(sigma)
  Index year_length = kTradingYear;
  double riskfree = 0.02;
  std::string start_date = "2002-01-01";
};

SynthConfig parse_synth_config(const std::string& text);
SynthConfig load_synth_config(const std::filesystem::path& path);

/// Generator-side truth for tests: per asset-year parameters and drifts.
struct SynthTruth {
  Matrix drift;        // years x assets
  Matrix total_vol;    // years x assets, implied daily vol of each asset
  Matrix market_beta;  // years x assets
};

PanelData generate_synthetic_panel(const SynthConfig& config, std::uint64_t seed,
                                   SynthTruth* truth = nullptr);

}  // namespace corrfolio
