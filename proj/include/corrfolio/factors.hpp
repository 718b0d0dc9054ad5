#pragma once

// Long-short factor indexes built from the basket's own fundamentals, and
// the cross-pair correlation index.

#include "corrfolio/market_data.hpp"

#include <span>
#include <string>
#include <vector>

namespace corrfolio {

enum class FactorField { DivYield, EV, MtB, EvEbitda };

inline constexpr std::array<FactorField, 4> kFactorFields = {
    FactorField::DivYield, FactorField::EV, FactorField::MtB, FactorField::EvEbitda};

/// DIVYIELD, EV, MTB or EVEBITDA.
std::string factor_name(FactorField field);

enum class SortOrder { Ascending, Descending };

/// Daily low-minus-high tercile returns.  Legs are rebuilt on every schedule
/// day s from fundamentals known at the close of s-1 and held for the days
/// s .. next-1.  `returns` has one entry per calendar day (NaN before the
/// first leg is formed).
struct FactorIndex {
  std::string name;
  Vector returns;
  std::vector<Index> rebalance_days;
  std::vector<std::vector<Index>> low_legs;
  std::vector<std::vector<Index>> high_legs;
};

/// Per-asset sort key for a factor as known on `day` (NaN when unavailable).
Vector factor_values(const PanelData& panel, FactorField field, Index day);

FactorIndex build_factor_index(const PanelData& panel, FactorField field,
                               std::span<const Index> schedule,
                               SortOrder order = SortOrder::Ascending);

/// Equally weighted mean of all pairwise Pearson correlations between the
/// columns of `returns` (rows = days).  Constant columns are ignored.
double cross_pair_index(const Eigen::Ref<const Matrix>& returns);

/// Cross-pair index of the panel's excess returns over `window`.
double cross_pair_index(const PanelData& panel, DayRange window);

/// Rolling cross-pair index over windows of `window_length` return days
/// advanced by `step`; each value is tagged with its window.
struct CrossPairIndex {
  std::vector<DayRange> windows;
  Vector values;
};

CrossPairIndex cross_pair_series(const PanelData& panel, Index window_length, Index step);

/// Factor indexes rendered as benchmarks.csv rows (level compounded from 1
/// on the first day with a defined return).
std::string factor_benchmark_csv(const TradingCalendar& calendar,
                                 std::span<const FactorIndex> factors);

}  // namespace corrfolio
