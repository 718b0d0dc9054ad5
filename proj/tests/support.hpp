#pragma once

// Panel builders shared by the unit and acceptance tests.

#include "corrfolio/market_data.hpp"

#include <chrono>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace corrfolio::testing {

inline std::vector<Date> weekdays(Date start, Index count) {
  using namespace std::chrono;
  std::vector<Date> out;
  sys_days day{start};
  while (static_cast<Index>(out.size()) < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

inline Vector levels_from_returns(const Eigen::Ref<const Vector>& r, double start = 100.0) {
  Vector out(r.size() + 1);
  out(0) = start;
  for (Index d = 0; d < r.size(); ++d) out(d + 1) = out(d) * (1.0 + r(d));
  return out;
}

inline std::vector<std::string> asset_names(Index n) {
  std::vector<std::string> ids;
  for (Index a = 0; a < n; ++a) ids.push_back("A" + std::to_string(1000 + a));
  return ids;
}

/// Panel whose asset returns are the rows of `returns` (T-1 days); every
/// benchmark not given is a copy of the first asset's returns, Y10 is a
/// flat 3% level, and the risk-free yield is `rf` every day.
inline PanelData panel_from_returns(const Matrix& returns, std::map<std::string, Vector> bench = {},
                                    double rf = 0.0, FundamentalPanel fundamentals = {}) {
  const Index t = returns.rows() + 1;
  const Index n = returns.cols();
  Matrix prices(t, n);
  for (Index a = 0; a < n; ++a) prices.col(a) = levels_from_returns(returns.col(a));
  BenchmarkSet set;
  for (const char* name : kBenchmarkNames) {
    if (std::string(name) == "Y10") {
      set.levels[name] = bench.count(name) ? bench[name] : Vector::Constant(t, 0.03);
    } else {
      set.levels[name] = levels_from_returns(bench.count(name) ? bench[name] : Vector(returns.col(0)));
    }
  }
  using namespace std::chrono;
  return PanelData(TradingCalendar(weekdays(year{2000} / January / 3, t)), asset_names(n), prices,
                   std::move(fundamentals), std::move(set), Vector::Constant(t, rf));
}

/// Fundamentals reported on day 0 only, one value per asset for every field.
inline FundamentalPanel flat_fundamentals(Index t, const Eigen::Ref<const Vector>& per_asset) {
  FundamentalPanel fp;
  const Index n = per_asset.size();
  for (std::size_t f = 0; f < kFundamentalCount; ++f) {
    fp.values[f] = per_asset.transpose().replicate(t, 1);
    fp.age[f].resize(t, n);
    for (Index d = 0; d < t; ++d) fp.age[f].row(d).setConstant(static_cast<int>(d));
  }
  return fp;
}

inline Matrix normal_matrix(std::mt19937_64& rng, Index rows, Index cols, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  }
  return m;
}

inline Vector normal_vector(std::mt19937_64& rng, Index n, double sd = 1.0) {
  return normal_matrix(rng, n, 1, sd).col(0);
}

}  // namespace corrfolio::testing
