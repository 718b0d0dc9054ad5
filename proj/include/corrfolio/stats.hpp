#pragma once

// Moments, correlation, beta and tail-asymmetry statistics over return
// series.  Every function accepts any dense Eigen vector expression and is
// pure.

#include "corrfolio/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace corrfolio::stats {

namespace detail {

template <typename Derived>
void require_size(const Eigen::DenseBase<Derived>& x, Index n, const char* op) {
  if (x.size() < n) {
    throw DataError(std::string(op) + ": need at least " + std::to_string(n) +
                    " observations, got " + std::to_string(x.size()));
  }
}

template <typename A, typename B>
void require_same_size(const Eigen::DenseBase<A>& x, const Eigen::DenseBase<B>& y,
                       const char* op) {
  if (x.size() != y.size()) {
    throw DataError(std::string(op) + ": length mismatch (" + std::to_string(x.size()) +
                    " vs " + std::to_string(y.size()) + ")");
  }
}

/// A centred sum of squares is treated as zero when the implied spread is
/// within rounding of the data magnitude.
template <typename Scalar>
bool negligible_spread(Scalar centred_ss, Index n, Scalar magnitude) {
  const Scalar rms = std::sqrt(centred_ss / static_cast<Scalar>(n));
  return !(rms > Scalar(64) * std::numeric_limits<Scalar>::epsilon() * magnitude);
}

template <typename Derived>
typename Derived::Scalar centred_ss(const Eigen::DenseBase<Derived>& x,
                                    typename Derived::Scalar mu) {
  return (x.derived().array() - mu).square().sum();
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar mean(const Eigen::DenseBase<Derived>& x) {
  detail::require_size(x, 1, "mean");
  return x.sum() / static_cast<typename Derived::Scalar>(x.size());
}

/// Sample standard deviation (n-1 denominator).
template <typename Derived>
typename Derived::Scalar volatility(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::require_size(x, 2, "volatility");
  const Scalar mu = mean(x);
  return std::sqrt(detail::centred_ss(x, mu) / static_cast<Scalar>(x.size() - 1));
}

/// True when the series has no spread beyond floating-point rounding.
template <typename Derived>
bool is_constant(const Eigen::DenseBase<Derived>& x) {
  if (x.size() < 2) return true;
  const auto mu = mean(x);
  return detail::negligible_spread(detail::centred_ss(x, mu), x.size(),
                                   x.derived().array().abs().maxCoeff());
}

template <typename Derived>
typename Derived::Scalar sharpe(const Eigen::DenseBase<Derived>& x) {
  detail::require_size(x, 2, "sharpe");
  if (is_constant(x)) throw NumericalError("sharpe: zero volatility");
  return mean(x) / volatility(x);
}

/// Pearson correlation.
template <typename A, typename B>
typename A::Scalar correlation(const Eigen::DenseBase<A>& x, const Eigen::DenseBase<B>& y) {
  using Scalar = typename A::Scalar;
  detail::require_same_size(x, y, "correlation");
  detail::require_size(x, 3, "correlation");
  if (is_constant(x) || is_constant(y)) throw NumericalError("correlation: constant input");
  const auto xc = (x.derived().array() - mean(x)).eval();
  const auto yc = (y.derived().array() - mean(y)).eval();
  const Scalar rho = (xc * yc).sum() / std::sqrt(xc.square().sum() * yc.square().sum());
  return std::clamp(rho, Scalar(-1), Scalar(1));
}

/// Least-squares slope of x on b, identical to correlation(x, b) * vol(x) / vol(b).
template <typename A, typename B>
typename A::Scalar beta(const Eigen::DenseBase<A>& x, const Eigen::DenseBase<B>& b) {
  detail::require_same_size(x, b, "beta");
  detail::require_size(x, 3, "beta");
  if (is_constant(b)) throw NumericalError("beta: constant benchmark");
  const auto bc = (b.derived().array() - mean(b)).eval();
  const auto xc = (x.derived().array() - mean(x)).eval();
  return (xc * bc).sum() / bc.square().sum();
}

/// Third standardized moment with population (1/n) moments.
template <typename Derived>
typename Derived::Scalar skewness(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::require_size(x, 3, "skewness");
  if (is_constant(x)) throw NumericalError("skewness: zero volatility");
  const Scalar n = static_cast<Scalar>(x.size());
  const auto xc = (x.derived().array() - mean(x)).eval();
  const Scalar m2 = xc.square().sum() / n;
  const Scalar m3 = xc.cube().sum() / n;
  return m3 / std::pow(m2, Scalar(1.5));
}

/// Rank-by-magnitude asymmetry statistic.  The series is standardized,
/// sorted by |z| ascending (ties: negative first, then time order), and the
/// statistic is -(2/n^2) times the area under the running sum of the
/// sorted values.  A few large losses on top of many small gains give a
/// negative value; a few large gains give a positive one.
template <typename Derived>
typename Derived::Scalar revised_skewness(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::require_size(x, 3, "revised_skewness");
  if (is_constant(x)) throw NumericalError("revised_skewness: zero volatility");
  const Index n = x.size();
  const Scalar mu = mean(x);
  const Scalar sigma = volatility(x);

  std::vector<Scalar> z(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (x.derived()(i) - mu) / sigma;

  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Scalar aa = std::abs(z[a]);
    const Scalar ab = std::abs(z[b]);
    if (aa != ab) return aa < ab;
    return (z[a] < 0) && !(z[b] < 0);
  });

  Scalar running = 0;
  Scalar area = 0;
  for (std::size_t k : order) {
    running += z[k];
    area += running;
  }
  const Scalar nn = static_cast<Scalar>(n);
  return -Scalar(2) * area / (nn * nn);
}

/// Correlation with a two-sided 95% confidence interval.
struct CorrelationEstimate {
  double rho = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Index n = 0;
};

inline constexpr double kNormalQuantile975 = 1.959964;

/// Fisher z-transform interval: tanh(atanh(rho) +- 1.959964 / sqrt(n - 3)).
inline CorrelationEstimate fisher_ci(double rho, Index n) {
  if (n < 4) throw DataError("fisher_ci: need n >= 4, got " + std::to_string(n));
  if (!(std::abs(rho) < 1.0)) throw NumericalError("fisher_ci: |rho| must be < 1");
  const double z = std::atanh(rho);
  const double half = kNormalQuantile975 / std::sqrt(static_cast<double>(n - 3));
  CorrelationEstimate est;
  est.rho = rho;
  est.ci_low = std::clamp(std::tanh(z - half), -1.0, 1.0);
  est.ci_high = std::clamp(std::tanh(z + half), -1.0, 1.0);
  est.n = n;
  return est;
}

/// Simple returns p(t)/p(t-1) - 1; one element shorter than the input.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> to_returns(
    const Eigen::DenseBase<Derived>& prices) {
  detail::require_size(prices, 2, "to_returns");
  const Index n = prices.size();
  const auto& p = prices.derived();
  return (p.tail(n - 1).array() / p.head(n - 1).array() - 1).matrix();
}

/// Subtracts the daily risk-free rate (annual yield / 252) from each return.
template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, 1> excess_returns(
    const Eigen::DenseBase<A>& returns, const Eigen::DenseBase<B>& annual_yield) {
  detail::require_same_size(returns, annual_yield, "excess_returns");
  using Scalar = typename A::Scalar;
  return (returns.derived().array() -
          annual_yield.derived().array() / static_cast<Scalar>(kTradingYear))
      .matrix();
}

}  // namespace corrfolio::stats
