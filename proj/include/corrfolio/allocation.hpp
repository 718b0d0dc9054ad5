#pragma once

// Long-only, fully invested weight vectors for the EW, EF, RC, MIX and RC*
// strategies.

#include "corrfolio/explanatory.hpp"
#include "corrfolio/regression.hpp"

#include <span>
#include <string>

namespace corrfolio {

enum class Strategy { EW, EF, RC, MIX, RCStar };

inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::EF, Strategy::RC, Strategy::RCStar, Strategy::MIX, Strategy::EW};

/// EW, EF, RC, MIX, RC*.
std::string strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Weights over the full panel universe at one rebalance date.
struct WeightVector {
  Strategy strategy = Strategy::EW;
  Date date{};
  Vector weights;

  /// Panel indices with nonzero weight.
  std::vector<Index> support() const;
};

/// 1/|assets| on the listed assets of a universe of `universe` names.
Vector ew_weights(std::span<const Index> assets, Index universe);
Vector ew_weights(Index universe);

struct FrontierOptions {
  double lambda_min = 1e-6;
  double lambda_max = 1e6;
  /// Achieved volatility within this relative distance of the target counts as converged.
  double vol_tolerance = 1e-4;
  /// Bisection keeps refining until this relative distance (or the limits below).
  double vol_refine = 1e-7;
  int max_bisections = 100;
  int max_iterations = 20000;
  double step_tolerance = 1e-12;
  /// Diagonal loading as a fraction of trace / N.
  double loading = 1e-8;
};

struct FrontierSolution {
  Vector weights;
  double volatility = 0.0;
  double expected_return = 0.0;
  double lambda = 0.0;
  int bisections = 0;
  long iterations = 0;
  bool converged = false;
};

/// Euclidean projection onto the unit simplex.
Vector project_simplex(const Eigen::Ref<const Vector>& y);

/// Maximizes mu'w - lambda w'Sigma w over the simplex by projected gradient,
/// starting from `start`.  `iterations` receives the step count.
Vector solve_mean_variance(const Eigen::Ref<const Vector>& mu, const Eigen::Ref<const Matrix>& cov,
                           double lambda, const Eigen::Ref<const Vector>& start,
                           const FrontierOptions& options, long* iterations = nullptr);

/// Long-only portfolio with the highest expected return whose volatility
/// matches `target_vol`, found by bisection on the risk aversion.  When the
/// target lies outside the attainable range the nearest end of the path is
/// returned with converged = false.
FrontierSolution solve_frontier(const Eigen::Ref<const Vector>& mu, const Eigen::Ref<const Matrix>& cov,
                                double target_vol, const FrontierOptions& options = {});

/// Equal weights on assets whose frontier weight exceeds 1/N; EW when none do.
Vector ef_select(const FrontierSolution& frontier, Index n_total);

/// Equal weights on assets predicted strictly above the mean prediction; EW
/// over the predicted assets when none are.
Vector rc_select(const AssetValues& predictions, Index universe);

/// Elementwise average of two weight vectors.
Vector mix_weights(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

struct AdaptiveState {
  bool flip = false;
  double trigger = 0.0;
};

/// Cross-sectional correlation of asset volatility with mean excess return
/// over `window`; a negative value requests flipped coefficients.
AdaptiveState adaptive_trigger(const PanelData& panel, DayRange window);

/// Sample covariance (n-1) of the columns of `returns`.
Matrix sample_covariance(const Eigen::Ref<const Matrix>& returns);

}  // namespace corrfolio
