#include "corrfolio/allocation.hpp"

#include "corrfolio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace corrfolio {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::EW: return "EW";
    case Strategy::EF: return "EF";
    case Strategy::RC: return "RC";
    case Strategy::MIX: return "MIX";
    case Strategy::RCStar: return "RC*";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  if (name == "RCSTAR" || name == "RC_STAR") return Strategy::RCStar;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::vector<Index> WeightVector::support() const {
  std::vector<Index> out;
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) out.push_back(i);
  }
  return out;
}

Vector ew_weights(std::span<const Index> assets, Index universe) {
  if (assets.empty()) throw DataError("ew_weights: empty asset list");
  Vector w = Vector::Zero(universe);
  const double each = 1.0 / static_cast<double>(assets.size());
  for (Index a : assets) {
    if (a < 0 || a >= universe) throw DataError("ew_weights: asset outside universe");
    w(a) = each;
  }
  return w;
}

Vector ew_weights(Index universe) {
  if (universe < 1) throw DataError("ew_weights: empty asset list");
  return Vector::Constant(universe, 1.0 / static_cast<double>(universe));
}

Vector project_simplex(const Eigen::Ref<const Vector>& y) {
  const Index n = y.size();
  Vector sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += sorted(k);
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted(k) - t > 0.0) tau = t;
  }
  return (y.array() - tau).max(0.0).matrix();
}

namespace {

/// Largest eigenvalue of the covariance restricted to directions that keep
/// the budget constraint (sum of weights) fixed.
double tangent_curvature(const Matrix& cov) {
  const Index n = cov.rows();
  if (n == 1) return 0.0;
  const Matrix centred_rows = cov.rowwise() - cov.colwise().mean();
  const Matrix projected = centred_rows.colwise() - centred_rows.rowwise().mean();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(projected, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

struct MeanVarianceProblem {
  const Eigen::Ref<const Vector>& mu;
  const Matrix& cov;
  double curvature;
  const FrontierOptions& options;

  Vector solve(double lambda, const Vector& start, long& iterations) const {
    const Index n = mu.size();
    Vector w = start;
    const double lipschitz = 2.0 * lambda * curvature;
    if (!(lipschitz > 0.0)) {
      // No curvature along the simplex: the objective is linear there.
      Index best = 0;
      mu.maxCoeff(&best);
      Vector g = mu - 2.0 * lambda * cov * w;
      if ((g.array() - g.mean()).abs().maxCoeff() == 0.0) return w;
      Vector v = Vector::Zero(n);
      v(best) = 1.0;
      return v;
    }
    const double step = 1.0 / lipschitz;
    for (int it = 0; it < options.max_iterations; ++it) {
      Vector g = mu - 2.0 * lambda * (cov * w);
      g.array() -= g.mean();
      Vector next = project_simplex(w + step * g);
      const double change = (next - w).cwiseAbs().maxCoeff();
      w.swap(next);
      ++iterations;
      if (change < options.step_tolerance) break;
    }
    return w;
  }
};

}  // namespace

Vector solve_mean_variance(const Eigen::Ref<const Vector>& mu, const Eigen::Ref<const Matrix>& cov,
                           double lambda, const Eigen::Ref<const Vector>& start,
                           const FrontierOptions& options, long* iterations) {
  const Matrix c = cov;
  MeanVarianceProblem problem{mu, c, tangent_curvature(c), options};
  long its = 0;
  Vector w = problem.solve(lambda, start, its);
  if (iterations != nullptr) *iterations = its;
  return w;
}

FrontierSolution solve_frontier(const Eigen::Ref<const Vector>& mu, const Eigen::Ref<const Matrix>& cov,
                                double target_vol, const FrontierOptions& options) {
  const Index n = mu.size();
  if (n < 1 || cov.rows() != n || cov.cols() != n) {
    throw DataError("solve_frontier: dimension mismatch");
  }
  if (!mu.allFinite() || !cov.allFinite() || !std::isfinite(target_vol)) {
    throw DataError("solve_frontier: non-finite input");
  }
  if (!(target_vol > 0.0)) throw DataError("solve_frontier: target volatility must be positive");

  Matrix loaded = 0.5 * (cov + cov.transpose());
  loaded.diagonal().array() += options.loading * loaded.trace() / static_cast<double>(n);
  const MeanVarianceProblem problem{mu, loaded, tangent_curvature(loaded), options};

  FrontierSolution sol;
  auto evaluate = [&](double lambda, const Vector& start) {
    sol.weights = problem.solve(lambda, start, sol.iterations);
    sol.lambda = lambda;
    sol.volatility = std::sqrt(std::max(sol.weights.dot(loaded * sol.weights), 0.0));
    sol.expected_return = mu.dot(sol.weights);
    return sol.volatility - target_vol;
  };
  auto within = [&](double gap, double tol) { return std::abs(gap) <= tol * target_vol; };

  const Vector uniform = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const double gap_lo = evaluate(options.lambda_min, uniform);
  const Vector risky = sol.weights;
  if (within(gap_lo, options.vol_refine) || gap_lo < 0.0) {
    sol.converged = within(gap_lo, options.vol_tolerance);
    return sol;
  }
  const double gap_hi = evaluate(options.lambda_max, uniform);
  if (within(gap_hi, options.vol_refine) || gap_hi > 0.0) {
    sol.converged = within(gap_hi, options.vol_tolerance);
    return sol;
  }

  // Volatility decreases with risk aversion; bisect log(lambda).
  double lo = std::log(options.lambda_min);
  double hi = std::log(options.lambda_max);
  Vector warm = risky;
  double gap = gap_hi;
  for (int b = 0; b < options.max_bisections; ++b) {
    const double mid = 0.5 * (lo + hi);
    gap = evaluate(std::exp(mid), warm);
    sol.bisections = b + 1;
    warm = sol.weights;
    if (within(gap, options.vol_refine)) break;
    if (gap > 0.0) lo = mid; else hi = mid;
    if (hi - lo < 1e-13) break;
  }
  sol.converged = within(gap, options.vol_tolerance);
  return sol;
}

Vector ef_select(const FrontierSolution& frontier, Index n_total) {
  const Index n = frontier.weights.size();
  if (n != n_total || n < 1) throw DataError("ef_select: frontier does not span the universe");
  const double avg = 1.0 / static_cast<double>(n_total);
  std::vector<Index> chosen;
  for (Index i = 0; i < n; ++i) {
    if (frontier.weights(i) > avg) chosen.push_back(i);
  }
  if (chosen.empty()) return ew_weights(n_total);
  return ew_weights(chosen, n_total);
}

Vector rc_select(const AssetValues& predictions, Index universe) {
  const Index n = predictions.values.size();
  if (n < 2 || static_cast<Index>(predictions.assets.size()) != n) {
    throw DataError("rc_select: need at least 2 predicted assets");
  }
  if (!predictions.values.allFinite()) throw DataError("rc_select: non-finite prediction");
  const double avg = predictions.values.mean();
  std::vector<Index> chosen;
  for (Index i = 0; i < n; ++i) {
    if (predictions.values(i) > avg) chosen.push_back(predictions.assets[static_cast<std::size_t>(i)]);
  }
  if (chosen.empty()) return ew_weights(predictions.assets, universe);
  return ew_weights(chosen, universe);
}

Vector mix_weights(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) throw DataError("mix_weights: universe mismatch");
  return 0.5 * (a + b);
}

AdaptiveState adaptive_trigger(const PanelData& panel, DayRange window) {
  if (window.begin < 1 || window.end > panel.days() || window.length() < 3) {
    throw DataError("adaptive_trigger: window outside the panel");
  }
  std::vector<double> vols;
  std::vector<double> means;
  for (Index a = 0; a < panel.assets(); ++a) {
    const auto x = panel.excess().col(a).segment(window.begin, window.length());
    if (stats::is_constant(x)) continue;
    vols.push_back(stats::volatility(x));
    means.push_back(stats::mean(x));
  }
  if (vols.size() < 4) throw DataError("adaptive_trigger: fewer than 4 assets");
  const auto n = static_cast<Index>(vols.size());
  AdaptiveState state;
  state.trigger = stats::correlation(Eigen::Map<const Vector>(vols.data(), n),
                                     Eigen::Map<const Vector>(means.data(), n));
  state.flip = state.trigger < 0.0;
  return state;
}

Matrix sample_covariance(const Eigen::Ref<const Matrix>& returns) {
  if (returns.rows() < 2) throw DataError("sample_covariance: need at least 2 observations");
  const Matrix centred = returns.rowwise() - returns.colwise().mean();
  return (centred.transpose() * centred) / static_cast<double>(returns.rows() - 1);
}

}  // namespace corrfolio
