#include "corrfolio/allocation.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace corrfolio;
using corrfolio::testing::normal_matrix;
using corrfolio::testing::normal_vector;
using corrfolio::testing::panel_from_returns;

namespace {

void check_simplex(const Vector& w, double tol = 1e-12) {
  CHECK((w.array() >= 0.0).all());
  CHECK(std::abs(w.sum() - 1.0) <= tol);
}

void check_equal_support(const Vector& w) {
  double level = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) == 0.0) continue;
    if (level == 0.0) level = w(i);
    CHECK(w(i) == level);
  }
}

Vector random_simplex(std::mt19937_64& rng, Index n) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = e(rng);
  return v / v.sum();
}

struct Problem {
  Vector mu;
  Matrix cov;
};

Problem random_problem(std::mt19937_64& rng, Index n) {
  const Matrix r = normal_matrix(rng, 300, n, 0.01) + normal_matrix(rng, 300, 1, 0.01).replicate(1, n);
  Problem p;
  p.cov = sample_covariance(r);
  p.mu = normal_vector(rng, n, 0.001);
  return p;
}

}  // namespace

TEST_CASE("equal weights") {
  const std::vector<Index> four{0, 1, 2, 3};
  CHECK(ew_weights(four, 4) == Vector::Constant(4, 0.25));
  const std::vector<Index> one{2};
  const Vector w1 = ew_weights(one, 5);
  CHECK(w1(2) == 1.0);
  CHECK(w1.sum() == 1.0);
  const Vector w100 = ew_weights(100);
  CHECK(w100(37) == 0.01);
  check_simplex(w100);
  CHECK_THROWS_AS(ew_weights(std::vector<Index>{}, 3), DataError);
  CHECK_THROWS_AS(ew_weights(std::vector<Index>{3}, 3), DataError);
  CHECK_THROWS_AS(ew_weights(0), DataError);
  CHECK(strategy_name(Strategy::RCStar) == "RC*");
  CHECK(parse_strategy("MIX") == Strategy::MIX);
  CHECK_THROWS_AS(parse_strategy("XX"), ConfigError);
}

TEST_CASE("simplex projection") {
  std::mt19937_64 rng(60);
  for (int k = 0; k < 200; ++k) {
    const Vector y = normal_vector(rng, 7);
    const Vector w = project_simplex(y);
    check_simplex(w, 1e-12);
    // Optimality: (y - w) is constant on the support and no larger off it.
    double tau = 0.0;
    for (Index i = 0; i < 7; ++i) if (w(i) > 0) tau = y(i) - w(i);
    for (Index i = 0; i < 7; ++i) {
      if (w(i) > 0) CHECK(std::abs(y(i) - w(i) - tau) <= 1e-12);
      else CHECK(y(i) <= tau + 1e-12);
    }
  }
  const Vector inside = random_simplex(rng, 5);
  CHECK((project_simplex(inside) - inside).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("two-asset frontier at the equal-weight volatility") {
  const double sigma = 0.1;
  Vector mu(2);
  mu << 0.02, 0.01;
  const Matrix cov = sigma * sigma * Matrix::Identity(2, 2);
  const FrontierSolution s = solve_frontier(mu, cov, sigma / std::sqrt(2.0));
  CHECK(s.converged);
  CHECK(std::abs(s.weights(0) - 0.5) <= 1e-3);
  CHECK(std::abs(s.weights(1) - 0.5) <= 1e-3);
  check_simplex(s.weights);
}

TEST_CASE("identical assets keep the starting point") {
  const Index n = 6;
  const Vector mu = Vector::Constant(n, 0.001);
  const Matrix cov = 0.0001 * Matrix::Ones(n, n);
  const FrontierSolution s = solve_frontier(mu, cov, 0.01);
  CHECK((s.weights.array() - 1.0 / n).abs().maxCoeff() <= 1e-12);
  CHECK(ef_select(s, n) == ew_weights(n));
}

TEST_CASE("frontier beats a random simplex search") {
  std::mt19937_64 rng(61);
  const Index n = 5;
  const Problem p = random_problem(rng, n);
  const Vector ew = ew_weights(n);
  const double target = std::sqrt(ew.dot(p.cov * ew));
  const FrontierSolution s = solve_frontier(p.mu, p.cov, target);
  REQUIRE(s.converged);
  check_simplex(s.weights);
  CHECK(s.volatility <= target * (1.0 + 1e-3));
  CHECK(s.expected_return >= p.mu.dot(ew) - 1e-12);

  Matrix loaded = p.cov;
  loaded.diagonal().array() += 1e-8 * p.cov.trace() / n;
  double best = -1e300;
  for (int k = 0; k < 1000000; ++k) {
    const Vector w = random_simplex(rng, n);
    if (std::sqrt(w.dot(loaded * w)) <= target) best = std::max(best, p.mu.dot(w));
  }
  CHECK(s.expected_return >= best - 1e-4);
}

TEST_CASE("frontier return is nondecreasing in the target") {
  std::mt19937_64 rng(62);
  const Problem p = random_problem(rng, 8);
  const Vector ew = ew_weights(8);
  const double base = std::sqrt(ew.dot(p.cov * ew));
  double previous = -1e300;
  for (double k : {0.9, 0.95, 1.0, 1.05, 1.1}) {
    const FrontierSolution s = solve_frontier(p.mu, p.cov, k * base);
    check_simplex(s.weights);
    CHECK(s.expected_return >= previous - 1e-12);
    previous = s.expected_return;
  }
}

TEST_CASE("unattainable targets return the boundary") {
  std::mt19937_64 rng(63);
  const Problem p = random_problem(rng, 4);
  const double max_vol = std::sqrt(p.cov.diagonal().maxCoeff());
  const FrontierSolution high = solve_frontier(p.mu, p.cov, 10.0 * max_vol);
  CHECK_FALSE(high.converged);
  check_simplex(high.weights);
  const FrontierSolution low = solve_frontier(p.mu, p.cov, 1e-9);
  CHECK_FALSE(low.converged);
  CHECK_THROWS_AS(solve_frontier(p.mu, p.cov, 0.0), DataError);
  CHECK_THROWS_AS(solve_frontier(p.mu.head(3), p.cov, 0.01), DataError);
  Vector bad = p.mu;
  bad(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_frontier(bad, p.cov, 0.01), DataError);
}

TEST_CASE("frontier selection rule") {
  FrontierSolution s;
  s.weights = Vector(4);
  s.weights << 0.4, 0.3, 0.2, 0.1;
  Vector expected(4);
  expected << 0.5, 0.5, 0.0, 0.0;
  CHECK(ef_select(s, 4) == expected);
  s.weights = Vector::Constant(4, 0.25);
  CHECK(ef_select(s, 4) == ew_weights(4));
  CHECK_THROWS_AS(ef_select(s, 5), DataError);

  std::mt19937_64 rng(64);
  for (int k = 0; k < 500; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 30);
    s.weights = random_simplex(rng, n);
    const Vector w = ef_select(s, n);
    std::vector<Index> chosen;
    for (Index i = 0; i < n; ++i) if (s.weights(i) > 1.0 / static_cast<double>(n)) chosen.push_back(i);
    CHECK(!chosen.empty());
    CHECK(w == ew_weights(chosen, n));
    check_simplex(w);
    check_equal_support(w);
  }
}

TEST_CASE("prediction selection rule") {
  AssetValues p;
  p.assets = {0, 1, 2, 3};
  p.values = Vector(4);
  p.values << 3, 1, 1, 1;
  Vector expected = Vector::Zero(4);
  expected(0) = 1.0;
  CHECK(rc_select(p, 4) == expected);
  p.values.setConstant(2.0);
  CHECK(rc_select(p, 4) == ew_weights(4));
  p.values(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rc_select(p, 4), DataError);

  // Retained assets map back onto the panel universe.
  AssetValues q{{1, 4, 6}, Vector(3)};
  q.values << 0.1, 0.5, 0.4;
  const Vector w = rc_select(q, 8);
  CHECK(w(4) == 0.5);
  CHECK(w(6) == 0.5);
  CHECK(w.sum() == 1.0);

  std::mt19937_64 rng(65);
  for (int k = 0; k < 500; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 40);
    AssetValues r;
    for (Index i = 0; i < n; ++i) r.assets.push_back(i);
    r.values = normal_vector(rng, n);
    const Vector sel = rc_select(r, n);
    std::vector<Index> chosen;
    const double mean = r.values.mean();
    for (Index i = 0; i < n; ++i) if (r.values(i) > mean) chosen.push_back(i);
    CHECK(sel == ew_weights(chosen, n));
    check_simplex(sel);
    check_equal_support(sel);
    AssetValues scaled = r;
    scaled.values = 4.0 * r.values;
    CHECK(rc_select(scaled, n) == sel);
  }
}

TEST_CASE("mix of two weight vectors") {
  Vector a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(mix_weights(a, b) == Vector::Constant(2, 0.5));
  CHECK(mix_weights(a, a) == a);
  CHECK_THROWS_AS(mix_weights(a, Vector::Ones(3)), DataError);
  std::mt19937_64 rng(66);
  for (int k = 0; k < 1000; ++k) {
    const Index n = 1 + static_cast<Index>(rng() % 50);
    const Vector m = mix_weights(random_simplex(rng, n), random_simplex(rng, n));
    CHECK((m.array() >= 0.0).all());
    CHECK(std::abs(m.sum() - 1.0) <= 1e-15);
  }
}

TEST_CASE("adaptive trigger") {
  std::mt19937_64 rng(67);
  const Index n = 40;
  const Index len = 252;
  std::uniform_real_distribution<double> vol(0.005, 0.03);
  auto panel_with = [&](double slope) {
    Matrix r(len, n);
    for (Index a = 0; a < n; ++a) {
      const double s = vol(rng);
      r.col(a) = normal_vector(rng, len, s).array() + slope * s;
    }
    return panel_from_returns(r);
  };
  const PanelData bull = panel_with(0.2);
  const AdaptiveState up = adaptive_trigger(bull, DayRange{1, len + 1});
  CHECK_FALSE(up.flip);
  CHECK(up.trigger > 0.0);

  const PanelData crash = panel_with(-0.2);
  const AdaptiveState down = adaptive_trigger(crash, DayRange{1, len + 1});
  CHECK(down.flip);
  // Direct recomputation of the trigger.
  Vector vols(n), means(n);
  for (Index a = 0; a < n; ++a) {
    const auto x = crash.excess().col(a).segment(1, len);
    vols(a) = stats::volatility(x);
    means(a) = stats::mean(x);
  }
  CHECK(down.trigger == doctest::Approx(stats::correlation(vols, means)).epsilon(1e-12));

  int flips = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 g(700 + static_cast<std::uint64_t>(seed));
    const PanelData none = panel_from_returns(normal_matrix(g, 120, 20, 0.01));
    const AdaptiveState s = adaptive_trigger(none, DayRange{1, 121});
    CHECK(s.flip == (s.trigger < 0.0));
    flips += s.flip ? 1 : 0;
  }
  CHECK(flips >= 30);
  CHECK(flips <= 70);

  const PanelData three = panel_from_returns(normal_matrix(rng, 100, 3, 0.01));
  CHECK_THROWS_AS(adaptive_trigger(three, DayRange{1, 101}), DataError);
}

TEST_CASE("sample covariance") {
  std::mt19937_64 rng(68);
  const Matrix r = normal_matrix(rng, 50, 3);
  const Matrix c = sample_covariance(r);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const double expected = stats::correlation(r.col(i), r.col(j)) * stats::volatility(r.col(i)) *
                              stats::volatility(r.col(j));
      CHECK(std::abs(c(i, j) - expected) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(sample_covariance(r.topRows(1)), DataError);
}
