#include "corrfolio/io.hpp"
#include "corrfolio/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace corrfolio {

namespace {

std::vector<double> parse_list(const std::string& key, std::string_view value) {
  std::vector<double> out;
  for (const auto& cell : io::split(value, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(io::parse_number(cell, key));
    } catch (const DataError& e) {
      throw ConfigError(std::string("synth config: ") + e.what());
    }
  }
  return out;
}

double parse_scalar(const std::string& key, std::string_view value) {
  const auto v = parse_list(key, value);
  if (v.size() != 1) throw ConfigError("synth config: " + key + " expects one number");
  return v.front();
}

Index parse_count(const std::string& key, std::string_view value) {
  const double v = parse_scalar(key, value);
  if (v != std::floor(v)) throw ConfigError("synth config: " + key + " must be an integer");
  return static_cast<Index>(v);
}

double padded(const std::vector<double>& v, std::size_t k, double fallback, bool repeat_last) {
  if (k < v.size()) return v[k];
  if (repeat_last && !v.empty()) return v.back();
  return fallback;
}

/// Cross-sectional z-scores (population deviation); zero when flat.
Vector zscores(const Eigen::Ref<const Vector>& x) {
  const double mu = x.mean();
  const double sd = std::sqrt((x.array() - mu).square().mean());
  if (!(sd > 0.0)) return Vector::Zero(x.size());
  return ((x.array() - mu) / sd).matrix();
}

std::vector<Date> business_days(const Date& start, Index count) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(count));
  sys_days day{start};
  while (static_cast<Index>(out.size()) < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

}  // namespace

SynthConfig parse_synth_config(const std::string& text) {
  SynthConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = io::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ConfigError("synth config: expected key = value");
    const std::string key(io::trim(view.substr(0, eq)));
    const std::string_view value = io::trim(view.substr(eq + 1));
    if (key == "n_assets") c.n_assets = parse_count(key, value);
    else if (key == "n_days") c.n_days = parse_count(key, value);
    else if (key == "n_factors") c.n_factors = parse_count(key, value);
    else if (key == "loadings") c.loadings = parse_list(key, value);
    else if (key == "loading_dispersion") c.loading_dispersion = parse_scalar(key, value);
    else if (key == "factor_vol") c.factor_vol = parse_list(key, value);
    else if (key == "factor_drift") c.factor_drift = parse_list(key, value);
    else if (key == "idio_vol") c.idio_vol = parse_scalar(key, value);
    else if (key == "idio_dispersion") c.idio_dispersion = parse_scalar(key, value);
    else if (key == "persistence") c.persistence = parse_scalar(key, value);
    else if (key == "skew_mix") c.skew_mix = parse_scalar(key, value);
    else if (key == "skew_size") c.skew_size = parse_scalar(key, value);
    else if (key == "planted_coeffs") c.planted_coeffs = parse_list(key, value);
    else if (key == "noise_vol") c.noise_vol = parse_scalar(key, value);
    else if (key == "base_drift") c.base_drift = parse_scalar(key, value);
    else if (key == "regime_market_drift") c.regime_market_drift = parse_list(key, value);
    else if (key == "regime_sigma_coeff") c.regime_sigma_coeff = parse_list(key, value);
    else if (key == "year_length") c.year_length = parse_count(key, value);
    else if (key == "riskfree") c.riskfree = parse_scalar(key, value);
    else if (key == "start_date") c.start_date = std::string(value);
    else throw ConfigError("synth config: unknown key '" + key + "'");
  }
  return c;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  return parse_synth_config(io::read_text(path));
}

PanelData generate_synthetic_panel(const SynthConfig& c, std::uint64_t seed, SynthTruth* truth) {
  if (c.n_assets <= 0 || c.n_days <= 0) {
    throw ConfigError("synth config: n_assets and n_days must be positive");
  }
  if (c.n_assets < 2 || c.n_days < 2) {
    throw ConfigError("synth config: need at least 2 assets and 2 days");
  }
  if (c.n_factors < 1) throw ConfigError("synth config: n_factors must be >= 1");
  if (c.year_length < 1) throw ConfigError("synth config: year_length must be >= 1");
  if (c.persistence < 0.0 || c.persistence > 1.0) {
    throw ConfigError("synth config: persistence must lie in [0, 1]");
  }
  const auto nk = static_cast<std::size_t>(c.n_factors);
  const auto na = static_cast<std::size_t>(c.n_assets);
  const bool explicit_loadings = c.loadings.size() == na * nk && na * nk != nk;
  if (!explicit_loadings && c.loadings.size() > nk) {
    throw ConfigError("synth config: loadings must list n_factors or n_assets*n_factors values");
  }
  Date start;
  try {
    start = parse_date(c.start_date);
  } catch (const DataError& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }

  const Index n = c.n_assets;
  const Index t = c.n_days;
  const Index years = (t - 1 + c.year_length - 1) / c.year_length;

  std::seed_seq main_seq{seed, std::uint64_t{0x5eed}};
  std::mt19937_64 rng(main_seq);
  std::seed_seq aux_seq{seed, std::uint64_t{0xbe9c}};
  std::mt19937_64 aux(aux_seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Permanent and yearly asset parameters; year index y+1 stores year y so
  // that the year before the sample (y = -1) exists for the lagged signal.
  const double keep = std::sqrt(c.persistence);
  const double fresh = std::sqrt(1.0 - c.persistence);
  Matrix perm_load(n, c.n_factors);
  Vector perm_idio(n);
  for (Index a = 0; a < n; ++a) {
    for (Index k = 0; k < c.n_factors; ++k) perm_load(a, k) = normal(rng);
    perm_idio(a) = normal(rng);
  }
  std::vector<Matrix> load(static_cast<std::size_t>(years + 1), Matrix(n, c.n_factors));
  Matrix idio(years + 1, n);
  Matrix total_vol(years + 1, n);
  for (Index y = 0; y <= years; ++y) {
    auto& L = load[static_cast<std::size_t>(y)];
    for (Index a = 0; a < n; ++a) {
      double var = 0.0;
      for (Index k = 0; k < c.n_factors; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double mean = explicit_loadings
                                ? c.loadings[static_cast<std::size_t>(a) * nk + ku]
                                : padded(c.loadings, ku, 0.0, false);
        L(a, k) = mean + c.loading_dispersion * (keep * perm_load(a, k) + fresh * normal(rng));
        const double fv = padded(c.factor_vol, ku, 0.01, true);
        var += L(a, k) * L(a, k) * fv * fv;
      }
      idio(y, a) = c.idio_vol * std::exp(c.idio_dispersion * (keep * perm_idio(a) + fresh * normal(rng)));
      total_vol(y, a) = std::sqrt(var + idio(y, a) * idio(y, a));
    }
  }

  Matrix drift(years, n);
  const double c_sigma = padded(c.planted_coeffs, 0, 0.0, false);
  const double c_beta = padded(c.planted_coeffs, 1, 0.0, false);
  for (Index y = 0; y < years; ++y) {
    const Vector z_sigma_prev = zscores(total_vol.row(y).transpose());
    const Vector z_beta_prev = zscores(load[static_cast<std::size_t>(y)].col(0));
    const Vector z_sigma_now = zscores(total_vol.row(y + 1).transpose());
    const double regime = padded(c.regime_sigma_coeff, static_cast<std::size_t>(y), 0.0, false);
    for (Index a = 0; a < n; ++a) {
      drift(y, a) = c.base_drift + c_sigma * z_sigma_prev(a) + c_beta * z_beta_prev(a) +
                    regime * z_sigma_now(a) + c.noise_vol * normal(rng);
    }
  }

  Matrix factors(t, c.n_factors);
  factors.row(0).setZero();
  Matrix prices(t, n);
  prices.row(0).setConstant(100.0);
  for (Index d = 1; d < t; ++d) {
    const Index y = (d - 1) / c.year_length;
    for (Index k = 0; k < c.n_factors; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      double mu = padded(c.factor_drift, ku, 0.0, false);
      if (k == 0 && static_cast<std::size_t>(y) < c.regime_market_drift.size()) {
        mu = c.regime_market_drift[static_cast<std::size_t>(y)];
      }
      factors(d, k) = mu + padded(c.factor_vol, ku, 0.01, true) * normal(rng);
    }
    const auto& L = load[static_cast<std::size_t>(y + 1)];
    for (Index a = 0; a < n; ++a) {
      double r = drift(y, a) + L.row(a).dot(factors.row(d));
      r += idio(y + 1, a) * normal(rng);
      if (c.skew_mix > 0.0 && unit(rng) < c.skew_mix) r += c.skew_size;
      prices(d, a) = prices(d - 1, a) * (1.0 + std::max(r, -0.95));
    }
  }

  BenchmarkSet bench;
  auto compound = [&](auto&& daily) {
    Vector level(t);
    level(0) = 100.0;
    for (Index d = 1; d < t; ++d) level(d) = level(d - 1) * (1.0 + std::max(daily(d), -0.95));
    return level;
  };
  const std::array<const char*, 4> factor_names = {"MOMENTUM", "GROWTH", "VALUE", "OIL"};
  bench.levels["MARKET"] = compound([&](Index d) { return factors(d, 0); });
  Matrix extra(t, 6);
  for (Index d = 0; d < t; ++d) {
    for (Index j = 0; j < 6; ++j) extra(d, j) = normal(aux);
  }
  for (std::size_t j = 0; j < factor_names.size(); ++j) {
    const Index k = static_cast<Index>(j) + 1;
    if (k < c.n_factors) {
      bench.levels[factor_names[j]] = compound([&](Index d) { return factors(d, k); });
    } else {
      bench.levels[factor_names[j]] = compound(
          [&](Index d) { return 0.5 * factors(d, 0) + 0.008 * extra(d, static_cast<Index>(j)); });
    }
  }
  bench.levels["VIX"] =
      compound([&](Index d) { return std::clamp(-3.0 * factors(d, 0) + 0.03 * extra(d, 4), -0.5, 1.0); });
  Vector y10(t);
  y10(0) = 0.04;
  for (Index d = 1; d < t; ++d) y10(d) = y10(d - 1) + 0.05 * factors(d, 0) * 0.01 + 0.0004 * extra(d, 5);
  bench.levels["Y10"] = y10;

  // Fundamentals reported on the first trading day of each month.
  TradingCalendar calendar(business_days(start, t));
  FundamentalPanel fund;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& m : fund.values) m.setConstant(t, n, nan);
  Vector shares(n), mtb(n), leverage(n), dy(n), multiple(n);
  for (Index a = 0; a < n; ++a) {
    shares(a) = 1e7 * std::exp(3.0 * unit(aux));
    mtb(a) = std::exp(0.5 * normal(aux));
    leverage(a) = 0.1 + 0.9 * unit(aux);
    dy(a) = 0.05 * unit(aux);
    multiple(a) = 6.0 + 9.0 * unit(aux);
  }
  for (Index d : calendar.month_starts()) {
    for (Index a = 0; a < n; ++a) {
      mtb(a) *= std::exp(0.05 * normal(aux));
      dy(a) *= std::exp(0.1 * normal(aux));
      multiple(a) *= std::exp(0.05 * normal(aux));
      const double cap = prices(d, a) * shares(a);
      const double ev = cap * (1.0 + leverage(a));
      fund.values[0](d, a) = cap;
      fund.values[1](d, a) = mtb(a);
      fund.values[2](d, a) = ev;
      fund.values[3](d, a) = dy(a);
      fund.values[4](d, a) = ev / multiple(a);
    }
  }
  for (std::size_t f = 0; f < kFundamentalCount; ++f) fund.age[f] = forward_fill(fund.values[f]);

  std::vector<std::string> ids;
  ids.reserve(na);
  const int width = static_cast<int>(std::to_string(n - 1).size());
  for (Index a = 0; a < n; ++a) {
    std::string num = std::to_string(a);
    ids.push_back("S" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
  }

  if (truth != nullptr) {
    truth->drift = drift;
    truth->total_vol = total_vol.bottomRows(years);
    truth->market_beta.resize(years, n);
    for (Index y = 0; y < years; ++y) {
      truth->market_beta.row(y) = load[static_cast<std::size_t>(y + 1)].col(0).transpose();
    }
  }

  return PanelData(std::move(calendar), std::move(ids), std::move(prices), std::move(fund),
                   std::move(bench), Vector::Constant(t, c.riskfree));
}

}  // namespace corrfolio
