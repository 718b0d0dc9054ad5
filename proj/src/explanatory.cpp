#include "corrfolio/explanatory.hpp"

#include "corrfolio/io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace corrfolio {

namespace {

bool is_driver(std::string_view name) {
  return std::find_if(kDriverNames.begin(), kDriverNames.end(),
                      [&](const char* d) { return name == d; }) != kDriverNames.end();
}

void check_window(const PanelData& panel, DayRange window, const char* what) {
  if (window.begin < 1 || window.end > panel.days() || window.empty()) {
    throw DataError(std::string(what) + ": window [" + std::to_string(window.begin) + ", " +
                    std::to_string(window.end) + ") outside the panel");
  }
  if (window.length() < kMinFieldWindow) {
    throw DataError(std::string(what) + ": window of " + std::to_string(window.length()) +
                    " days is shorter than " + std::to_string(kMinFieldWindow));
  }
}

}  // namespace

std::string FieldId::name() const {
  switch (kind) {
    case Kind::Sharpe: return "SHARPE";
    case Kind::Mean: return "MEAN";
    case Kind::Skew: return "SKEW";
    case Kind::SkewStar: return "SKEW_STAR";
    case Kind::RhoPairs: return "RHO_PAIRS";
    case Kind::Sigma: return "SIGMA";
    case Kind::Rho: return "RHO_" + driver;
    case Kind::Beta: return "BETA_" + driver;
  }
  return "?";
}

FieldId parse_field_id(std::string_view token) {
  token = io::trim(token);
  using K = FieldId::Kind;
  if (token == "SHARPE") return {K::Sharpe, ""};
  if (token == "MEAN") return {K::Mean, ""};
  if (token == "SKEW") return {K::Skew, ""};
  if (token == "SKEW_STAR") return {K::SkewStar, ""};
  if (token == "RHO_PAIRS") return {K::RhoPairs, ""};
  if (token == "SIGMA") return {K::Sigma, ""};
  if (token.starts_with("RHO_") && is_driver(token.substr(4))) {
    return {K::Rho, std::string(token.substr(4))};
  }
  if (token.starts_with("BETA_") && is_driver(token.substr(5))) {
    return {K::Beta, std::string(token.substr(5))};
  }
  throw ConfigError("unknown field '" + std::string(token) + "'");
}

FieldSpec::FieldSpec(std::vector<FieldId> fields) : fields_(std::move(fields)) {
  if (fields_.empty()) throw ConfigError("field spec is empty");
  std::set<std::string> seen;
  for (const auto& f : fields_) {
    if (!seen.insert(f.name()).second) throw ConfigError("duplicate field " + f.name());
  }
}

FieldSpec FieldSpec::parse(std::string_view text) {
  std::vector<FieldId> out;
  for (const auto& token : io::split(text, ',')) {
    if (!token.empty()) out.push_back(parse_field_id(token));
  }
  return FieldSpec(std::move(out));
}

FieldSpec FieldSpec::ten_factor() {
  return parse(
      "SKEW_STAR,SIGMA,BETA_MARKET,BETA_MOMENTUM,BETA_GROWTH,BETA_Y10,BETA_VIX,"
      "BETA_DIVYIELD,BETA_EV,BETA_MTB");
}

FieldSpec FieldSpec::full_study() {
  using K = FieldId::Kind;
  std::vector<FieldId> out = {{K::Sharpe, ""}, {K::Mean, ""},     {K::Skew, ""},
                              {K::SkewStar, ""}, {K::RhoPairs, ""}, {K::Sigma, ""}};
  for (const char* d : kDriverNames) out.push_back({K::Rho, d});
  for (const char* d : kDriverNames) out.push_back({K::Beta, d});
  return FieldSpec(std::move(out));
}

std::vector<std::string> FieldSpec::names() const {
  std::vector<std::string> out;
  for (const auto& f : fields_) out.push_back(f.name());
  return out;
}

const Vector& DriverSet::at(const std::string& name) const {
  auto it = series.find(name);
  if (it == series.end()) throw DataError("benchmark " + name + " missing");
  return it->second;
}

DriverSet build_drivers(const PanelData& panel, std::span<const Index> factor_schedule) {
  DriverSet out;
  for (const auto& [name, level] : panel.benchmarks().levels) {
    out.series.emplace(name, panel.benchmark_returns(name));
  }
  if (panel.fundamentals().empty()) {
    out.diagnostics.push_back("no fundamentals: factor indexes unavailable");
  } else {
    for (FactorField f : kFactorFields) {
      try {
        out.series.emplace(factor_name(f),
                           build_factor_index(panel, f, factor_schedule).returns);
      } catch (const DataError& e) {
        out.diagnostics.push_back(e.what());
      }
    }
  }
  out.series.emplace("PAIRS", panel.excess().rowwise().mean());
  return out;
}

DriverSet build_drivers(const PanelData& panel) {
  const auto schedule = panel.calendar().month_starts();
  return build_drivers(panel, schedule);
}

Index FieldMatrix::column(const std::string& field) const {
  auto it = std::find(fields.begin(), fields.end(), field);
  return it == fields.end() ? -1 : static_cast<Index>(it - fields.begin());
}

FieldMatrix compute_fields(const PanelData& panel, const DriverSet& drivers, DayRange window,
                           const FieldSpec& spec) {
  check_window(panel, window, "compute_fields");
  if (spec.size() == 0) throw ConfigError("compute_fields: empty field spec");
  using K = FieldId::Kind;
  const Index len = window.length();

  // Driver segments per field (empty for own-series fields).
  std::vector<Vector> driver_seg(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const FieldId& f = spec.fields()[j];
    std::string name;
    if (f.kind == K::Rho || f.kind == K::Beta) name = f.driver;
    if (f.kind == K::RhoPairs) name = "PAIRS";
    if (name.empty()) continue;
    const Vector seg = drivers.at(name).segment(window.begin, len);
    if (!seg.allFinite()) {
      throw DataError("benchmark " + name + " undefined on part of the window");
    }
    if (stats::is_constant(seg)) throw DataError("benchmark " + name + " constant on the window");
    driver_seg[j] = seg;
  }

  FieldMatrix out;
  out.window = window;
  out.fields = spec.names();
  std::vector<double> buffer;
  std::vector<double> row(spec.size());
  for (Index a = 0; a < panel.assets(); ++a) {
    const auto x = panel.excess().col(a).segment(window.begin, len);
    const std::string& id = panel.asset_ids()[static_cast<std::size_t>(a)];
    std::string failed;
    for (std::size_t j = 0; j < spec.size() && failed.empty(); ++j) {
      const FieldId& f = spec.fields()[j];
      try {
        double v = 0.0;
        switch (f.kind) {
          case K::Mean: v = stats::mean(x); break;
          case K::Sigma:
            if (stats::is_constant(x)) throw NumericalError("zero volatility");
            v = stats::volatility(x);
            break;
          case K::Sharpe: v = stats::sharpe(x); break;
          case K::Skew: v = stats::skewness(x); break;
          case K::SkewStar: v = stats::revised_skewness(x); break;
          case K::Rho: v = stats::correlation(x, driver_seg[j]); break;
          case K::Beta:
          case K::RhoPairs: v = stats::beta(x, driver_seg[j]); break;
        }
        if (!std::isfinite(v)) throw NumericalError("non-finite value");
        row[j] = v;
      } catch (const NumericalError& e) {
        failed = f.name() + " undefined (" + e.what() + ")";
      }
    }
    if (!failed.empty()) {
      out.diagnostics.push_back("dropped " + id + ": " + failed);
      continue;
    }
    out.assets.push_back(a);
    buffer.insert(buffer.end(), row.begin(), row.end());
  }
  const auto rows = static_cast<Index>(out.assets.size());
  const auto cols = static_cast<Index>(spec.size());
  out.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      buffer.data(), rows, cols);
  return out;
}

FieldMatrix compute_fields(const PanelData& panel, DayRange window, const FieldSpec& spec) {
  return compute_fields(panel, build_drivers(panel), window, spec);
}

Vector window_means(const PanelData& panel, DayRange window) {
  if (window.begin < 1 || window.end > panel.days() || window.empty()) {
    throw DataError("window_means: window outside the panel");
  }
  return panel.excess().middleRows(window.begin, window.length()).colwise().mean().transpose();
}

stats::CorrelationEstimate cross_sectional_estimate(double rho, Index n) {
  if (std::abs(rho) >= 1.0) return {rho, rho, rho, n};
  return stats::fisher_ci(rho, n);
}

CorrelationReport correlation_study(const PanelData& panel, const DriverSet& drivers,
                                    DayRange window_a, DayRange window_b, const FieldSpec& spec) {
  if (window_b.begin != window_a.end) {
    throw DataError("correlation_study: lagged window must start where the first one ends");
  }
  check_window(panel, window_b, "correlation_study");
  const FieldMatrix fields = compute_fields(panel, drivers, window_a, spec);

  CorrelationReport report;
  report.window_a = window_a;
  report.window_b = window_b;
  report.diagnostics = fields.diagnostics;
  report.n_assets = fields.rows();
  if (report.n_assets < 4) {
    throw DataError("correlation_study: " + std::to_string(report.n_assets) +
                    " assets retained, need at least 4");
  }

  const Vector all_a = window_means(panel, window_a);
  const Vector all_b = window_means(panel, window_b);
  Vector means_a(report.n_assets), means_b(report.n_assets);
  for (Index i = 0; i < report.n_assets; ++i) {
    means_a(i) = all_a(fields.assets[static_cast<std::size_t>(i)]);
    means_b(i) = all_b(fields.assets[static_cast<std::size_t>(i)]);
  }

  for (Index j = 0; j < fields.values.cols(); ++j) {
    const auto col = fields.values.col(j);
    const std::string& name = fields.fields[static_cast<std::size_t>(j)];
    if (stats::is_constant(col)) {
      report.diagnostics.push_back("dropped field " + name + ": constant across assets");
      continue;
    }
    FieldCorrelation fc;
    fc.field = name;
    fc.contemporary = cross_sectional_estimate(stats::correlation(col, means_a), report.n_assets);
    fc.lagged = cross_sectional_estimate(stats::correlation(col, means_b), report.n_assets);
    report.rows.push_back(fc);
  }
  return report;
}

CorrelationReport correlation_study(const PanelData& panel, DayRange window_a, DayRange window_b,
                                    const FieldSpec& spec) {
  return correlation_study(panel, build_drivers(panel), window_a, window_b, spec);
}

}  // namespace corrfolio
