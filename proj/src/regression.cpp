#include "corrfolio/regression.hpp"

#include "corrfolio/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace corrfolio {

RegressionModel fit(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& target,
                    const std::vector<std::string>& field_names, const FitOptions& options) {
  const Index n = design.rows();
  const Index p_all = design.cols();
  if (target.size() != n) throw DataError("fit: target length does not match design rows");
  if (static_cast<Index>(field_names.size()) != p_all) {
    throw DataError("fit: field names do not match design columns");
  }
  if (n < p_all + 2) {
    throw DataError("fit: " + std::to_string(n) + " assets for " + std::to_string(p_all) +
                    " fields; need fields + 2");
  }
  if (!design.allFinite() || !target.allFinite()) throw DataError("fit: non-finite input");

  RegressionModel model;
  model.n_assets = n;
  std::vector<Index> keep;
  for (Index j = 0; j < p_all; ++j) {
    if (stats::is_constant(design.col(j))) {
      model.dropped_fields.push_back(field_names[static_cast<std::size_t>(j)]);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) throw NumericalError("fit: every field column is degenerate");

  const Index p = static_cast<Index>(keep.size());
  model.field_means.resize(p);
  model.field_scales.resize(p);
  Matrix z(n, p);
  for (Index j = 0; j < p; ++j) {
    const auto col = design.col(keep[static_cast<std::size_t>(j)]);
    model.fields.push_back(field_names[static_cast<std::size_t>(keep[static_cast<std::size_t>(j)])]);
    model.field_means(j) = stats::mean(col);
    model.field_scales(j) = stats::volatility(col);
    z.col(j) = (col.array() - model.field_means(j)) / model.field_scales(j);
  }

  // With centred regressors the normal equations decouple: the intercept is
  // the target mean and the slopes solve (Z'Z + delta I) b = Z'y.
  model.intercept = stats::mean(target);
  if (stats::is_constant(target)) {
    model.coefficients = Vector::Zero(p);
    model.r_squared = 0.0;
    model.fitted = Vector::Constant(n, model.intercept);
    return model;
  }
  Matrix gram = z.transpose() * z;
  const double delta = options.relative_ridge * gram.trace() / static_cast<double>(p);
  gram.diagonal().array() += delta;
  const Vector rhs = z.transpose() * (target.array() - model.intercept).matrix();
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("fit: normal equations not solvable");
  model.coefficients = ldlt.solve(rhs);
  if (!model.coefficients.allFinite()) throw NumericalError("fit: non-finite coefficients");

  model.fitted = (z * model.coefficients).array() + model.intercept;
  const double sst = (target.array() - model.intercept).square().sum();
  const double ssr = (target - model.fitted).squaredNorm();
  model.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
  return model;
}

RegressionModel fit(const FieldMatrix& fields_lagged, const Eigen::Ref<const Vector>& realized_means,
                    const FitOptions& options) {
  std::vector<Index> rows;
  for (Index i = 0; i < fields_lagged.rows(); ++i) {
    const Index a = fields_lagged.assets[static_cast<std::size_t>(i)];
    if (a < realized_means.size() && std::isfinite(realized_means(a))) rows.push_back(i);
  }
  Matrix design(static_cast<Index>(rows.size()), fields_lagged.values.cols());
  Vector target(design.rows());
  for (Index r = 0; r < design.rows(); ++r) {
    const Index i = rows[static_cast<std::size_t>(r)];
    design.row(r) = fields_lagged.values.row(i);
    target(r) = realized_means(fields_lagged.assets[static_cast<std::size_t>(i)]);
  }
  return fit(design, target, fields_lagged.fields, options);
}

Vector predict(const RegressionModel& model, const Eigen::Ref<const Matrix>& design,
               const std::vector<std::string>& field_names) {
  Vector out = Vector::Constant(design.rows(), model.intercept);
  for (std::size_t j = 0; j < model.fields.size(); ++j) {
    auto it = std::find(field_names.begin(), field_names.end(), model.fields[j]);
    if (it == field_names.end()) throw DataError("predict: missing field column " + model.fields[j]);
    const Index col = static_cast<Index>(it - field_names.begin());
    const auto jj = static_cast<Index>(j);
    out.array() += model.coefficients(jj) *
                   ((design.col(col).array() - model.field_means(jj)) / model.field_scales(jj));
  }
  return out;
}

AssetValues predict(const RegressionModel& model, const FieldMatrix& fields_current) {
  return {fields_current.assets, predict(model, fields_current.values, fields_current.fields)};
}

RegressionModel flip_coefficients(RegressionModel model) {
  model.coefficients = -model.coefficients;
  model.fitted = (2.0 * model.intercept - model.fitted.array()).matrix();
  return model;
}

std::string model_to_json(const RegressionModel& model) {
  nlohmann::ordered_json j;
  j["fields"] = model.fields;
  j["coefficients"] = std::vector<double>(model.coefficients.begin(), model.coefficients.end());
  j["intercept"] = model.intercept;
  j["field_means"] = std::vector<double>(model.field_means.begin(), model.field_means.end());
  j["field_scales"] = std::vector<double>(model.field_scales.begin(), model.field_scales.end());
  j["r_squared"] = model.r_squared;
  j["n_assets"] = model.n_assets;
  j["dropped_fields"] = model.dropped_fields;
  return j.dump(2);
}

}  // namespace corrfolio
