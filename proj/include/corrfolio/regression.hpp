#pragma once

// Cross-sectional multi-regression of asset mean returns on lagged
// explanatory fields.

#include "corrfolio/explanatory.hpp"

#include <string>
#include <vector>

namespace corrfolio {

/// Linear model on cross-sectionally standardized fields.  Coefficients are
/// per unit z-score; the intercept is the mean target.
struct RegressionModel {
  std::vector<std::string> fields;  // retained fields, in coefficient order
  Vector coefficients;
  double intercept = 0.0;
  Vector field_means;
  Vector field_scales;
  double r_squared = 0.0;
  Vector fitted;  // in-sample predictions, one per fitted row
  Index n_assets = 0;
  std::vector<std::string> dropped_fields;
};

/// Per-asset values keyed by panel asset index.
struct AssetValues {
  std::vector<Index> assets;
  Vector values;
};

struct FitOptions {
  /// Ridge on the slope block: delta = relative_ridge * trace(Z'Z) / p.
  double relative_ridge = 1e-10;
};

/// Fits `target` (one entry per design row) on the columns of `design`.
/// Zero-variance columns are dropped; the rest are z-scored with their
/// sample deviation.
RegressionModel fit(const Eigen::Ref<const Matrix>& design, const Eigen::Ref<const Vector>& target,
                    const std::vector<std::string>& field_names, const FitOptions& options = {});

/// Fits realized mean returns (indexed by panel asset) on a field matrix.
/// Rows whose realized value is not finite are skipped.
RegressionModel fit(const FieldMatrix& fields_lagged, const Eigen::Ref<const Vector>& realized_means,
                    const FitOptions& options = {});

/// Predictions standardized with the model's stored parameters.
Vector predict(const RegressionModel& model, const Eigen::Ref<const Matrix>& design,
               const std::vector<std::string>& field_names);
AssetValues predict(const RegressionModel& model, const FieldMatrix& fields_current);

/// Negates every field coefficient; the intercept is kept.
RegressionModel flip_coefficients(RegressionModel model);

/// JSON document with fields, coefficients, standardization and diagnostics.
std::string model_to_json(const RegressionModel& model);

}  // namespace corrfolio
