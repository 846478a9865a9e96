#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vista/video.hpp"

namespace vista::transform {

/// (y^lambda - 1) / lambda, or log y at lambda = 0. Requires y > 0.
double boxcox(double y, double lambda);

/// Inverse of boxcox on its image; callers handle the domain boundary.
double inverse_boxcox(double value, double lambda);

struct TransformParams {
  double boxcox_lambda = 0.5;
  /// Added before the power transform and removed after inversion.
  double offset = 1e-3;
  double mean = 0.0;
  double std = 1.0;
  /// Size of the pooled population the moments were computed on.
  std::size_t fitted_count = 0;
  bool includes_auxiliary = false;
};

struct TransformedData {
  MaskedVideo video;
  std::optional<AuxiliaryVideo> auxiliary;
  TransformParams params;
};

/// Box-Cox on every observed pixel (and every auxiliary pixel), then one
/// pooled standardization shared by both videos.
TransformedData fit_transform(const MaskedVideo& video,
                              const AuxiliaryVideo* auxiliary, double lambda,
                              double offset = 1e-3);

/// Applies already-fitted parameters to another matrix (all entries).
Matrix apply(const Matrix& frame, const TransformParams& params);

struct InvertResult {
  std::vector<Matrix> frames;
  /// Entries whose de-standardized value fell outside the invertible domain.
  std::size_t clamped = 0;
};

/// De-standardize, invert Box-Cox, remove the offset, clamp at zero.
InvertResult invert(std::span<const Matrix> frames,
                    const TransformParams& params);

/// Box-Cox profile log-likelihood of the observed pixels at `lambda`:
/// -N/2 log(var) + (lambda - 1) sum log y.
double boxcox_log_likelihood(const MaskedVideo& video, double lambda,
                             double offset = 1e-3);

struct LambdaScan {
  std::vector<double> lambdas;
  std::vector<double> log_likelihood;
  double best = 0.0;
};

/// Coarse grid search of the normality score; never applied implicitly.
LambdaScan scan_boxcox_lambda(const MaskedVideo& video,
                              std::span<const double> grid,
                              double offset = 1e-3);

}  // namespace vista::transform
