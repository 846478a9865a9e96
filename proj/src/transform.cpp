#include "vista/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vista::transform {

namespace {

std::string pixel_name(std::size_t t, Eigen::Index cell, Eigen::Index rows,
                       const char* what) {
  return std::string(what) + " pixel (t=" + std::to_string(t) +
         ", i=" + std::to_string(cell % rows) +
         ", j=" + std::to_string(cell / rows) + ")";
}

double checked_boxcox(double raw, const TransformParams& p, std::size_t t,
                      Eigen::Index cell, Eigen::Index rows, const char* what) {
  const double y = raw + p.offset;
  if (!(y > 0.0)) {
    throw std::domain_error(pixel_name(t, cell, rows, what) + " is " +
                            std::to_string(raw) +
                            ", not positive after the offset");
  }
  return boxcox(y, p.boxcox_lambda);
}

}  // namespace

double boxcox(double y, double lambda) {
  if (!(y > 0.0)) {
    throw std::domain_error("Box-Cox needs y > 0, got " + std::to_string(y));
  }
  if (lambda == 0.0) return std::log(y);
  return std::expm1(lambda * std::log(y)) / lambda;
}

double inverse_boxcox(double value, double lambda) {
  if (lambda == 0.0) return std::exp(value);
  return std::exp(std::log1p(lambda * value) / lambda);
}

TransformedData fit_transform(const MaskedVideo& video,
                              const AuxiliaryVideo* auxiliary, double lambda,
                              double offset) {
  if (auxiliary != nullptr && !(auxiliary->dims() == video.dims())) {
    throw DimensionError("auxiliary and masked video shapes differ");
  }
  TransformParams params;
  params.boxcox_lambda = lambda;
  params.offset = offset;
  params.includes_auxiliary = auxiliary != nullptr;

  std::vector<Matrix> frames;
  std::vector<Matrix> aux_frames;
  frames.reserve(video.num_frames());
  // Two-pass moments over the pooled population.
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    const Matrix& raw = video.frame(t);
    const Mask& mask = video.mask(t);
    Matrix out = Matrix::Zero(raw.rows(), raw.cols());
    for (Eigen::Index c = 0; c < raw.size(); ++c) {
      if (!mask(c)) continue;
      out(c) = checked_boxcox(raw(c), params, t, c, raw.rows(), "observed");
      sum += out(c);
      ++count;
    }
    frames.push_back(std::move(out));
  }
  if (auxiliary != nullptr) {
    for (std::size_t t = 0; t < auxiliary->num_frames(); ++t) {
      const Matrix& raw = auxiliary->frame(t);
      Matrix out(raw.rows(), raw.cols());
      for (Eigen::Index c = 0; c < raw.size(); ++c) {
        out(c) = checked_boxcox(raw(c), params, t, c, raw.rows(), "auxiliary");
        sum += out(c);
        ++count;
      }
      aux_frames.push_back(std::move(out));
    }
  }
  params.fitted_count = count;
  params.mean = sum / static_cast<double>(count);

  double squares = 0.0;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Mask& mask = video.mask(t);
    for (Eigen::Index c = 0; c < frames[t].size(); ++c) {
      if (mask(c)) squares += std::pow(frames[t](c) - params.mean, 2);
    }
  }
  for (const auto& f : aux_frames) {
    squares += (f.array() - params.mean).square().sum();
  }
  params.std = std::sqrt(squares / static_cast<double>(count));
  if (!(params.std > 0.0) ||
      params.std <= 1e-12 * std::max(1.0, std::abs(params.mean))) {
    throw std::domain_error(
        "pooled pixel population has zero variance; cannot standardize");
  }

  for (std::size_t t = 0; t < frames.size(); ++t) {
    frames[t] = video.mask(t).select(
        (frames[t].array() - params.mean) / params.std, 0.0);
  }
  for (auto& f : aux_frames) f = (f.array() - params.mean) / params.std;

  TransformedData out{MaskedVideo(std::move(frames),
                                  {video.masks().begin(), video.masks().end()}),
                      std::nullopt, params};
  if (auxiliary != nullptr) out.auxiliary.emplace(std::move(aux_frames));
  return out;
}

Matrix apply(const Matrix& frame, const TransformParams& params) {
  Matrix out(frame.rows(), frame.cols());
  for (Eigen::Index c = 0; c < frame.size(); ++c) {
    out(c) = (checked_boxcox(frame(c), params, 0, c, frame.rows(), "input") -
              params.mean) /
             params.std;
  }
  return out;
}

InvertResult invert(std::span<const Matrix> frames,
                    const TransformParams& params) {
  const double lambda = params.boxcox_lambda;
  InvertResult result;
  result.frames.reserve(frames.size());
  for (const auto& frame : frames) {
    Matrix out(frame.rows(), frame.cols());
    for (Eigen::Index c = 0; c < frame.size(); ++c) {
      const double value = params.std * frame(c) + params.mean;
      double y;
      if (lambda == 0.0) {
        y = std::exp(value);
      } else {
        const double base = lambda * value + 1.0;
        if (base > 0.0) {
          y = std::exp(std::log(base) / lambda);
        } else {
          ++result.clamped;
          // Boundary of the image of Box-Cox: y -> 0 for lambda > 0,
          // y -> +inf for lambda < 0 (use the largest finite value).
          y = lambda > 0.0 ? 0.0 : std::numeric_limits<double>::max();
        }
      }
      out(c) = std::max(y - params.offset, 0.0);
    }
    result.frames.push_back(std::move(out));
  }
  return result;
}

double boxcox_log_likelihood(const MaskedVideo& video, double lambda,
                             double offset) {
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_log = 0.0;
  std::size_t n = 0;
  TransformParams p;
  p.boxcox_lambda = lambda;
  p.offset = offset;
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    const Matrix& raw = video.frame(t);
    const Mask& mask = video.mask(t);
    for (Eigen::Index c = 0; c < raw.size(); ++c) {
      if (!mask(c)) continue;
      const double z = checked_boxcox(raw(c), p, t, c, raw.rows(), "observed");
      sum += z;
      sum_sq += z * z;
      sum_log += std::log(raw(c) + offset);
      ++n;
    }
  }
  const double dn = static_cast<double>(n);
  const double var = sum_sq / dn - (sum / dn) * (sum / dn);
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  return -0.5 * dn * std::log(var) + (lambda - 1.0) * sum_log;
}

LambdaScan scan_boxcox_lambda(const MaskedVideo& video,
                              std::span<const double> grid, double offset) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  LambdaScan scan;
  double best = -std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const double ll = boxcox_log_likelihood(video, lambda, offset);
    scan.lambdas.push_back(lambda);
    scan.log_likelihood.push_back(ll);
    if (ll > best) {
      best = ll;
      scan.best = lambda;
    }
  }
  return scan;
}

}  // namespace vista::transform
