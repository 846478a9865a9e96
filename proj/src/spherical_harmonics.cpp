#include "vista/spherical_harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace vista::sh {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Orthonormalized associated Legendre values p(l, m) for 0 <= m <= l <= l_max,
// scaled so that Y_l^0 = p(l, 0) and Y_l^{+-m} = sqrt(2) p(l, m) cos/sin(m phi).
// Stored densely in a (l_max+1) x (l_max+1) lower-triangular table.
Matrix legendre_table(int l_max, double theta) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  Matrix p = Matrix::Zero(l_max + 1, l_max + 1);
  p(0, 0) = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 1; m <= l_max; ++m) {
    p(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p(m - 1, m - 1);
  }
  for (int m = 0; m < l_max; ++m) {
    p(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * p(m, m);
  }
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      const double ll = static_cast<double>(l) * l;
      const double mm = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
      const double lp = static_cast<double>(l - 1) * (l - 1);
      const double b = std::sqrt((lp - mm) / (4.0 * lp - 1.0));
      p(l, m) = a * (x * p(l - 1, m) - b * p(l - 2, m));
    }
  }
  return p;
}

void fill_row(const Matrix& p, int l_max, double phi, double* out,
              Eigen::Index stride) {
  for (int l = 0; l <= l_max; ++l) {
    out[coefficient_index(l, 0) * stride] = p(l, 0);
    for (int m = 1; m <= l; ++m) {
      const double scaled = std::numbers::sqrt2 * p(l, m);
      out[coefficient_index(l, m) * stride] = scaled * std::cos(m * phi);
      out[coefficient_index(l, -m) * stride] = scaled * std::sin(m * phi);
    }
  }
}

}  // namespace

double eval_basis(int l, int m, double theta, double phi) {
  if (l < 0 || m > l || m < -l) {
    throw std::invalid_argument("spherical harmonic needs |m| <= l, got l=" +
                                std::to_string(l) + " m=" + std::to_string(m));
  }
  const Matrix p = legendre_table(l, theta);
  const int am = m < 0 ? -m : m;
  if (m == 0) return p(l, 0);
  const double scaled = std::numbers::sqrt2 * p(l, am);
  return m > 0 ? scaled * std::cos(am * phi) : scaled * std::sin(am * phi);
}

Vector eval_all(int l_max, double theta, double phi) {
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  Vector out(static_cast<Eigen::Index>(coefficient_count(l_max)));
  fill_row(legendre_table(l_max, theta), l_max, phi, out.data(), 1);
  return out;
}

SphericalGrid::SphericalGrid(std::vector<double> latitudes_deg,
                             std::vector<double> longitudes_deg)
    : lat_(std::move(latitudes_deg)), lon_(std::move(longitudes_deg)) {
  if (lat_.empty() || lon_.empty()) {
    throw std::invalid_argument("grid axes must be non-empty");
  }
  for (double lat : lat_) {
    if (!(lat >= -90.0 && lat <= 90.0)) {
      throw std::invalid_argument("latitude outside [-90, 90]");
    }
  }
  auto monotone = [](const std::vector<double>& axis) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < axis.size(); ++i) {
      up = up && axis[i] > axis[i - 1];
      down = down && axis[i] < axis[i - 1];
    }
    return up || down;
  };
  if (!monotone(lat_) || !monotone(lon_)) {
    throw std::invalid_argument("grid axes must be strictly monotone");
  }
}

SphericalGrid SphericalGrid::regular(std::size_t rows, std::size_t cols) {
  std::vector<double> lat(rows);
  std::vector<double> lon(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    lat[i] = 90.0 - 180.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    lon[j] = 360.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
  }
  return SphericalGrid(std::move(lat), std::move(lon));
}

double SphericalGrid::colatitude(std::size_t i) const {
  return (90.0 - lat_.at(i)) * kDeg;
}

double SphericalGrid::azimuth(std::size_t j) const { return lon_.at(j) * kDeg; }

BasisMatrix::BasisMatrix(const SphericalGrid& grid, int l_max)
    : l_max_(l_max), rows_(grid.rows()), cols_(grid.cols()) {
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  const auto cells = static_cast<Eigen::Index>(rows_ * cols_);
  values_.resize(cells, static_cast<Eigen::Index>(coefficient_count(l_max)));
  for (std::size_t i = 0; i < rows_; ++i) {
    const Matrix p = legendre_table(l_max, grid.colatitude(i));
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto cell = static_cast<Eigen::Index>(i + j * rows_);
      fill_row(p, l_max, grid.azimuth(j), &values_(cell, 0), cells);
    }
  }
}

ShModel fit_frame(const Matrix& frame, const Mask& mask,
                  const BasisMatrix& basis, double v) {
  if (static_cast<std::size_t>(frame.rows()) != basis.rows() ||
      static_cast<std::size_t>(frame.cols()) != basis.cols() ||
      mask.rows() != frame.rows() || mask.cols() != frame.cols()) {
    throw DimensionError("frame, mask and grid shapes differ");
  }
  if (!(v >= 0.0)) throw std::invalid_argument("Tikhonov weight must be >= 0");

  const Eigen::Index observed = mask.count();
  if (observed == 0) {
    throw std::invalid_argument("cannot fit a frame with no observed pixels");
  }
  const auto k = basis.values().cols();
  Matrix design(observed, k);
  Vector target(observed);
  Eigen::Index row = 0;
  for (Eigen::Index cell = 0; cell < frame.size(); ++cell) {
    if (!mask(cell)) continue;
    design.row(row) = basis.values().row(cell);
    target(row) = frame(cell);
    ++row;
  }

  Matrix normal = Matrix::Zero(k, k);
  normal.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  normal = normal.selfadjointView<Eigen::Lower>();
  normal.diagonal().array() += v;
  Eigen::LDLT<Matrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::runtime_error("spherical-harmonic normal equations are singular");
  }
  ShModel model;
  model.l_max = basis.l_max();
  model.tikhonov_v = v;
  model.coeffs = ldlt.solve(design.transpose() * target);
  if (!model.coeffs.allFinite()) {
    throw std::runtime_error(
        "spherical-harmonic fit is ill-posed; add Tikhonov weight");
  }
  return model;
}

ShModel fit_frame(const Matrix& frame, const Mask& mask,
                  const SphericalGrid& grid, int l_max, double v) {
  return fit_frame(frame, mask, BasisMatrix(grid, l_max), v);
}

Matrix evaluate(const ShModel& model, const BasisMatrix& basis) {
  if (model.l_max != basis.l_max() ||
      model.coeffs.size() != basis.values().cols()) {
    throw DimensionError("model degree does not match the basis");
  }
  const Vector flat = basis.values() * model.coeffs;
  return Eigen::Map<const Matrix>(flat.data(),
                                  static_cast<Eigen::Index>(basis.rows()),
                                  static_cast<Eigen::Index>(basis.cols()));
}

Matrix render(const ShModel& model, const BasisMatrix& basis) {
  return evaluate(model, basis).cwiseMax(0.0);
}

Matrix render(const ShModel& model, const SphericalGrid& grid) {
  return render(model, BasisMatrix(grid, model.l_max));
}

AuxiliaryVideo build_auxiliary(const MaskedVideo& video,
                               const SphericalGrid& grid, int l_max,
                               double v) {
  if (grid.rows() != video.rows() || grid.cols() != video.cols()) {
    throw DimensionError("grid does not match the video frame size");
  }
  const BasisMatrix basis(grid, l_max);
  std::vector<Matrix> frames;
  frames.reserve(video.num_frames());
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    frames.push_back(
        render(fit_frame(video.frame(t), video.mask(t), basis, v), basis));
  }
  return AuxiliaryVideo(std::move(frames));
}

}  // namespace vista::sh
