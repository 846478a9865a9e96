#pragma once

#include <cstddef>
#include <vector>

#include "vista/video.hpp"

namespace vista::sh {

/// Number of real harmonics with degree <= l_max.
constexpr std::size_t coefficient_count(int l_max) {
  return static_cast<std::size_t>(l_max + 1) * static_cast<std::size_t>(l_max + 1);
}

/// Flat coefficient index of (l, m), |m| <= l.
constexpr std::size_t coefficient_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}

/// Real orthonormal spherical harmonic Y_l^m(theta, phi) with theta the
/// colatitude. Cosine in phi for m > 0, sine for m < 0; no Condon-Shortley
/// phase.
double eval_basis(int l, int m, double theta, double phi);

/// All (l_max+1)^2 harmonics at one point, in coefficient_index order.
Vector eval_all(int l_max, double theta, double phi);

/// Latitude/longitude axes of an m x n map, in degrees.
///
/// Row i has colatitude (90 - lat_i) degrees; column j has azimuth lon_j.
class SphericalGrid {
 public:
  SphericalGrid(std::vector<double> latitudes_deg,
                std::vector<double> longitudes_deg);

  /// Cell-centred grid, row 0 northernmost, longitudes in [0, 360).
  static SphericalGrid regular(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return lat_.size(); }
  std::size_t cols() const { return lon_.size(); }
  const std::vector<double>& latitudes() const { return lat_; }
  const std::vector<double>& longitudes() const { return lon_; }
  double colatitude(std::size_t i) const;
  double azimuth(std::size_t j) const;
  /// Longitude expressed in hours of local time (lon / 15).
  double local_time(std::size_t j) const { return lon_[j] / 15.0; }

 private:
  std::vector<double> lat_;
  std::vector<double> lon_;
};

struct ShModel {
  int l_max = 0;
  Vector coeffs;
  double tikhonov_v = 0.0;

  double coefficient(int l, int m) const {
    return coeffs(static_cast<Eigen::Index>(coefficient_index(l, m)));
  }
};

/// Harmonics evaluated at every grid cell: row i + j*m (column-major cell
/// order), one column per coefficient. Shared by all frames of a video.
class BasisMatrix {
 public:
  BasisMatrix(const SphericalGrid& grid, int l_max);

  int l_max() const { return l_max_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Matrix& values() const { return values_; }

 private:
  int l_max_;
  std::size_t rows_;
  std::size_t cols_;
  Matrix values_;
};

/// Ridge least-squares fit of the observed cells of `frame`.
ShModel fit_frame(const Matrix& frame, const Mask& mask,
                  const BasisMatrix& basis, double v);
ShModel fit_frame(const Matrix& frame, const Mask& mask,
                  const SphericalGrid& grid, int l_max, double v);

/// Truncated expansion at every cell; no clamping.
Matrix evaluate(const ShModel& model, const BasisMatrix& basis);

/// Truncated expansion with negative values clamped to zero.
Matrix render(const ShModel& model, const BasisMatrix& basis);
Matrix render(const ShModel& model, const SphericalGrid& grid);

/// Per-frame fit and render of a masked video.
AuxiliaryVideo build_auxiliary(const MaskedVideo& video,
                               const SphericalGrid& grid, int l_max = 11,
                               double v = 0.1);

}  // namespace vista::sh
