#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vista {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Observation mask; true marks an observed entry.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when inputs have inconsistent shapes or violate a type invariant.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VideoDims {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t frames = 0;

  bool operator==(const VideoDims&) const = default;
};

std::string to_string(const VideoDims& dims);

/// P_Omega: keeps observed entries, zeroes the rest.
Matrix project_observed(const Matrix& frame, const Mask& mask);

/// P_Omega-perp: keeps unobserved entries, zeroes the observed ones.
Matrix project_complement(const Matrix& frame, const Mask& mask);

/// Sequence of m x n frames with per-entry observation masks.
///
/// Values stored at unobserved positions are never read; they are zeroed on
/// construction so that two videos with the same observed data compare equal.
class MaskedVideo {
 public:
  MaskedVideo(std::vector<Matrix> frames, std::vector<Mask> masks);

  /// Builds a video where NaN entries are missing.
  static MaskedVideo from_nan_encoded(std::vector<Matrix> frames);
  /// Builds a video with every entry observed.
  static MaskedVideo fully_observed(std::vector<Matrix> frames);

  const VideoDims& dims() const { return dims_; }
  std::size_t num_frames() const { return dims_.frames; }
  std::size_t rows() const { return dims_.rows; }
  std::size_t cols() const { return dims_.cols; }

  const Matrix& frame(std::size_t t) const { return frames_.at(t); }
  const Mask& mask(std::size_t t) const { return masks_.at(t); }
  std::span<const Matrix> frames() const { return frames_; }
  std::span<const Mask> masks() const { return masks_; }

  std::size_t observed_count(std::size_t t) const;
  std::size_t observed_count() const;

  /// Frame t with NaN at unobserved entries.
  Matrix nan_encoded(std::size_t t) const;

  /// Same data restricted to a narrower mask (each new mask must be a
  /// subset of the current one).
  MaskedVideo with_masks(std::vector<Mask> masks) const;

 private:
  VideoDims dims_;
  std::vector<Matrix> frames_;
  std::vector<Mask> masks_;
};

/// Fully observed companion video Y_1..Y_T.
class AuxiliaryVideo {
 public:
  explicit AuxiliaryVideo(std::vector<Matrix> frames);

  const VideoDims& dims() const { return dims_; }
  std::size_t num_frames() const { return dims_.frames; }
  const Matrix& frame(std::size_t t) const { return frames_.at(t); }
  std::span<const Matrix> frames() const { return frames_; }

 private:
  VideoDims dims_;
  std::vector<Matrix> frames_;
};

/// Factor matrices A_t (m x r) and B_t (n x r); frame t is A_t B_t^T.
struct FactorSequence {
  std::vector<Matrix> a;
  std::vector<Matrix> b;

  std::size_t num_frames() const { return a.size(); }
  Eigen::Index rank() const { return a.empty() ? 0 : a.front().cols(); }
  Matrix product(std::size_t t) const { return a[t] * b[t].transpose(); }

  /// Throws DimensionError unless all factors share (m, r) / (n, r) and are
  /// finite.
  void validate(std::size_t rows, std::size_t cols) const;
};

struct PenaltyConfig {
  double lambda1 = 0.9;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Eigen::Index rank = 10;
  std::size_t max_iter = 500;
  double tol = 1e-5;
  std::uint64_t seed = 1;

  /// Checks ranges; `has_auxiliary` tells whether lambda3 > 0 is allowed.
  void validate(bool has_auxiliary) const;
};

/// P_Omega(X_t) + P_Omega-perp(a b^T).
Matrix fill_in(const Matrix& frame, const Mask& mask, const Matrix& a,
               const Matrix& b);

}  // namespace vista
