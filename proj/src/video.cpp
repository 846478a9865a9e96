#include "vista/video.hpp"

#include <cmath>

namespace vista {

namespace {

void require_same_shape(const Matrix& frame, const Mask& mask) {
  if (frame.rows() != mask.rows() || frame.cols() != mask.cols()) {
    throw DimensionError("frame is " + std::to_string(frame.rows()) + "x" +
                         std::to_string(frame.cols()) + " but mask is " +
                         std::to_string(mask.rows()) + "x" +
                         std::to_string(mask.cols()));
  }
}

VideoDims dims_of(const std::vector<Matrix>& frames) {
  if (frames.empty()) throw DimensionError("video must have at least one frame");
  const auto rows = frames.front().rows();
  const auto cols = frames.front().cols();
  if (rows < 1 || cols < 1) throw DimensionError("frames must be non-empty");
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].rows() != rows || frames[t].cols() != cols) {
      throw DimensionError("frame " + std::to_string(t) +
                           " differs in shape from frame 0");
    }
  }
  return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
          frames.size()};
}

}  // namespace

std::string to_string(const VideoDims& dims) {
  return std::to_string(dims.rows) + "x" + std::to_string(dims.cols) + "x" +
         std::to_string(dims.frames);
}

Matrix project_observed(const Matrix& frame, const Mask& mask) {
  require_same_shape(frame, mask);
  return mask.select(frame, 0.0);
}

Matrix project_complement(const Matrix& frame, const Mask& mask) {
  require_same_shape(frame, mask);
  return mask.select(Matrix::Zero(frame.rows(), frame.cols()), frame);
}

Matrix fill_in(const Matrix& frame, const Mask& mask, const Matrix& a,
               const Matrix& b) {
  require_same_shape(frame, mask);
  if (a.rows() != frame.rows() || b.rows() != frame.cols() ||
      a.cols() != b.cols()) {
    throw DimensionError("factor shapes do not match the frame");
  }
  const Matrix low_rank = a * b.transpose();
  return mask.select(frame, low_rank);
}

MaskedVideo::MaskedVideo(std::vector<Matrix> frames, std::vector<Mask> masks)
    : dims_(dims_of(frames)), frames_(std::move(frames)), masks_(std::move(masks)) {
  if (masks_.size() != frames_.size()) {
    throw DimensionError("got " + std::to_string(frames_.size()) +
                         " frames but " + std::to_string(masks_.size()) +
                         " masks");
  }
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    require_same_shape(frames_[t], masks_[t]);
    if (!masks_[t].any()) {
      throw DimensionError("frame " + std::to_string(t) +
                           " has no observed entries");
    }
    frames_[t] = masks_[t].select(frames_[t], 0.0);
    if (!frames_[t].allFinite()) {
      throw DimensionError("frame " + std::to_string(t) +
                           " has a non-finite observed value");
    }
  }
}

MaskedVideo MaskedVideo::from_nan_encoded(std::vector<Matrix> frames) {
  std::vector<Mask> masks;
  masks.reserve(frames.size());
  for (const auto& f : frames) masks.emplace_back(f.array() == f.array());
  return MaskedVideo(std::move(frames), std::move(masks));
}

MaskedVideo MaskedVideo::fully_observed(std::vector<Matrix> frames) {
  std::vector<Mask> masks;
  masks.reserve(frames.size());
  for (const auto& f : frames) {
    masks.push_back(Mask::Constant(f.rows(), f.cols(), true));
  }
  return MaskedVideo(std::move(frames), std::move(masks));
}

std::size_t MaskedVideo::observed_count(std::size_t t) const {
  return static_cast<std::size_t>(masks_.at(t).count());
}

std::size_t MaskedVideo::observed_count() const {
  std::size_t total = 0;
  for (const auto& m : masks_) total += static_cast<std::size_t>(m.count());
  return total;
}

Matrix MaskedVideo::nan_encoded(std::size_t t) const {
  return masks_.at(t).select(frames_[t], std::nan(""));
}

MaskedVideo MaskedVideo::with_masks(std::vector<Mask> masks) const {
  if (masks.size() != frames_.size()) {
    throw DimensionError("mask count does not match frame count");
  }
  for (std::size_t t = 0; t < masks.size(); ++t) {
    require_same_shape(frames_[t], masks[t]);
    if ((masks[t] && !masks_[t]).any()) {
      throw DimensionError("new mask for frame " + std::to_string(t) +
                           " marks entries observed that were missing");
    }
  }
  return MaskedVideo(frames_, std::move(masks));
}

AuxiliaryVideo::AuxiliaryVideo(std::vector<Matrix> frames)
    : dims_(dims_of(frames)), frames_(std::move(frames)) {
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    if (!frames_[t].allFinite()) {
      throw DimensionError("auxiliary frame " + std::to_string(t) +
                           " has missing or non-finite entries");
    }
  }
}

void FactorSequence::validate(std::size_t rows, std::size_t cols) const {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("factor sequence needs equal, non-zero A and B counts");
  }
  const auto r = rank();
  if (r < 1) throw DimensionError("factor rank must be at least 1");
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].rows() != static_cast<Eigen::Index>(rows) || a[t].cols() != r ||
        b[t].rows() != static_cast<Eigen::Index>(cols) || b[t].cols() != r) {
      throw DimensionError("factor pair " + std::to_string(t) +
                           " has the wrong shape");
    }
    if (!a[t].allFinite() || !b[t].allFinite()) {
      throw DimensionError("factor pair " + std::to_string(t) +
                           " has non-finite entries");
    }
  }
}

void PenaltyConfig::validate(bool has_auxiliary) const {
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
    throw std::invalid_argument("lambda1 must be positive");
  }
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
    throw std::invalid_argument("lambda2 must be non-negative");
  }
  if (!(lambda3 >= 0.0) || !std::isfinite(lambda3)) {
    throw std::invalid_argument("lambda3 must be non-negative");
  }
  if (lambda3 > 0.0 && !has_auxiliary) {
    throw std::invalid_argument("lambda3 > 0 requires an auxiliary video");
  }
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

}  // namespace vista
