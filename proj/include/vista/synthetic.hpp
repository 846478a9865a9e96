#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vista/video.hpp"

namespace vista::sim {

/// Smooth positive test video on the regular spherical grid: a rank-`rank`
/// background (a constant plus real spherical-harmonic modes with slowly
/// varying weights) and a smooth bump that drifts in longitude and
/// oscillates in latitude.
struct SyntheticSpec {
  std::size_t rows = 60;
  std::size_t cols = 90;
  std::size_t frames = 24;
  std::size_t rank = 4;
  double background = 10.0;
  double mode_amplitude = 3.0;
  double bump_amplitude = 15.0;
  /// The bump is ((1 + cos g) / 2)^degree in the angular distance g from its
  /// centre, a polynomial of that degree in cos g and hence band-limited.
  int bump_degree = 8;
  /// Longitude drift of the bump in degrees per frame.
  double bump_drift = 4.0;
  double noise_std = 0.0;
  std::uint64_t seed = 7;
};

std::vector<Matrix> make_synthetic_video(const SyntheticSpec& spec);

}  // namespace vista::sim
