#include "vista/synthetic.hpp"

#include <cmath>
#include <iterator>
#include <numbers>
#include <utility>
#include <random>
#include <stdexcept>

#include "vista/spherical_harmonics.hpp"

namespace vista::sim {

std::vector<Matrix> make_synthetic_video(const SyntheticSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.frames < 1) {
    throw std::invalid_argument("synthetic video needs positive dimensions");
  }
  constexpr double kPi = std::numbers::pi;
  const auto grid = sh::SphericalGrid::regular(spec.rows, spec.cols);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::normal_distribution<double> noise(0.0, spec.noise_std);

  const auto m = static_cast<Eigen::Index>(spec.rows);
  const auto n = static_cast<Eigen::Index>(spec.cols);
  // The constant background plus rank - 1 spherical-harmonic modes, each a
  // separable latitude x longitude product that is smooth over the poles.
  static constexpr std::pair<int, int> kDegrees[] = {
      {1, 1}, {2, 2}, {3, 1}, {4, 3}, {5, 2}, {6, 4}, {7, 5}, {8, 3}};
  if (spec.rank < 1 || spec.rank > std::size(kDegrees) + 1) {
    throw std::invalid_argument("synthetic video supports rank 1 to 9");
  }
  const std::size_t num_modes = spec.rank - 1;
  std::vector<Matrix> modes;
  std::vector<double> weight_phase;
  for (std::size_t k = 0; k < num_modes; ++k) {
    const auto [l, order] = kDegrees[k];
    const double rotation = angle(rng);
    weight_phase.push_back(angle(rng));
    Matrix mode(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double phi = grid.azimuth(static_cast<std::size_t>(j));
      for (Eigen::Index i = 0; i < m; ++i) {
        const double theta = grid.colatitude(static_cast<std::size_t>(i));
        mode(i, j) = std::cos(rotation) * sh::eval_basis(l, order, theta, phi) +
                     std::sin(rotation) * sh::eval_basis(l, -order, theta, phi);
      }
    }
    mode /= mode.cwiseAbs().maxCoeff();
    modes.push_back(std::move(mode));
  }

  std::vector<Matrix> frames;
  frames.reserve(spec.frames);
  const double period = static_cast<double>(spec.frames);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double phase = 2.0 * kPi * static_cast<double>(t) / period;
    Matrix frame = Matrix::Constant(m, n, spec.background);
    for (std::size_t k = 0; k < num_modes; ++k) {
      frame += spec.mode_amplitude / static_cast<double>(k + 1) *
               (1.0 + 0.3 * std::sin(phase + weight_phase[k])) * modes[k];
    }

    const double lat_c = 10.0 * std::sin(phase) * kPi / 180.0;
    const double lon_c = (150.0 + spec.bump_drift * static_cast<double>(t)) * kPi / 180.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dlon = grid.azimuth(static_cast<std::size_t>(j)) - lon_c;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double lat = grid.latitudes()[static_cast<std::size_t>(i)] * kPi / 180.0;
        const double cos_gamma = std::sin(lat) * std::sin(lat_c) +
                                 std::cos(lat) * std::cos(lat_c) * std::cos(dlon);
        frame(i, j) += spec.bump_amplitude *
                       std::pow(0.5 * (1.0 + cos_gamma), spec.bump_degree);
      }
    }
    if (spec.noise_std > 0.0) {
      for (Eigen::Index c = 0; c < frame.size(); ++c) frame(c) += noise(rng);
    }
    frames.push_back(frame.cwiseMax(0.0));
  }
  return frames;
}

}  // namespace vista::sim
