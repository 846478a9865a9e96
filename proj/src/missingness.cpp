#include "vista/missingness.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "vista/spherical_harmonics.hpp"

namespace vista::sim {

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::kRandom:
      return "random";
    case Pattern::kTemporal:
      return "temporal";
    case Pattern::kRandomPatch:
      return "random-patch";
    case Pattern::kTemporalPatch:
      return "temporal-patch";
  }
  return "unknown";
}

Pattern parse_pattern(std::string_view name) {
  if (name == "random") return Pattern::kRandom;
  if (name == "temporal") return Pattern::kTemporal;
  if (name == "random-patch") return Pattern::kRandomPatch;
  if (name == "temporal-patch") return Pattern::kTemporalPatch;
  throw std::invalid_argument("unknown missingness pattern '" +
                              std::string(name) + "'");
}

bool is_patch(Pattern pattern) {
  return pattern == Pattern::kRandomPatch ||
         pattern == Pattern::kTemporalPatch;
}

BoundingBox bounding_box_for(const std::vector<double>& latitudes,
                             const std::vector<double>& longitudes,
                             double lat_min, double lat_max, double lt_min,
                             double lt_max) {
  std::optional<std::size_t> r0, r1, c0, c1;
  for (std::size_t i = 0; i < latitudes.size(); ++i) {
    if (latitudes[i] >= lat_min && latitudes[i] <= lat_max) {
      if (!r0) r0 = i;
      r1 = i;
    }
  }
  for (std::size_t j = 0; j < longitudes.size(); ++j) {
    const double hours = longitudes[j] / 15.0;
    if (hours >= lt_min && hours <= lt_max) {
      if (!c0) c0 = j;
      c1 = j;
    }
  }
  if (!r0 || !c0) {
    throw std::invalid_argument("grid has no cells inside the bounding region");
  }
  return {*r0, *r1, *c0, *c1};
}

std::vector<std::string> validate(const MissingnessSpec& spec,
                                  std::size_t rows, std::size_t cols) {
  std::vector<std::string> notes;
  if (is_patch(spec.pattern)) {
    if (spec.patch_size < 1 || spec.patch_size > rows ||
        spec.patch_size > cols) {
      throw std::invalid_argument("patch size " +
                                  std::to_string(spec.patch_size) +
                                  " does not fit a " + std::to_string(rows) +
                                  "x" + std::to_string(cols) + " frame");
    }
    if (spec.patch_size != 27 && spec.patch_size != 45 &&
        spec.patch_size != 63) {
      notes.push_back("patch size " + std::to_string(spec.patch_size) +
                      " is not one of the 27/45/63 presets");
    }
  } else {
    if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
      throw std::invalid_argument("missing fraction must lie in (0, 1)");
    }
    if (spec.fraction != 0.3 && spec.fraction != 0.5 && spec.fraction != 0.7) {
      notes.push_back("fraction " + std::to_string(spec.fraction) +
                      " is not one of the 0.3/0.5/0.7 presets");
    }
  }
  if (spec.box) {
    const auto& b = *spec.box;
    if (b.row_begin > b.row_end || b.col_begin > b.col_end ||
        b.row_end >= rows || b.col_end >= cols) {
      throw std::invalid_argument("bounding box lies outside the frame");
    }
  }
  return notes;
}

std::vector<Cell> perimeter(const BoundingBox& box) {
  std::vector<Cell> cells;
  const auto r0 = box.row_begin, r1 = box.row_end;
  const auto c0 = box.col_begin, c1 = box.col_end;
  if (r0 == r1 || c0 == c1) {
    // Degenerate box: a single line traversed once.
    for (auto r = r0; r <= r1; ++r) {
      for (auto c = c1 + 1; c-- > c0;) cells.push_back({r, c});
    }
    return cells;
  }
  for (auto c = c1; c > c0; --c) cells.push_back({r0, c});  // top, leftwards
  for (auto r = r0; r < r1; ++r) cells.push_back({r, c0});  // left, downwards
  for (auto c = c0; c < c1; ++c) cells.push_back({r1, c});  // bottom, rightwards
  for (auto r = r1; r > r0; --r) cells.push_back({r, c1});  // right, upwards
  return cells;
}

Mask patch_mask(std::size_t rows, std::size_t cols, Cell centre,
                std::size_t size) {
  Mask mask = Mask::Constant(static_cast<Eigen::Index>(rows),
                             static_cast<Eigen::Index>(cols), false);
  const auto half = static_cast<long>((size - 1) / 2);
  const long top = static_cast<long>(centre.row) - half;
  const long left = static_cast<long>(centre.col) - half;
  const long n = static_cast<long>(cols);
  for (long dr = 0; dr < static_cast<long>(size); ++dr) {
    const long r = top + dr;
    if (r < 0 || r >= static_cast<long>(rows)) continue;
    for (long dc = 0; dc < static_cast<long>(size); ++dc) {
      const long c = ((left + dc) % n + n) % n;
      mask(r, c) = true;
    }
  }
  return mask;
}

namespace {

Mask bernoulli_mask(Eigen::Index rows, Eigen::Index cols, double fraction,
                    std::mt19937_64& rng) {
  std::bernoulli_distribution drop(fraction);
  Mask mask(rows, cols);
  for (Eigen::Index c = 0; c < mask.size(); ++c) mask(c) = drop(rng);
  return mask;
}

Mask shift_columns(const Mask& mask, std::size_t shift) {
  const auto n = mask.cols();
  Mask out(mask.rows(), n);
  const auto s = static_cast<Eigen::Index>(shift % static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) out.col((j + s) % n) = mask.col(j);
  return out;
}

}  // namespace

SimulatedMissingness apply(const MaskedVideo& truth,
                           const MissingnessSpec& spec) {
  const auto rows = truth.rows();
  const auto cols = truth.cols();
  for (std::size_t t = 0; t < truth.num_frames(); ++t) {
    if (!truth.mask(t).all()) {
      throw std::invalid_argument("missingness simulation needs a fully "
                                  "observed video; frame " +
                                  std::to_string(t) + " has gaps");
    }
  }
  validate(spec, rows, cols);

  BoundingBox box;
  if (spec.box) {
    box = *spec.box;
  } else {
    const auto grid = sh::SphericalGrid::regular(rows, cols);
    box = bounding_box_for(grid.latitudes(), grid.longitudes());
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Mask> dropped;
  std::vector<Cell> centres;
  dropped.reserve(truth.num_frames());
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);

  switch (spec.pattern) {
    case Pattern::kRandom:
      for (std::size_t t = 0; t < truth.num_frames(); ++t) {
        dropped.push_back(bernoulli_mask(r, c, spec.fraction, rng));
      }
      break;
    case Pattern::kTemporal: {
      const Mask first = bernoulli_mask(r, c, spec.fraction, rng);
      for (std::size_t t = 0; t < truth.num_frames(); ++t) {
        dropped.push_back(shift_columns(first, spec.shift * t));
      }
      break;
    }
    case Pattern::kRandomPatch:
    case Pattern::kTemporalPatch: {
      const auto track = perimeter(box);
      std::uniform_int_distribution<std::size_t> pick(0, track.size() - 1);
      const bool moving = spec.pattern == Pattern::kTemporalPatch;
      const std::size_t start = moving ? pick(rng) : 0;
      for (std::size_t t = 0; t < truth.num_frames(); ++t) {
        const std::size_t pos =
            moving ? (start + spec.shift * t) % track.size() : pick(rng);
        centres.push_back(track[pos]);
        dropped.push_back(patch_mask(rows, cols, track[pos], spec.patch_size));
      }
      break;
    }
  }

  std::vector<Mask> observed;
  observed.reserve(dropped.size());
  for (const auto& d : dropped) observed.push_back(!d);
  std::vector<Matrix> frames(truth.frames().begin(), truth.frames().end());
  return {MaskedVideo(std::move(frames), std::move(observed)),
          std::move(dropped), std::move(centres), box};
}

Holdout holdout(const MaskedVideo& video, double fraction,
                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<Mask> train;
  std::vector<Mask> test;
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    const Mask& mask = video.mask(t);
    std::vector<Eigen::Index> cells;
    for (Eigen::Index c = 0; c < mask.size(); ++c) {
      if (mask(c)) cells.push_back(c);
    }
    if (cells.size() < 5) {
      throw std::invalid_argument("frame " + std::to_string(t) + " has only " +
                                  std::to_string(cells.size()) +
                                  " observed pixels; holdout needs at least 5");
    }
    const auto k = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(cells.size())));
    if (k >= cells.size()) {
      throw std::invalid_argument("holdout would leave frame " +
                                  std::to_string(t) + " without training data");
    }
    // Partial Fisher-Yates: the first k cells become the test set.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, cells.size() - 1);
      std::swap(cells[i], cells[pick(rng)]);
    }
    Mask held = Mask::Constant(mask.rows(), mask.cols(), false);
    for (std::size_t i = 0; i < k; ++i) held(cells[i]) = true;
    train.push_back(mask && !held);
    test.push_back(std::move(held));
  }
  return {video.with_masks(std::move(train)), std::move(test)};
}

}  // namespace vista::sim
