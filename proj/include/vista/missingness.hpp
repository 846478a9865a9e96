#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vista/video.hpp"

namespace vista::sim {

enum class Pattern { kRandom, kTemporal, kRandomPatch, kTemporalPatch };

std::string_view to_string(Pattern pattern);
Pattern parse_pattern(std::string_view name);
bool is_patch(Pattern pattern);

/// Inclusive index rectangle.
struct BoundingBox {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;

  std::size_t height() const { return row_end - row_begin + 1; }
  std::size_t width() const { return col_end - col_begin + 1; }
  bool operator==(const BoundingBox&) const = default;
};

/// Rows with latitude in [lat_min, lat_max] and columns with local time in
/// [lt_min, lt_max] hours, for a grid given by its latitude and longitude
/// axes (degrees).
BoundingBox bounding_box_for(const std::vector<double>& latitudes,
                             const std::vector<double>& longitudes,
                             double lat_min = -45.0, double lat_max = 45.0,
                             double lt_min = 7.0, double lt_max = 21.0);

struct MissingnessSpec {
  Pattern pattern = Pattern::kRandom;
  /// Drop probability for the scattered patterns.
  double fraction = 0.5;
  /// Side length of the square patch for the patch patterns.
  std::size_t patch_size = 27;
  /// Cells moved per frame (columns for the temporal pattern, perimeter
  /// steps for the temporal patch pattern).
  std::size_t shift = 6;
  /// Patch-centre track; defaults to the region box of the frame's grid.
  std::optional<BoundingBox> box;
  std::uint64_t seed = 1;
};

/// Non-fatal policy notes (e.g. a patch size outside the 27/45/63 presets).
std::vector<std::string> validate(const MissingnessSpec& spec,
                                  std::size_t rows, std::size_t cols);

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const Cell&) const = default;
};

/// Perimeter cells of `box` in anti-clockwise display order (row 0 at the
/// top), starting at the top-right corner and heading left.
std::vector<Cell> perimeter(const BoundingBox& box);

/// Square patch centred at `centre`: cropped in rows, wrapped in columns.
Mask patch_mask(std::size_t rows, std::size_t cols, Cell centre,
                std::size_t size);

struct SimulatedMissingness {
  MaskedVideo video;
  /// dropped[t](i, j) is true where the pattern removed a pixel.
  std::vector<Mask> dropped;
  /// Patch centres per frame (patch patterns only).
  std::vector<Cell> centres;
  BoundingBox box;
};

/// Imposes the pattern on a fully observed video.
SimulatedMissingness apply(const MaskedVideo& truth,
                           const MissingnessSpec& spec);

struct Holdout {
  MaskedVideo train;
  /// Held-out test pixels per frame.
  std::vector<Mask> test;
};

/// Moves round(fraction * observed) observed pixels of every frame into a
/// test set.
Holdout holdout(const MaskedVideo& video, double fraction,
                std::uint64_t seed);

}  // namespace vista::sim
