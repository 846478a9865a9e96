#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vista/video.hpp"

namespace vista::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary video container:
///   bytes 0-3   magic "VMC1"
///   bytes 4-15  m, n, T as little-endian uint32
///   bytes 16-19 reserved, zero
///   payload     T*m*n little-endian IEEE-754 doubles, frame-major then
///               row-major; NaN marks a missing entry.
inline constexpr std::size_t kHeaderBytes = 20;

struct RawVideo {
  VideoDims dims;
  /// NaN at missing entries.
  std::vector<Matrix> frames;
};

void write_raw_video(const std::filesystem::path& path,
                     std::span<const Matrix> frames);
RawVideo read_raw_video(const std::filesystem::path& path);

void write_video(const std::filesystem::path& path, const MaskedVideo& video);
MaskedVideo read_video(const std::filesystem::path& path);

/// Fails if the file contains any NaN.
AuxiliaryVideo read_auxiliary(const std::filesystem::path& path);

/// Masks stored as 1.0 (true) / 0.0 (false) frames in the same container.
void write_masks(const std::filesystem::path& path, std::span<const Mask> masks);
std::vector<Mask> read_masks(const std::filesystem::path& path);

/// Long-format CSV "t,i,j,value", one row per observed entry, values with
/// 17 significant digits.
void write_csv_video(const std::filesystem::path& path,
                     std::span<const Matrix> frames,
                     std::span<const Mask> masks);
void write_csv_video(const std::filesystem::path& path,
                     const MaskedVideo& video);
/// Dimensions are not recoverable from the rows alone and must be given.
MaskedVideo read_csv_video(const std::filesystem::path& path,
                           const VideoDims& dims);

/// Ordered key=value text file.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value) {
    set(key, static_cast<std::int64_t>(value));
  }
  void set(const std::string& key, const char* value) {
    set(key, std::string(value));
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  const std::string* find(const std::string& key) const;

  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace vista::io
