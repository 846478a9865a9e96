#include "vista/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace vista::io {

namespace {

constexpr std::array<char, 4> kMagic{'V', 'M', 'C', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void dump(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::uint32_t checked_u32(Eigen::Index v, const char* what) {
  if (v < 1 || static_cast<std::uint64_t>(v) > std::numeric_limits<std::uint32_t>::max()) {
    throw IoError(std::string(what) + " does not fit the header");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf.data(), end);
}

void write_raw_video(const std::filesystem::path& path,
                     std::span<const Matrix> frames) {
  if (frames.empty()) throw IoError("cannot write a video with no frames");
  const auto m = frames.front().rows();
  const auto n = frames.front().cols();
  std::string bytes;
  bytes.reserve(kHeaderBytes + 8 * frames.size() * static_cast<std::size_t>(m * n));
  bytes.append(kMagic.data(), kMagic.size());
  put_u32(bytes, checked_u32(m, "row count"));
  put_u32(bytes, checked_u32(n, "column count"));
  put_u32(bytes, checked_u32(static_cast<Eigen::Index>(frames.size()), "frame count"));
  put_u32(bytes, 0);
  for (const auto& f : frames) {
    if (f.rows() != m || f.cols() != n) {
      throw IoError("frames differ in shape; cannot write '" + path.string() + "'");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) put_f64(bytes, f(i, j));
    }
  }
  dump(path, bytes);
}

RawVideo read_raw_video(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kHeaderBytes) {
    throw IoError("'" + path.string() + "' is shorter than the " +
                  std::to_string(kHeaderBytes) + "-byte header");
  }
  if (std::memcmp(p, kMagic.data(), kMagic.size()) != 0) {
    throw IoError("'" + path.string() + "' does not start with magic VMC1");
  }
  const std::uint64_t m = get_u32(p + 4);
  const std::uint64_t n = get_u32(p + 8);
  const std::uint64_t t = get_u32(p + 12);
  if (get_u32(p + 16) != 0) throw IoError("reserved header field is not zero");
  if (m == 0 || n == 0 || t == 0) throw IoError("header has a zero dimension");
  // Each factor < 2^32, so m*n < 2^64; guard the remaining products.
  const std::uint64_t cells = m * n;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (cells > kMax / t || cells * t > (kMax - kHeaderBytes) / 8) {
    throw IoError("header dimensions overflow the addressable payload");
  }
  const std::uint64_t expected = kHeaderBytes + 8 * cells * t;
  if (bytes.size() != expected) {
    throw IoError("'" + path.string() + "' has " + std::to_string(bytes.size()) +
                  " bytes, expected " + std::to_string(expected) + " for " +
                  std::to_string(m) + "x" + std::to_string(n) + "x" +
                  std::to_string(t));
  }

  RawVideo raw;
  raw.dims = {m, n, t};
  raw.frames.reserve(t);
  const unsigned char* q = p + kHeaderBytes;
  for (std::uint64_t k = 0; k < t; ++k) {
    Matrix f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j, q += 8) f(i, j) = get_f64(q);
    }
    raw.frames.push_back(std::move(f));
  }
  return raw;
}

void write_video(const std::filesystem::path& path, const MaskedVideo& video) {
  std::vector<Matrix> frames;
  frames.reserve(video.num_frames());
  for (std::size_t t = 0; t < video.num_frames(); ++t) {
    frames.push_back(video.nan_encoded(t));
  }
  write_raw_video(path, frames);
}

MaskedVideo read_video(const std::filesystem::path& path) {
  return MaskedVideo::from_nan_encoded(read_raw_video(path).frames);
}

AuxiliaryVideo read_auxiliary(const std::filesystem::path& path) {
  auto raw = read_raw_video(path);
  for (std::size_t t = 0; t < raw.frames.size(); ++t) {
    if (raw.frames[t].hasNaN()) {
      throw IoError("auxiliary file '" + path.string() + "' has missing values in frame " +
                    std::to_string(t));
    }
  }
  return AuxiliaryVideo(std::move(raw.frames));
}

void write_masks(const std::filesystem::path& path, std::span<const Mask> masks) {
  std::vector<Matrix> frames;
  frames.reserve(masks.size());
  for (const auto& m : masks) frames.push_back(m.cast<double>().matrix());
  write_raw_video(path, frames);
}

std::vector<Mask> read_masks(const std::filesystem::path& path) {
  const auto raw = read_raw_video(path);
  std::vector<Mask> masks;
  masks.reserve(raw.frames.size());
  for (const auto& f : raw.frames) {
    if (((f.array() != 0.0) && (f.array() != 1.0)).any()) {
      throw IoError("mask file '" + path.string() + "' holds values other than 0 and 1");
    }
    masks.emplace_back(f.array() == 1.0);
  }
  return masks;
}

void write_csv_video(const std::filesystem::path& path,
                     std::span<const Matrix> frames,
                     std::span<const Mask> masks) {
  if (frames.size() != masks.size()) throw IoError("frame and mask counts differ");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "t,i,j,value\n";
  char buf[40];
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Matrix& f = frames[t];
    const Mask& m = masks[t];
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        if (!m(i, j)) continue;
        std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
        out << t << ',' << i << ',' << j << ',' << buf << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_csv_video(const std::filesystem::path& path, const MaskedVideo& video) {
  write_csv_video(path, video.frames(), video.masks());
}

MaskedVideo read_csv_video(const std::filesystem::path& path, const VideoDims& dims) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "t,i,j,value") {
    throw IoError("'" + path.string() + "' lacks the t,i,j,value header");
  }
  const auto m = static_cast<Eigen::Index>(dims.rows);
  const auto n = static_cast<Eigen::Index>(dims.cols);
  std::vector<Matrix> frames(dims.frames, Matrix::Zero(m, n));
  std::vector<Mask> masks(dims.frames, Mask::Constant(m, n, false));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[4];
    for (auto& f : field) std::getline(row, f, ',');
    try {
      const auto t = std::stoull(field[0]);
      const auto i = std::stoll(field[1]);
      const auto j = std::stoll(field[2]);
      const double v = std::stod(field[3]);
      if (t >= dims.frames || i < 0 || i >= m || j < 0 || j >= n) {
        throw IoError("index out of range");
      }
      frames[t](i, j) = v;
      masks[t](i, j) = true;
    } catch (const std::exception& e) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) +
                    ": " + e.what());
    }
  }
  return MaskedVideo(std::move(frames), std::move(masks));
}

void Manifest::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find('=') != std::string::npos ||
      key.find('\n') != std::string::npos || value.find('\n') != std::string::npos) {
    throw IoError("invalid manifest entry '" + key + "'");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void Manifest::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

const std::string* Manifest::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::string text;
  for (const auto& [k, v] : entries_) text += k + "=" + v + "\n";
  dump(path, text);
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) +
                    " is not key=value");
    }
    manifest.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return manifest;
}

}  // namespace vista::io
