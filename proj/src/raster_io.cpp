#include "rcook/raster_io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace rcook {

namespace {

constexpr std::array<char, 6> kMagic = {'C', 'C', 'M', 'X', '1', '\0'};

void put_u32_le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                     static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& in, const std::filesystem::path& path,
                         const char* field) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw io_error(path.string() + ": truncated header while reading " +
                   field);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

void put_f64_le(std::ostream& out, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(u >> (8 * i));
  out.write(b, 8);
}

double get_f64_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw io_error(path.string() + ": truncated payload");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open for reading");
  return in;
}

// Skips PGM whitespace and '#' comment lines, then reads one unsigned token.
unsigned pgm_token(std::istream& in, const std::filesystem::path& path,
                   const char* field) {
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c))
    throw io_error(path.string() + ": malformed PGM header at " + field);
  unsigned v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + unsigned(c - '0');
    if (v > 1u << 30)
      throw io_error(path.string() + ": PGM header field " + field +
                     " out of range");
    c = in.get();
  }
  // the single whitespace after the last header token was just consumed
  return v;
}

}  // namespace

void save_matrix(const PixelMatrix& m, const std::filesystem::path& path) {
  validate(m);
  auto out = open_out(path);
  out.write(kMagic.data(), kMagic.size());
  put_u32_le(out, static_cast<std::uint32_t>(m.rows));
  put_u32_le(out, static_cast<std::uint32_t>(m.cols));
  put_u32_le(out, static_cast<std::uint32_t>(m.bands()));
  for (Index i = 0; i < m.n(); ++i)
    for (Index j = 0; j < m.bands(); ++j) put_f64_le(out, m.data(i, j));
  if (!out) throw io_error(path.string() + ": write failed");
}

PixelMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::array<char, 6> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw io_error(path.string() + ": bad magic, not a CCMX1 matrix file");
  const std::uint32_t rows = get_u32_le(in, path, "rows");
  const std::uint32_t cols = get_u32_le(in, path, "cols");
  const std::uint32_t bands = get_u32_le(in, path, "bands");
  if (rows == 0 || cols == 0)
    throw io_error(path.string() + ": header field " +
                   (rows == 0 ? "rows" : "cols") + " is zero");
  if (bands == 0) throw io_error(path.string() + ": header field bands is zero");
  const std::uint64_t n = std::uint64_t(rows) * cols;
  if (n * bands > (1ull << 32))
    throw io_error(path.string() + ": header shape too large");

  PixelMatrix m;
  m.rows = static_cast<int>(rows);
  m.cols = static_cast<int>(cols);
  m.data.resize(static_cast<Index>(n), static_cast<Index>(bands));
  for (Index i = 0; i < m.n(); ++i)
    for (Index j = 0; j < m.bands(); ++j) {
      const double v = get_f64_le(in, path);
      if (!std::isfinite(v))
        throw io_error(path.string() + ": non-finite value at pixel " +
                       std::to_string(i) + " band " + std::to_string(j));
      m.data(i, j) = v;
    }
  char extra;
  if (in.read(&extra, 1))
    throw io_error(path.string() + ": trailing bytes after payload");
  return m;
}

void save_mask(const Mask& m, const std::filesystem::path& path) {
  validate(m);
  auto out = open_out(path);
  out << "P5\n" << m.cols << " " << m.rows << "\n255\n";
  std::vector<char> row(static_cast<size_t>(m.n()));
  for (Index i = 0; i < m.n(); ++i)
    row[static_cast<size_t>(i)] = m.data[static_cast<size_t>(i)] ? '\xff' : '\0';
  out.write(row.data(), static_cast<std::streamsize>(row.size()));
  if (!out) throw io_error(path.string() + ": write failed");
}

Mask load_mask(const std::filesystem::path& path) {
  auto in = open_in(path);
  char p, five;
  if (!in.get(p) || !in.get(five) || p != 'P' || five != '5')
    throw io_error(path.string() + ": not a binary PGM (P5) file");
  const unsigned cols = pgm_token(in, path, "width");
  const unsigned rows = pgm_token(in, path, "height");
  const unsigned maxval = pgm_token(in, path, "maxval");
  if (maxval == 0 || maxval > 255)
    throw io_error(path.string() + ": unsupported PGM maxval " +
                   std::to_string(maxval));
  Mask m;
  m.rows = static_cast<int>(rows);
  m.cols = static_cast<int>(cols);
  const std::uint64_t n = std::uint64_t(rows) * cols;
  if (rows == 0 || cols == 0 || n > (1ull << 32))
    throw io_error(path.string() + ": bad PGM dimensions");
  std::vector<char> raw(static_cast<size_t>(n));
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
    throw io_error(path.string() + ": truncated PGM payload");
  m.data.resize(static_cast<size_t>(n));
  for (size_t i = 0; i < raw.size(); ++i)
    m.data[i] = static_cast<unsigned char>(raw[i]) != 0 ? 1 : 0;
  return m;
}

void save_heatmap(const ScoreMap& s, const std::filesystem::path& path) {
  validate(s);
  const double lo = s.scores.minCoeff();
  const double hi = s.scores.maxCoeff();
  const double span = hi - lo;
  auto out = open_out(path);
  out << "P5\n" << s.cols << " " << s.rows << "\n255\n";
  std::vector<char> px(static_cast<size_t>(s.n()));
  for (Index i = 0; i < s.n(); ++i) {
    double level = 0.0;
    if (span > 0.0) level = std::floor((s.scores[i] - lo) / span * 255.0 + 0.5);
    px[static_cast<size_t>(i)] =
        static_cast<char>(static_cast<unsigned char>(level));
  }
  out.write(px.data(), static_cast<std::streamsize>(px.size()));
  if (!out) throw io_error(path.string() + ": write failed");
}

void save_scores(const ScoreMap& s, const std::filesystem::path& path) {
  validate(s);
  PixelMatrix m;
  m.rows = s.rows;
  m.cols = s.cols;
  m.data = s.scores;
  save_matrix(m, path);
}

ScoreMap load_scores(const std::filesystem::path& path) {
  PixelMatrix m = load_matrix(path);
  if (m.bands() != 1)
    throw io_error(path.string() + ": score map must have bands = 1, got " +
                   std::to_string(m.bands()));
  ScoreMap s;
  s.rows = m.rows;
  s.cols = m.cols;
  s.scores = m.data.col(0);
  validate(s);
  return s;
}

}  // namespace rcook
