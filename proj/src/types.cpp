#include "rcook/types.hpp"

#include <string>

namespace rcook {

Index Mask::count_true() const {
  Index c = 0;
  for (auto v : data) c += v != 0;
  return c;
}

namespace {

void check_raster_shape(Index n, int rows, int cols, const char* what) {
  if (rows < 1 || cols < 1)
    throw validation_error(std::string(what) + ": raster shape " +
                           std::to_string(rows) + "x" + std::to_string(cols) +
                           " is not positive");
  if (n != static_cast<Index>(rows) * cols)
    throw validation_error(std::string(what) + ": " + std::to_string(n) +
                           " pixels do not fill a " + std::to_string(rows) +
                           "x" + std::to_string(cols) + " raster");
}

}  // namespace

void validate(const PixelMatrix& m) {
  check_raster_shape(m.n(), m.rows, m.cols, "PixelMatrix");
  if (m.bands() < 1) throw validation_error("PixelMatrix: bands must be >= 1");
  if (!m.data.allFinite())
    throw validation_error("PixelMatrix: data contains non-finite values");
}

void validate(const Mask& m) {
  check_raster_shape(m.n(), m.rows, m.cols, "Mask");
}

void validate(const ScoreMap& s) {
  check_raster_shape(s.n(), s.rows, s.cols, "ScoreMap");
  if (!s.scores.allFinite())
    throw validation_error("ScoreMap: scores contain non-finite values");
  if ((s.scores.array() < 0.0).any())
    throw validation_error("ScoreMap: scores must be non-negative");
}

}  // namespace rcook
