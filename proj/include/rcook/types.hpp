#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rcook {

// Bad inputs (shapes, ranges, degenerate configurations).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable, unwritable or corrupt files.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// One image flattened to pixel rows: n = rows*cols pixels, d spectral bands.
// Pixel i sits at raster position (i / cols, i % cols).
struct PixelMatrix {
  Eigen::MatrixXd data;  // n x d
  int rows = 0;
  int cols = 0;

  Index n() const { return data.rows(); }
  Index bands() const { return data.cols(); }
};

// Per-pixel boolean labels on the same raster grid.
struct Mask {
  std::vector<std::uint8_t> data;  // n entries, nonzero = true
  int rows = 0;
  int cols = 0;

  Index n() const { return static_cast<Index>(data.size()); }
  Index count_true() const;
};

// Per-pixel anomaly scores aligned to the raster grid.
struct ScoreMap {
  Eigen::VectorXd scores;  // n entries, finite and >= 0
  int rows = 0;
  int cols = 0;

  Index n() const { return scores.size(); }
};

void validate(const PixelMatrix& m);
void validate(const Mask& m);
void validate(const ScoreMap& s);

}  // namespace rcook
