#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>

#include "rcook/prng.hpp"
#include "rcook/types.hpp"

namespace rcook::test {

// Fresh directory under the system temp root; removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("rcook-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path file(const std::string& name) const {
    return path / name;
  }
};

inline Eigen::MatrixXd random_matrix(Index rows, Index cols,
                                     std::uint64_t seed) {
  prng::GaussianStream g(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = g.next();
  return m;
}

// n pixels as a degenerate n x 1 raster.
inline PixelMatrix random_pixels(Index n, Index d, std::uint64_t seed) {
  PixelMatrix m;
  m.rows = static_cast<int>(n);
  m.cols = 1;
  m.data = random_matrix(n, d, seed);
  return m;
}

inline ScoreMap make_scores(std::initializer_list<double> vals) {
  ScoreMap s;
  s.rows = static_cast<int>(vals.size());
  s.cols = 1;
  s.scores.resize(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double v : vals) s.scores[i++] = v;
  return s;
}

inline Mask make_mask(std::initializer_list<int> vals) {
  Mask m;
  m.rows = static_cast<int>(vals.size());
  m.cols = 1;
  for (int v : vals) m.data.push_back(v ? 1 : 0);
  return m;
}

}  // namespace rcook::test
