#pragma once

#include <cstdint>
#include <string>

#include "rcook/regression.hpp"
#include "rcook/types.hpp"

namespace rcook {

// Frozen Gaussian-kernel random feature map. The frequency matrix is a pure
// function of (seed, D, d, sigma) under the tagged PRNG stream, so only the
// scalars need to be archived.
struct RffMap {
  Eigen::MatrixXd frequencies;  // D x d, rows w_k ~ iid N(0, sigma^-2 I)
  double sigma = 1.0;
  Index feature_count = 0;  // D
  Index input_dim = 0;      // d
  std::uint64_t seed = 0;
};

RffMap sample_map(Index d, Index D, double sigma, std::uint64_t seed);

// Row i: (1/sqrt(D)) [cos(w_1'x_i), sin(w_1'x_i), ..., cos(w_D'x_i),
// sin(w_D'x_i)]. Then z(x)'z(x') is an unbiased estimate of
// exp(-||x - x'||^2 / (2 sigma^2)) and ||z(x)||^2 = 1.
PixelMatrix transform(const RffMap& map, const PixelMatrix& x);

// transform plus the bias column: n x (2D + 1), ready for fit/leverages.
DesignMatrix rff_design(const RffMap& map, const PixelMatrix& x);

std::string rff_to_json(const RffMap& map);
RffMap rff_from_json(const std::string& text);

}  // namespace rcook
