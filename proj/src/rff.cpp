#include "rcook/rff.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "rcook/prng.hpp"

namespace rcook {

namespace {

constexpr Index kRowBlock = 8192;

// Fills out.cols [0, 2D) with the interleaved cos/sin features, block of
// rows at a time so the projection scratch stays small.
void fill_features(const RffMap& map, const Eigen::MatrixXd& x,
                   Eigen::MatrixXd& out) {
  const Index n = x.rows();
  const Index D = map.feature_count;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(D));
  Eigen::MatrixXd proj(std::min(kRowBlock, n), D);
  for (Index r0 = 0; r0 < n; r0 += kRowBlock) {
    const Index len = std::min(kRowBlock, n - r0);
    proj.topRows(len).noalias() =
        x.middleRows(r0, len) * map.frequencies.transpose();
    for (Index k = 0; k < D; ++k) {
      out.col(2 * k).segment(r0, len) =
          proj.col(k).head(len).array().cos() * inv_sqrt_d;
      out.col(2 * k + 1).segment(r0, len) =
          proj.col(k).head(len).array().sin() * inv_sqrt_d;
    }
  }
}

void check_input(const RffMap& map, const PixelMatrix& x) {
  if (x.bands() != map.input_dim)
    throw validation_error("rff transform: input has d=" +
                           std::to_string(x.bands()) + " but map expects d=" +
                           std::to_string(map.input_dim));
}

}  // namespace

RffMap sample_map(Index d, Index D, double sigma, std::uint64_t seed) {
  if (d < 1) throw validation_error("sample_map: d must be >= 1");
  if (D < 1) throw validation_error("sample_map: D must be >= 1");
  if (!(sigma > 0.0)) throw validation_error("sample_map: sigma must be > 0");

  RffMap map;
  map.sigma = sigma;
  map.feature_count = D;
  map.input_dim = d;
  map.seed = seed;
  map.frequencies.resize(D, d);
  prng::GaussianStream normals(seed);
  const double inv_sigma = 1.0 / sigma;
  // row-major fill order is part of the stream contract
  for (Index k = 0; k < D; ++k)
    for (Index j = 0; j < d; ++j)
      map.frequencies(k, j) = normals.next() * inv_sigma;
  return map;
}

PixelMatrix transform(const RffMap& map, const PixelMatrix& x) {
  validate(x);
  check_input(map, x);
  PixelMatrix z;
  z.rows = x.rows;
  z.cols = x.cols;
  z.data.resize(x.n(), 2 * map.feature_count);
  fill_features(map, x.data, z.data);
  return z;
}

DesignMatrix rff_design(const RffMap& map, const PixelMatrix& x) {
  validate(x);
  check_input(map, x);
  DesignMatrix d;
  d.rows = x.rows;
  d.cols = x.cols;
  d.data.resize(x.n(), 2 * map.feature_count + 1);
  fill_features(map, x.data, d.data);
  d.data.col(2 * map.feature_count).setOnes();
  return d;
}

std::string rff_to_json(const RffMap& map) {
  nlohmann::json j;
  j["seed"] = map.seed;
  j["sigma"] = map.sigma;
  j["D"] = map.feature_count;
  j["d"] = map.input_dim;
  j["prng_version"] = std::string(prng::kVersion);
  return j.dump(2);
}

RffMap rff_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto version = j.at("prng_version").get<std::string>();
  if (version != prng::kVersion)
    throw validation_error("rff map was archived under PRNG version '" +
                           version + "', this build provides '" +
                           std::string(prng::kVersion) + "'");
  return sample_map(j.at("d").get<Index>(), j.at("D").get<Index>(),
                    j.at("sigma").get<double>(),
                    j.at("seed").get<std::uint64_t>());
}

}  // namespace rcook
