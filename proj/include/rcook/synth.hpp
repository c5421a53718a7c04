#pragma once

#include <cstdint>
#include <string>

#include "rcook/types.hpp"

namespace rcook {

// Pixelwise map carrying the scene-wide change from X to Y.
enum class PervasiveMap { Linear, Quadratic, SinusoidMix };

struct SceneSpec {
  int rows = 0;
  int cols = 0;
  int bands = 1;
  PervasiveMap pervasive = PervasiveMap::Linear;
  double noise_sigma = 0.0;
  double anomaly_fraction = 0.01;  // in (0,1), at least one pixel's worth
  double anomaly_strength = 1.0;
  std::uint64_t seed = 0;
};

struct Scene {
  PixelMatrix x;
  PixelMatrix y;
  Mask truth;
};

// X: per-band smooth Gaussian random field (correlation length 8 px).
// Y: pervasive map of X plus iid noise, with contiguous anomalous blobs
// additionally shifted along a per-blob random unit direction in band
// space. truth marks exactly the blob pixels.
Scene generate(const SceneSpec& spec);

SceneSpec scene_spec_from_json(const std::string& text);
std::string scene_spec_to_json(const SceneSpec& spec);

}  // namespace rcook
