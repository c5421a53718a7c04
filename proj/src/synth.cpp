#include "rcook/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rcook/prng.hpp"

namespace rcook {

namespace {

constexpr double kCorrelationLength = 8.0;  // pixels
constexpr Index kBlobQuota = 64;            // max pixels marked per blob

// Substream tags under the scene seed.
enum : std::uint64_t {
  kStreamField = 1,
  kStreamCoeffs = 2,
  kStreamNoise = 3,
  kStreamBlobs = 4,
};

// White noise smoothed by a separable Gaussian (truncated at 3 lengths,
// border taps renormalized), then standardized to zero mean, unit variance.
Eigen::VectorXd smooth_field(int rows, int cols, std::uint64_t seed) {
  const int radius = static_cast<int>(std::ceil(3.0 * kCorrelationLength));
  Eigen::VectorXd taps(2 * radius + 1);
  for (int t = -radius; t <= radius; ++t)
    taps[t + radius] = std::exp(-0.5 * (t * t) /
                                (kCorrelationLength * kCorrelationLength));

  Eigen::MatrixXd field(rows, cols);
  prng::GaussianStream g(seed);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) field(r, c) = g.next();

  Eigen::MatrixXd tmp(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0, wsum = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        const int cc = c + t;
        if (cc < 0 || cc >= cols) continue;
        acc += taps[t + radius] * field(r, cc);
        wsum += taps[t + radius];
      }
      tmp(r, c) = acc / wsum;
    }
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0, wsum = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        const int rr = r + t;
        if (rr < 0 || rr >= rows) continue;
        acc += taps[t + radius] * tmp(rr, c);
        wsum += taps[t + radius];
      }
      field(r, c) = acc / wsum;
    }

  Eigen::VectorXd flat(static_cast<Index>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      flat[static_cast<Index>(r) * cols + c] = field(r, c);
  const double mean = flat.mean();
  const double var = (flat.array() - mean).square().mean();
  const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  return (flat.array() - mean) * scale;
}

struct PervasiveCoeffs {
  Eigen::MatrixXd linear;    // d x d
  Eigen::VectorXd mix;       // d, shared projection for the nonlinear term
  Eigen::VectorXd strength;  // d, per-band nonlinear amplitude
  Eigen::VectorXd phase;     // d, SinusoidMix only
};

PervasiveCoeffs draw_coeffs(int d, std::uint64_t seed) {
  prng::GaussianStream g(seed);
  PervasiveCoeffs c;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  c.linear.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c.linear(i, j) = g.next() * inv_sqrt_d;
  c.mix.resize(d);
  for (int i = 0; i < d; ++i) c.mix[i] = g.next() * inv_sqrt_d;
  c.strength.resize(d);
  for (int i = 0; i < d; ++i) c.strength[i] = g.next() * 0.5;
  c.phase.resize(d);
  prng::SplitMix64 u(prng::derive(seed, 1));
  for (int i = 0; i < d; ++i)
    c.phase[i] = u.next_unit() * 2.0 * std::numbers::pi;
  return c;
}

// Marks up to `quota` unmarked cells by a 4-neighbour random walk from
// `start`; returns the cells it marked.
IndexList walk_blob(std::vector<std::uint8_t>& marked, int rows, int cols,
                    Index start, Index quota, prng::SplitMix64& gen) {
  IndexList blob;
  Index cur = start;
  Index steps_left = 50 * quota + 50;
  while (quota > 0 && steps_left-- > 0) {
    if (!marked[static_cast<size_t>(cur)]) {
      marked[static_cast<size_t>(cur)] = 1;
      blob.push_back(cur);
      --quota;
    }
    const int r = static_cast<int>(cur) / cols;
    const int c = static_cast<int>(cur) % cols;
    int rr = r, cc = c;
    switch (gen.next_below(4)) {
      case 0: rr = std::max(0, r - 1); break;
      case 1: rr = std::min(rows - 1, r + 1); break;
      case 2: cc = std::max(0, c - 1); break;
      default: cc = std::min(cols - 1, c + 1); break;
    }
    cur = static_cast<Index>(rr) * cols + cc;
  }
  return blob;
}

}  // namespace

Scene generate(const SceneSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1)
    throw validation_error("generate: raster shape must be positive");
  if (spec.bands < 1) throw validation_error("generate: bands must be >= 1");
  if (spec.noise_sigma < 0.0)
    throw validation_error("generate: noise_sigma must be >= 0");
  if (!(spec.anomaly_fraction > 0.0) || !(spec.anomaly_fraction < 1.0))
    throw validation_error("generate: anomaly_fraction must be in (0,1)");
  if (!(spec.anomaly_strength > 0.0))
    throw validation_error("generate: anomaly_strength must be > 0");
  const Index n = static_cast<Index>(spec.rows) * spec.cols;
  const Index target =
      static_cast<Index>(std::llround(spec.anomaly_fraction * n));
  if (target < 1)
    throw validation_error(
        "generate: anomaly_fraction * pixels is below one pixel");

  const int d = spec.bands;
  Scene scene;
  scene.x.rows = scene.y.rows = scene.truth.rows = spec.rows;
  scene.x.cols = scene.y.cols = scene.truth.cols = spec.cols;
  scene.x.data.resize(n, d);
  for (int b = 0; b < d; ++b)
    scene.x.data.col(b) = smooth_field(
        spec.rows, spec.cols, prng::derive(spec.seed, kStreamField, b));

  const PervasiveCoeffs coeffs =
      draw_coeffs(d, prng::derive(spec.seed, kStreamCoeffs));
  scene.y.data.noalias() = scene.x.data * coeffs.linear.transpose();
  if (spec.pervasive == PervasiveMap::Quadratic) {
    const Eigen::VectorXd u = scene.x.data * coeffs.mix;
    scene.y.data.noalias() += u.array().square().matrix() *
                              coeffs.strength.transpose();
  } else if (spec.pervasive == PervasiveMap::SinusoidMix) {
    const Eigen::VectorXd u = scene.x.data * coeffs.mix;
    for (int b = 0; b < d; ++b)
      scene.y.data.col(b) +=
          coeffs.strength[b] * (2.0 * u.array() + coeffs.phase[b]).sin().matrix();
  }

  if (spec.noise_sigma > 0.0) {
    prng::GaussianStream g(prng::derive(spec.seed, kStreamNoise));
    for (Index i = 0; i < n; ++i)
      for (int b = 0; b < d; ++b)
        scene.y.data(i, b) += spec.noise_sigma * g.next();
  }

  // contiguous blobs (seeded random walks) until exactly `target` pixels
  // are marked; each blob shifts Y along its own unit direction
  scene.truth.data.assign(static_cast<size_t>(n), 0);
  prng::SplitMix64 walker(prng::derive(spec.seed, kStreamBlobs));
  prng::GaussianStream dirs(prng::derive(spec.seed, kStreamBlobs, 1));
  Index marked_total = 0;
  while (marked_total < target) {
    Index start = static_cast<Index>(walker.next_below(
        static_cast<std::uint64_t>(n)));
    while (scene.truth.data[static_cast<size_t>(start)])
      start = (start + 1) % n;
    const Index quota = std::min(kBlobQuota, target - marked_total);
    const IndexList blob =
        walk_blob(scene.truth.data, spec.rows, spec.cols, start, quota, walker);
    marked_total += static_cast<Index>(blob.size());

    Eigen::VectorXd dir(d);
    for (int b = 0; b < d; ++b) dir[b] = dirs.next();
    const double norm = dir.norm();
    if (norm > 0.0) dir /= norm;
    for (Index pix : blob)
      scene.y.data.row(pix) += spec.anomaly_strength * dir.transpose();
  }

  validate(scene.x);
  validate(scene.y);
  return scene;
}

namespace {

PervasiveMap pervasive_from_string(const std::string& s) {
  if (s == "linear") return PervasiveMap::Linear;
  if (s == "quadratic") return PervasiveMap::Quadratic;
  if (s == "sinusoid_mix") return PervasiveMap::SinusoidMix;
  throw validation_error("scene spec: unknown pervasive map '" + s +
                         "' (expected linear, quadratic or sinusoid_mix)");
}

std::string pervasive_to_string(PervasiveMap m) {
  switch (m) {
    case PervasiveMap::Linear: return "linear";
    case PervasiveMap::Quadratic: return "quadratic";
    default: return "sinusoid_mix";
  }
}

}  // namespace

SceneSpec scene_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("scene spec: bad json: ") + e.what());
  }
  try {
    SceneSpec spec;
    spec.rows = j.at("rows").get<int>();
    spec.cols = j.at("cols").get<int>();
    spec.bands = j.at("bands").get<int>();
    spec.pervasive =
        pervasive_from_string(j.at("pervasive").get<std::string>());
    spec.noise_sigma = j.at("noise_sigma").get<double>();
    spec.anomaly_fraction = j.at("anomaly_fraction").get<double>();
    spec.anomaly_strength = j.at("anomaly_strength").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("scene spec: missing or mistyped field: ") +
                           e.what());
  }
}

std::string scene_spec_to_json(const SceneSpec& spec) {
  nlohmann::json j;
  j["rows"] = spec.rows;
  j["cols"] = spec.cols;
  j["bands"] = spec.bands;
  j["pervasive"] = pervasive_to_string(spec.pervasive);
  j["noise_sigma"] = spec.noise_sigma;
  j["anomaly_fraction"] = spec.anomaly_fraction;
  j["anomaly_strength"] = spec.anomaly_strength;
  j["seed"] = spec.seed;
  return j.dump(2);
}

}  // namespace rcook
