#include "rcook/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "rcook/prng.hpp"
#include "rcook/regression.hpp"
#include "rcook/rff.hpp"
#include "rcook/tune.hpp"

namespace rcook {

namespace {

// Substream tags under the detector seed.
enum : std::uint64_t {
  kStreamMap = 21,
};

void check_pair(const PixelMatrix& x, const PixelMatrix& y) {
  validate(x);
  validate(y);
  if (x.n() != y.n() || x.rows != y.rows || x.cols != y.cols)
    throw validation_error("detect: images do not share a raster grid");
}

}  // namespace

DetectResult detect(const PixelMatrix& x, const PixelMatrix& y,
                    const DetectorConfig& cfg, const IndexList& train_idx) {
  check_pair(x, y);
  if (train_idx.empty())
    throw validation_error("detect: empty training index set");
  {
    IndexList sorted = train_idx;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= x.n())
      throw validation_error("detect: training index out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw validation_error("detect: duplicate training index");
  }
  if (cfg.method == DetectorMethod::RCook) {
    if (!(cfg.sigma > 0.0))
      throw validation_error("detect: rcook requires sigma > 0");
    if (cfg.rff_dim < 1)
      throw validation_error("detect: rcook requires D >= 1");
  }

  PixelMatrix xs = x, ys = y;
  if (cfg.standardize) {
    xs.data = apply_standardizer(fit_standardizer(x.data, train_idx), x.data);
    ys.data = apply_standardizer(fit_standardizer(y.data, train_idx), y.data);
  }

  DesignMatrix design;
  if (cfg.method == DetectorMethod::Cook) {
    design = augment(xs);
  } else {
    const RffMap map = sample_map(x.bands(), cfg.rff_dim, cfg.sigma,
                                  prng::derive(cfg.seed, kStreamMap));
    design = rff_design(map, xs);
  }

  if (static_cast<Index>(train_idx.size()) <= design.p())
    throw validation_error(
        "detect: training set of " + std::to_string(train_idx.size()) +
        " rows cannot scale Cook scores for p=" + std::to_string(design.p()) +
        " features; enlarge it or lower D");

  const LinearModel model = fit_rows(design, ys, train_idx, cfg.lambda);
  const double s2 = std::max(model.mse, kVarianceFloor);

  const Eigen::VectorXd h = leverages(model, design);
  const PixelMatrix e = residuals(ys, predict(model, design));
  CookScores scored = cook_scores(e, h, ys.bands(), s2, cfg.variant);

  DetectResult out;
  out.scores = std::move(scored.scores);
  out.saturated = std::move(scored.saturated);
  return out;
}

namespace {

ScoreMap subset_scores(const ScoreMap& all, const IndexList& idx) {
  ScoreMap s;
  s.rows = static_cast<int>(idx.size());
  s.cols = 1;
  s.scores.resize(static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k)
    s.scores[static_cast<Index>(k)] = all.scores[idx[k]];
  return s;
}

Mask subset_mask(const Mask& all, const IndexList& idx) {
  Mask m;
  m.rows = static_cast<int>(idx.size());
  m.cols = 1;
  m.data.resize(idx.size());
  for (size_t k = 0; k < idx.size(); ++k)
    m.data[k] = all.data[static_cast<size_t>(idx[k])];
  return m;
}

}  // namespace

ExperimentReport run_experiment(const PixelMatrix& x, const PixelMatrix& y,
                                const Mask& truth, const DetectorConfig& cfg,
                                Index n_samples, std::uint64_t seed,
                                double train_fraction) {
  check_pair(x, y);
  validate(truth);
  if (truth.n() != x.n())
    throw validation_error("run_experiment: truth does not match the raster");

  const SampledScene sample = sample_pixels(x, y, truth, n_samples, seed);
  const Split split = split_at_fraction(n_samples, train_fraction);

  IndexList train_orig(split.train.size()), test_orig(split.test.size());
  for (size_t k = 0; k < split.train.size(); ++k)
    train_orig[k] = sample.indices[static_cast<size_t>(split.train[k])];
  for (size_t k = 0; k < split.test.size(); ++k)
    test_orig[k] = sample.indices[static_cast<size_t>(split.test[k])];

  DetectResult det = detect(x, y, cfg, train_orig);

  ExperimentReport report;
  report.cfg = cfg;
  report.n_pixels = x.n();
  report.n_samples = n_samples;
  report.train_count = static_cast<Index>(train_orig.size());
  report.test_count = static_cast<Index>(test_orig.size());
  report.saturated_count = static_cast<Index>(det.saturated.size());
  report.auc_train =
      roc(subset_scores(det.scores, train_orig), subset_mask(truth, train_orig))
          .auc;
  report.auc_test =
      roc(subset_scores(det.scores, test_orig), subset_mask(truth, test_orig))
          .auc;
  report.roc_full = roc(det.scores, truth);
  report.auc_full = report.roc_full.auc;
  report.operating_point = best_operating_point(report.roc_full);
  report.scores = std::move(det.scores);
  return report;
}

std::string report_to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["config"] = {
      {"method", r.cfg.method == DetectorMethod::Cook ? "cook" : "rcook"},
      {"variant", r.cfg.variant == CookVariant::Classical ? "classical"
                                                          : "paper-literal"},
      {"lambda", r.cfg.lambda},
      {"seed", r.cfg.seed},
      {"standardize", r.cfg.standardize},
  };
  if (r.cfg.method == DetectorMethod::RCook) {
    j["config"]["sigma"] = r.cfg.sigma;
    j["config"]["D"] = r.cfg.rff_dim;
  }
  j["n_pixels"] = r.n_pixels;
  j["n_samples"] = r.n_samples;
  j["train_count"] = r.train_count;
  j["test_count"] = r.test_count;
  j["saturated_count"] = r.saturated_count;
  j["prng_version"] = std::string(prng::kVersion);
  j["evaluation"] = {
      {"auc_train", r.auc_train},
      {"auc_test", r.auc_test},
      {"auc_full", r.auc_full},
      {"operating_point",
       {{"threshold", r.operating_point.threshold},
        {"fpr", r.operating_point.fpr},
        {"tpr", r.operating_point.tpr}}},
  };
  return j.dump(2);
}

}  // namespace rcook
