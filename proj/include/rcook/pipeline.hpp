#pragma once

#include <cstdint>
#include <string>

#include "rcook/cook.hpp"
#include "rcook/eval.hpp"
#include "rcook/types.hpp"

namespace rcook {

enum class DetectorMethod { Cook, RCook };

struct DetectorConfig {
  DetectorMethod method = DetectorMethod::Cook;
  CookVariant variant = CookVariant::Classical;
  double lambda = 0.0;
  double sigma = 1.0;   // RCook only
  Index rff_dim = 100;  // D, RCook only
  std::uint64_t seed = 0;
  bool standardize = true;
};

struct DetectResult {
  ScoreMap scores;
  IndexList saturated;  // pixels whose leverage hit the clamp
};

// Standardize on the training rows, fit there, score every pixel of the
// image: training pixels with their training leverages, the rest with the
// out-of-sample leverage under the same training Gram inverse; s2 comes
// from the training residuals.
DetectResult detect(const PixelMatrix& x, const PixelMatrix& y,
                    const DetectorConfig& cfg, const IndexList& train_idx);

struct ExperimentReport {
  DetectorConfig cfg;
  Index n_pixels = 0;
  Index n_samples = 0;
  Index train_count = 0;
  Index test_count = 0;
  double auc_train = 0.0;
  double auc_test = 0.0;
  double auc_full = 0.0;
  RocPoint operating_point;  // nearest to (0,1) on the full-image curve
  Index saturated_count = 0;
  ScoreMap scores;
  RocCurve roc_full;
};

// Samples n_samples pixels, splits them train/test, fits on the training
// part and evaluates the scores on the training subset, the held-out
// subset and the full image. Deterministic per (seed, cfg).
ExperimentReport run_experiment(const PixelMatrix& x, const PixelMatrix& y,
                                const Mask& truth, const DetectorConfig& cfg,
                                Index n_samples, std::uint64_t seed,
                                double train_fraction = 0.5);

std::string report_to_json(const ExperimentReport& r);

}  // namespace rcook
