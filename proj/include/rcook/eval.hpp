#pragma once

#include <filesystem>
#include <vector>

#include "rcook/types.hpp"

namespace rcook {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // classify positive when score >= threshold
};

// Vertices run from (0,0) at threshold +inf to (1,1) at the minimum score,
// one vertex per unique score value; auc is their trapezoidal integral,
// which with grouped ties equals the Mann-Whitney statistic.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

RocCurve roc(const ScoreMap& scores, const Mask& truth);

// Vertex nearest to (0,1); ties broken by lower fpr, then higher threshold.
RocPoint best_operating_point(const RocCurve& r);

Mask apply_threshold(const ScoreMap& scores, double t);

// CSV: header fpr,tpr,threshold, one row per vertex, trailing auc=<value>
// row. CRLF line endings, shortest round-trip floats.
void export_roc_csv(const RocCurve& r, const std::filesystem::path& path);

}  // namespace rcook
