#include "rcook/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

namespace rcook {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RocCurve roc(const ScoreMap& scores, const Mask& truth) {
  validate(scores);
  validate(truth);
  if (scores.n() != truth.n())
    throw validation_error("roc: " + std::to_string(scores.n()) +
                           " scores vs " + std::to_string(truth.n()) +
                           " truth pixels");
  const Index n = scores.n();
  const Index n_pos = truth.count_true();
  const Index n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw validation_error("roc: degenerate truth (" + std::to_string(n_pos) +
                           " positives, " + std::to_string(n_neg) +
                           " negatives)");

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return scores.scores[a] > scores.scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  Index tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    const double v = scores.scores[order[i]];
    // all pixels tied at this score enter together: one vertex per value
    while (i < order.size() && scores.scores[order[i]] == v) {
      if (truth.data[static_cast<size_t>(order[i])])
        ++tp;
      else
        ++fp;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / n_neg,
                            static_cast<double>(tp) / n_pos, v});
  }

  double auc = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

RocPoint best_operating_point(const RocCurve& r) {
  if (r.points.empty())
    throw validation_error("best_operating_point: empty curve");
  RocPoint best = r.points.front();
  double best_d2 = best.fpr * best.fpr + (1.0 - best.tpr) * (1.0 - best.tpr);
  for (const auto& pt : r.points) {
    const double d2 = pt.fpr * pt.fpr + (1.0 - pt.tpr) * (1.0 - pt.tpr);
    const bool better =
        d2 < best_d2 ||
        (d2 == best_d2 &&
         (pt.fpr < best.fpr ||
          (pt.fpr == best.fpr && pt.threshold > best.threshold)));
    if (better) {
      best = pt;
      best_d2 = d2;
    }
  }
  return best;
}

Mask apply_threshold(const ScoreMap& scores, double t) {
  validate(scores);
  Mask m;
  m.rows = scores.rows;
  m.cols = scores.cols;
  m.data.resize(static_cast<size_t>(scores.n()));
  for (Index i = 0; i < scores.n(); ++i)
    m.data[static_cast<size_t>(i)] = scores.scores[i] >= t ? 1 : 0;
  return m;
}

void export_roc_csv(const RocCurve& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  out << "fpr,tpr,threshold\r\n";
  for (const auto& pt : r.points)
    out << shortest(pt.fpr) << "," << shortest(pt.tpr) << ","
        << shortest(pt.threshold) << "\r\n";
  out << "auc=" << shortest(r.auc) << "\r\n";
  if (!out) throw io_error(path.string() + ": write failed");
}

}  // namespace rcook
