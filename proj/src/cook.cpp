#include "rcook/cook.hpp"

#include <cmath>
#include <string>

namespace rcook {

namespace {

constexpr double kLeverageCeiling = 1.0 - 1e-12;

Eigen::MatrixXd plain_least_squares(const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& y) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.selfadjointView<Eigen::Lower>());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw validation_error(
        "cook_deletion_oracle: Gram became singular after deletion");
  return ldlt.solve(x.transpose() * y);
}

}  // namespace

CookScores cook_scores(const PixelMatrix& e, const Eigen::VectorXd& h,
                       Index d_out, double s2, CookVariant variant) {
  if (e.n() != h.size())
    throw validation_error("cook_scores: " + std::to_string(e.n()) +
                           " residual rows vs " + std::to_string(h.size()) +
                           " leverages");
  if (e.bands() != d_out)
    throw validation_error("cook_scores: residuals have d=" +
                           std::to_string(e.bands()) + " but d_out=" +
                           std::to_string(d_out));
  if (!(s2 > 0.0))
    throw validation_error("cook_scores: s2 must be positive");
  if ((h.array() < 0.0).any())
    throw validation_error("cook_scores: negative leverage");

  CookScores out;
  out.scores.rows = e.rows;
  out.scores.cols = e.cols;
  out.scores.scores.resize(e.n());
  const double dd = static_cast<double>(d_out);
  for (Index i = 0; i < e.n(); ++i) {
    double hi = h[i];
    if (hi >= kLeverageCeiling) {
      hi = kLeverageCeiling;
      out.saturated.push_back(i);
    }
    const double err2 = e.data.row(i).squaredNorm();
    const double denom = variant == CookVariant::Classical
                             ? dd * s2 * (1.0 - hi) * (1.0 - hi)
                             : dd * s2 * s2 * (1.0 - hi * hi);
    out.scores.scores[i] = err2 * hi / denom;
  }
  return out;
}

double cook_deletion_oracle(const DesignMatrix& xd, const PixelMatrix& y,
                            Index i, Index d_out, double s2) {
  const Index n = xd.n();
  const Index p = xd.p();
  if (y.n() != n) throw validation_error("cook_deletion_oracle: row mismatch");
  if (y.bands() != d_out)
    throw validation_error("cook_deletion_oracle: d_out mismatch");
  if (i < 0 || i >= n)
    throw validation_error("cook_deletion_oracle: row index out of range");
  if (n < p + 2)
    throw validation_error("cook_deletion_oracle: needs n >= p + 2");
  if (!(s2 > 0.0))
    throw validation_error("cook_deletion_oracle: s2 must be positive");

  const Eigen::MatrixXd w_full = plain_least_squares(xd.data, y.data);

  Eigen::MatrixXd x_del(n - 1, p);
  Eigen::MatrixXd y_del(n - 1, y.bands());
  x_del.topRows(i) = xd.data.topRows(i);
  y_del.topRows(i) = y.data.topRows(i);
  x_del.bottomRows(n - 1 - i) = xd.data.bottomRows(n - 1 - i);
  y_del.bottomRows(n - 1 - i) = y.data.bottomRows(n - 1 - i);
  const Eigen::MatrixXd w_del = plain_least_squares(x_del, y_del);

  // sum over all n original rows of ||yhat_j - yhat_{j \ i}||^2
  const double shift = (xd.data * (w_full - w_del)).squaredNorm();
  return shift / (static_cast<double>(d_out) * s2);
}

}  // namespace rcook
