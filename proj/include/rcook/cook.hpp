#pragma once

#include "rcook/regression.hpp"
#include "rcook/types.hpp"

namespace rcook {

// Classical uses the (1 - h)^2 deletion-consistent denominator; PaperLiteral
// keeps the (1 - h^2) form with a squared variance scale.
enum class CookVariant { Classical, PaperLiteral };

// Training residual variances below this floor count as numerically zero
// and are clamped before scoring. s2 is a common factor of every score, so
// the clamp never changes their ranking.
inline constexpr double kVarianceFloor = 1e-12;

// Leverages at or above 1 - 1e-12 are clamped to that bound instead of
// blowing the score up to infinity; the affected pixel indices come back in
// `saturated`.
struct CookScores {
  ScoreMap scores;
  IndexList saturated;
};

// Classical:    D_i = ||e_i||^2 h_i / (d_out s2   (1 - h_i)^2)
// PaperLiteral: D_i = ||e_i||^2 h_i / (d_out s2^2 (1 - h_i^2))
CookScores cook_scores(const PixelMatrix& e, const Eigen::VectorXd& h,
                       Index d_out, double s2, CookVariant variant);

// Brute-force route: refits the unregularized model on the n-1 remaining
// rows and sums the squared prediction shifts over all n original rows,
// scaled by d_out * s2. Certifies the closed form; deliberately solves its
// own normal equations instead of reusing a fitted model.
double cook_deletion_oracle(const DesignMatrix& xd, const PixelMatrix& y,
                            Index i, Index d_out, double s2);

}  // namespace rcook
