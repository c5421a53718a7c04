#pragma once

#include <string>

#include "rcook/types.hpp"

namespace rcook {

// Feature matrix ready for the normal equations. Carries the raster shape
// of the image it was built from so score maps can be reassembled.
struct DesignMatrix {
  Eigen::MatrixXd data;  // n x p, last column all ones when built by augment
  int rows = 0;
  int cols = 0;

  Index n() const { return data.rows(); }
  Index p() const { return data.cols(); }
};

// Fitted ridge regression. gram_inverse is kept explicitly because the
// leverage of every scored pixel needs it row by row.
struct LinearModel {
  Eigen::MatrixXd weights;       // p x d_out
  Eigen::MatrixXd gram_inverse;  // (Xd'Xd + lambda I)^-1, p x p
  double lambda = 0.0;
  double mse = 0.0;  // s^2 = sum_i ||e_i||^2 / (d_out (n - p)); 0 when dof <= 0
  Index p = 0;
  Index d_out = 0;
};

// [X, 1]: appends the bias column.
DesignMatrix augment(const PixelMatrix& x);

// Normal-equations solve of (Xd'Xd + lambda I) W = Xd'Y. lambda hits every
// diagonal entry, bias row included; lambda = 0 is the plain least-squares
// solution. Throws on a singular or indefinite Gram.
LinearModel fit(const DesignMatrix& xd, const PixelMatrix& y, double lambda);

// Same model, Gram and Xd'Y accumulated over a row subset only.
LinearModel fit_rows(const DesignMatrix& xd, const PixelMatrix& y,
                     const IndexList& rows, double lambda);

PixelMatrix predict(const LinearModel& m, const DesignMatrix& xd);

PixelMatrix residuals(const PixelMatrix& y, const PixelMatrix& yhat);

// h_i = x_i' gram_inverse x_i for every row of xd (training or not).
Eigen::VectorXd leverages(const LinearModel& m, const DesignMatrix& xd);

// s^2 = sum_i ||e_i||^2 / (d (n - p)). Throws when d (n - p) <= 0.
double residual_variance(const PixelMatrix& e, Index p);

// Per-band affine normalization frozen on the training rows; constant bands
// keep scale 1 so the transform stays invertible.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};
Standardizer fit_standardizer(const Eigen::MatrixXd& data,
                              const IndexList& rows);
Eigen::MatrixXd apply_standardizer(const Standardizer& s,
                                   const Eigen::MatrixXd& data);

std::string model_to_json(const LinearModel& m);
LinearModel model_from_json(const std::string& text);

}  // namespace rcook
