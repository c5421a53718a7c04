#include <doctest.h>

#include <cmath>

#include "rcook/regression.hpp"
#include "support/helpers.hpp"

using namespace rcook;

namespace {

PixelMatrix pixels_from(std::initializer_list<std::initializer_list<double>> rows) {
  PixelMatrix m;
  m.rows = static_cast<int>(rows.size());
  m.cols = 1;
  const Index d = static_cast<Index>(rows.begin()->size());
  m.data.resize(static_cast<Index>(rows.size()), d);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m.data(i, j++) = v;
    ++i;
  }
  return m;
}

DesignMatrix intercept_only(Index n) {
  DesignMatrix d;
  d.rows = static_cast<int>(n);
  d.cols = 1;
  d.data = Eigen::MatrixXd::Ones(n, 1);
  return d;
}

}  // namespace

TEST_CASE("augment appends the bias column") {
  const DesignMatrix d = augment(pixels_from({{1, 2}, {3, 4}}));
  Eigen::MatrixXd want(2, 3);
  want << 1, 2, 1, 3, 4, 1;
  CHECK(d.data == want);

  const DesignMatrix single = augment(pixels_from({{5}}));
  CHECK(single.data.rows() == 1);
  CHECK(single.data.cols() == 2);
  CHECK(single.data(0, 0) == 5.0);
  CHECK(single.data(0, 1) == 1.0);

  const DesignMatrix r = augment(test::random_pixels(3, 2, 77));
  CHECK(r.data.rows() == 3);
  CHECK(r.data.cols() == 3);
  CHECK(r.data.col(2) == Eigen::VectorXd::Ones(3));
}

TEST_CASE("fit recovers an exactly linear response") {
  const DesignMatrix xd = augment(test::random_pixels(20, 3, 101));
  const Eigen::MatrixXd w0 = test::random_matrix(4, 2, 102);
  PixelMatrix y;
  y.rows = 20;
  y.cols = 1;
  y.data = xd.data * w0;
  const LinearModel m = fit(xd, y, 0.0);
  CHECK((m.weights - w0).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(m.mse >= 0.0);
  CHECK(m.mse < 1e-16);
  CHECK(m.p == 4);
  CHECK(m.d_out == 2);
}

TEST_CASE("huge ridge shrinks weights to zero") {
  const DesignMatrix xd = augment(test::random_pixels(30, 3, 103));
  PixelMatrix y = test::random_pixels(30, 2, 104);
  const LinearModel m = fit(xd, y, 1e12);
  CHECK(m.weights.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fit matches hand-rolled normal equations on a 6x2 system") {
  // independent route: 2x2 Gram assembled and inverted by adjugate
  const double x[6] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  const double yv[6] = {1.1, 1.9, 3.2, 3.9, 5.1, 7.2};
  double sxx = 0, sx1 = 0, s11 = 0, sxy = 0, s1y = 0;
  for (int i = 0; i < 6; ++i) {
    sxx += x[i] * x[i];
    sx1 += x[i];
    s11 += 1.0;
    sxy += x[i] * yv[i];
    s1y += yv[i];
  }
  const double det = sxx * s11 - sx1 * sx1;
  const double slope = (s11 * sxy - sx1 * s1y) / det;
  const double icept = (-sx1 * sxy + sxx * s1y) / det;

  PixelMatrix px;
  px.rows = 6;
  px.cols = 1;
  px.data.resize(6, 1);
  PixelMatrix py = px;
  for (int i = 0; i < 6; ++i) {
    px.data(i, 0) = x[i];
    py.data(i, 0) = yv[i];
  }
  const LinearModel m = fit(augment(px), py, 0.0);
  CHECK(m.weights(0, 0) == doctest::Approx(slope).epsilon(1e-12));
  CHECK(m.weights(1, 0) == doctest::Approx(icept).epsilon(1e-12));
}

TEST_CASE("predict and residuals behave elementwise") {
  const PixelMatrix x = test::random_pixels(9, 3, 105);
  const DesignMatrix xd = augment(x);

  LinearModel ident;
  ident.p = 4;
  ident.d_out = 3;
  ident.weights = Eigen::MatrixXd::Zero(4, 3);
  ident.weights.topRows(3).setIdentity();
  ident.gram_inverse = Eigen::MatrixXd::Identity(4, 4);
  const PixelMatrix yhat = predict(ident, xd);
  CHECK(yhat.data == x.data);

  ident.weights.setZero();
  CHECK(predict(ident, xd).data.isZero(0.0));

  const PixelMatrix y = test::random_pixels(9, 3, 106);
  CHECK(residuals(y, y).data.isZero(0.0));
  PixelMatrix zero = y;
  zero.data.setZero();
  CHECK(residuals(y, zero).data == y.data);
  const PixelMatrix e = residuals(y, x);
  CHECK(e.data == (y.data - x.data));

  PixelMatrix ybad = y;
  ybad.data.conservativeResize(9, 2);
  CHECK_THROWS_AS(residuals(y, ybad), validation_error);
}

TEST_CASE("exact-fit model reproduces its training responses") {
  const DesignMatrix xd = augment(test::random_pixels(15, 2, 107));
  PixelMatrix y;
  y.rows = 15;
  y.cols = 1;
  y.data = xd.data * test::random_matrix(3, 2, 108);
  const LinearModel m = fit(xd, y, 0.0);
  CHECK((predict(m, xd).data - y.data).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("intercept-only leverages are 1/n") {
  const Index n = 7;
  const DesignMatrix xd = intercept_only(n);
  const PixelMatrix y = test::random_pixels(n, 1, 109);
  const LinearModel m = fit(xd, y, 0.0);
  const Eigen::VectorXd h = leverages(m, xd);
  for (Index i = 0; i < n; ++i)
    CHECK(h[i] == doctest::Approx(1.0 / n).epsilon(1e-12));
}

TEST_CASE("saturated model has unit leverages") {
  DesignMatrix xd;
  xd.rows = 3;
  xd.cols = 1;
  xd.data = test::random_matrix(3, 3, 110);  // n = p, generic rows
  const PixelMatrix y = test::random_pixels(3, 1, 111);
  const LinearModel m = fit(xd, y, 0.0);
  CHECK(m.mse == 0.0);  // no degrees of freedom left
  const Eigen::VectorXd h = leverages(m, xd);
  for (Index i = 0; i < 3; ++i)
    CHECK(h[i] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("leverages match the explicit hat-matrix diagonal") {
  const DesignMatrix xd = augment(test::random_pixels(5, 1, 112));
  const PixelMatrix y = test::random_pixels(5, 1, 113);
  const LinearModel m = fit(xd, y, 0.0);
  // oracle: H = X (X'X)^-1 X' built with a direct dense inverse
  const Eigen::MatrixXd hat =
      xd.data * (xd.data.transpose() * xd.data).inverse() * xd.data.transpose();
  const Eigen::VectorXd h = leverages(m, xd);
  for (Index i = 0; i < 5; ++i)
    CHECK(h[i] == doctest::Approx(hat(i, i)).epsilon(1e-10));
}

TEST_CASE("hat-matrix laws: trace, bounds, idempotence") {
  const DesignMatrix xd = augment(test::random_pixels(40, 4, 114));
  const PixelMatrix y = test::random_pixels(40, 2, 115);
  const LinearModel m = fit(xd, y, 0.0);
  const Eigen::VectorXd h = leverages(m, xd);
  CHECK(h.sum() == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(h.minCoeff() >= 0.0);
  CHECK(h.maxCoeff() <= 1.0 + 1e-12);

  const Eigen::MatrixXd hat = xd.data * m.gram_inverse * xd.data.transpose();
  CHECK((hat * hat - hat).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("training leverages are non-increasing in lambda") {
  const DesignMatrix xd = augment(test::random_pixels(25, 3, 116));
  const PixelMatrix y = test::random_pixels(25, 1, 117);
  Eigen::VectorXd prev;
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
    const Eigen::VectorXd h = leverages(fit(xd, y, lambda), xd);
    if (prev.size() > 0)
      CHECK(((prev - h).array() >= -1e-12).all());
    prev = h;
  }
}

TEST_CASE("fit is bitwise deterministic") {
  const DesignMatrix xd = augment(test::random_pixels(50, 4, 118));
  const PixelMatrix y = test::random_pixels(50, 3, 119);
  const LinearModel a = fit(xd, y, 0.5);
  const LinearModel b = fit(xd, y, 0.5);
  CHECK(a.weights == b.weights);
  CHECK(a.gram_inverse == b.gram_inverse);
  CHECK(a.mse == b.mse);
}

TEST_CASE("fit_rows equals fit on the same subset") {
  const DesignMatrix xd = augment(test::random_pixels(60, 3, 120));
  const PixelMatrix y = test::random_pixels(60, 2, 121);
  IndexList rows;
  for (Index i = 5; i < 45; ++i) rows.push_back(i);

  DesignMatrix sub;
  sub.rows = static_cast<int>(rows.size());
  sub.cols = 1;
  sub.data.resize(static_cast<Index>(rows.size()), xd.p());
  PixelMatrix ysub;
  ysub.rows = sub.rows;
  ysub.cols = 1;
  ysub.data.resize(static_cast<Index>(rows.size()), y.bands());
  for (size_t k = 0; k < rows.size(); ++k) {
    sub.data.row(static_cast<Index>(k)) = xd.data.row(rows[k]);
    ysub.data.row(static_cast<Index>(k)) = y.data.row(rows[k]);
  }
  const LinearModel a = fit_rows(xd, y, rows, 0.25);
  const LinearModel b = fit(sub, ysub, 0.25);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-12));
}

TEST_CASE("singular Gram at lambda 0 is a hard error advising ridge") {
  PixelMatrix x = test::random_pixels(10, 2, 122);
  x.data.col(1) = x.data.col(0);  // duplicate band
  const DesignMatrix xd = augment(x);
  const PixelMatrix y = test::random_pixels(10, 1, 123);
  CHECK_THROWS_WITH_AS(fit(xd, y, 0.0), doctest::Contains("lambda"),
                       validation_error);
  CHECK_NOTHROW(fit(xd, y, 1e-3));
}

TEST_CASE("residual_variance formula and guards") {
  PixelMatrix e;
  e.rows = 3;
  e.cols = 1;
  e.data = Eigen::MatrixXd::Zero(3, 2);
  CHECK(residual_variance(e, 1) == 0.0);

  e.data = Eigen::MatrixXd::Ones(3, 1);  // e = (1,1,1), d=1, p=1
  CHECK(residual_variance(e, 1) == doctest::Approx(1.5).epsilon(1e-15));

  PixelMatrix scaled = e;
  scaled.data *= 3.0;
  CHECK(residual_variance(scaled, 1) ==
        doctest::Approx(9.0 * residual_variance(e, 1)).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(residual_variance(e, 3),
                       doctest::Contains("degrees of freedom"),
                       validation_error);
}

TEST_CASE("gram_inverse is symmetric") {
  const DesignMatrix xd = augment(test::random_pixels(30, 5, 124));
  const PixelMatrix y = test::random_pixels(30, 2, 125);
  const LinearModel m = fit(xd, y, 0.01);
  const double asym =
      (m.gram_inverse - m.gram_inverse.transpose()).cwiseAbs().maxCoeff();
  CHECK(asym <= 1e-10 * m.gram_inverse.cwiseAbs().maxCoeff());
}

TEST_CASE("standardizer freezes training statistics") {
  Eigen::MatrixXd data(4, 2);
  data << 1, 5, 3, 5, 5, 5, 7, 5;  // band 1 is constant
  IndexList rows = {0, 1, 2, 3};
  const Standardizer s = fit_standardizer(data, rows);
  CHECK(s.mean[0] == doctest::Approx(4.0));
  CHECK(s.scale[0] == doctest::Approx(std::sqrt(5.0)));
  CHECK(s.scale[1] == 1.0);  // constant band keeps unit scale

  const Eigen::MatrixXd z = apply_standardizer(s, data);
  CHECK(z.col(0).mean() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(z.col(1).isZero(1e-14));

  // freezing: statistics come from the given rows only
  const Standardizer s2 = fit_standardizer(data, {0, 1});
  CHECK(s2.mean[0] == doctest::Approx(2.0));
}

TEST_CASE("model JSON round-trips exactly") {
  const DesignMatrix xd = augment(test::random_pixels(12, 2, 126));
  const PixelMatrix y = test::random_pixels(12, 2, 127);
  const LinearModel m = fit(xd, y, 0.125);
  const LinearModel back = model_from_json(model_to_json(m));
  CHECK(back.weights == m.weights);
  CHECK(back.gram_inverse == m.gram_inverse);
  CHECK(back.lambda == m.lambda);
  CHECK(back.mse == m.mse);
  CHECK(back.p == m.p);
  CHECK(back.d_out == m.d_out);
}
