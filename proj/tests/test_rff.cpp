#include <doctest.h>

#include <cmath>

#include "rcook/regression.hpp"
#include "rcook/rff.hpp"
#include "support/helpers.hpp"

using namespace rcook;

TEST_CASE("sampling is a pure function of (d, D, sigma, seed)") {
  const RffMap a = sample_map(3, 50, 1.5, 42);
  const RffMap b = sample_map(3, 50, 1.5, 42);
  CHECK(a.frequencies == b.frequencies);
  const RffMap c = sample_map(3, 50, 1.5, 43);
  CHECK(a.frequencies != c.frequencies);
}

TEST_CASE("huge bandwidth collapses the features to constants") {
  const RffMap map = sample_map(3, 20, 1e12, 7);
  CHECK(map.frequencies.cwiseAbs().maxCoeff() < 1e-9);
  const PixelMatrix z = transform(map, test::random_pixels(5, 3, 8));
  const double inv_sqrt_d = 1.0 / std::sqrt(20.0);
  for (Index i = 0; i < z.n(); ++i)
    for (Index k = 0; k < 20; ++k) {
      CHECK(z.data(i, 2 * k) == doctest::Approx(inv_sqrt_d).epsilon(1e-9));
      CHECK(z.data(i, 2 * k + 1) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("frequency variance matches 1/sigma^2") {
  const RffMap map = sample_map(4, 100000, 2.0, 99);
  const double var =
      map.frequencies.array().square().mean() -
      std::pow(map.frequencies.array().mean(), 2);
  CHECK(var == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("every feature row has unit norm") {
  const RffMap map = sample_map(5, 64, 0.8, 11);
  const PixelMatrix z = transform(map, test::random_pixels(40, 5, 12));
  for (Index i = 0; i < z.n(); ++i)
    CHECK(z.data.row(i).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the origin maps to interleaved (1, 0) pairs") {
  const RffMap map = sample_map(3, 10, 1.0, 13);
  PixelMatrix zero;
  zero.rows = zero.cols = 1;
  zero.data = Eigen::MatrixXd::Zero(1, 3);
  const PixelMatrix z = transform(map, zero);
  const double inv_sqrt_d = 1.0 / std::sqrt(10.0);
  for (Index k = 0; k < 10; ++k) {
    CHECK(z.data(0, 2 * k) == inv_sqrt_d);
    CHECK(z.data(0, 2 * k + 1) == 0.0);
  }
}

TEST_CASE("feature inner products track the Gaussian kernel") {
  const Index d = 8;
  const double sigma = 1.0;
  const RffMap map = sample_map(d, 2000, sigma, 555);
  const PixelMatrix a = test::random_pixels(20, d, 556);
  const PixelMatrix b = test::random_pixels(20, d, 557);
  const PixelMatrix za = transform(map, a);
  const PixelMatrix zb = transform(map, b);
  for (Index i = 0; i < 20; ++i) {
    const double approx = za.data.row(i).dot(zb.data.row(i));
    const double exact = std::exp(-(a.data.row(i) - b.data.row(i)).squaredNorm() /
                                  (2.0 * sigma * sigma));
    CHECK(std::abs(approx - exact) < 0.05);
  }
}

TEST_CASE("rff_design shape and bias column") {
  const RffMap map = sample_map(3, 100, 1.0, 14);
  const DesignMatrix dz = rff_design(map, test::random_pixels(7, 3, 15));
  CHECK(dz.data.rows() == 7);
  CHECK(dz.data.cols() == 201);
  CHECK(dz.data.col(200) == Eigen::VectorXd::Ones(7));
}

TEST_CASE("model leverages reproduce the explicit feature-Gram diagonal") {
  const RffMap map = sample_map(2, 5, 1.0, 16);
  const PixelMatrix x = test::random_pixels(50, 2, 17);
  const DesignMatrix dz = rff_design(map, x);
  const PixelMatrix y = test::random_pixels(50, 1, 18);

  // vanishing ridge recovers h_i = z_i' (Z'Z)^-1 z_i built by direct inverse
  const LinearModel m = fit(dz, y, 1e-10);
  const Eigen::VectorXd h = leverages(m, dz);
  const Eigen::MatrixXd ginv = (dz.data.transpose() * dz.data).inverse();
  for (Index i = 0; i < 50; ++i) {
    const double expect = dz.data.row(i) * ginv * dz.data.row(i).transpose();
    CHECK(h[i] == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("rff leverages with no ridge obey the hat-matrix laws") {
  const RffMap map = sample_map(3, 10, 1.2, 19);  // p = 21
  const PixelMatrix x = test::random_pixels(100, 3, 20);
  const DesignMatrix dz = rff_design(map, x);
  const PixelMatrix y = test::random_pixels(100, 2, 21);
  const LinearModel m = fit(dz, y, 0.0);
  const Eigen::VectorXd h = leverages(m, dz);
  CHECK(h.sum() == doctest::Approx(21.0).epsilon(1e-8));
  CHECK(h.minCoeff() >= 0.0);
  CHECK(h.maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("map JSON stores scalars only and regenerates frequencies") {
  const RffMap map = sample_map(4, 30, 2.5, 20250810);
  const std::string text = rff_to_json(map);
  CHECK(text.find("frequencies") == std::string::npos);
  const RffMap back = rff_from_json(text);
  CHECK(back.frequencies == map.frequencies);
  CHECK(back.sigma == map.sigma);
  CHECK(back.seed == map.seed);

  std::string tampered = text;
  const auto pos = tampered.find("splitmix64-boxmuller/1");
  tampered.replace(pos, 22, "splitmix64-boxmuller/9");
  CHECK_THROWS_WITH_AS(rff_from_json(tampered),
                       doctest::Contains("PRNG version"), validation_error);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(sample_map(0, 10, 1.0, 1), validation_error);
  CHECK_THROWS_AS(sample_map(3, 0, 1.0, 1), validation_error);
  CHECK_THROWS_AS(sample_map(3, 10, 0.0, 1), validation_error);
  const RffMap map = sample_map(3, 10, 1.0, 1);
  CHECK_THROWS_AS(transform(map, test::random_pixels(4, 2, 2)),
                  validation_error);
}
