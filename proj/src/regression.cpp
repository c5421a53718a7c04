#include "rcook/regression.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace rcook {

namespace {

constexpr Index kRowBlock = 8192;
constexpr double kRcondFloor = 1e-14;

// Solves for W and the explicit Gram inverse given an assembled
// (Xd'Xd + lambda I) and Xd'Y. One LDLT factorization feeds both.
LinearModel solve_normal_equations(Eigen::MatrixXd gram,
                                   const Eigen::MatrixXd& xty,
                                   double lambda) {
  const Index p = gram.rows();
  const Index d_out = xty.cols();

  Eigen::LDLT<Eigen::Ref<Eigen::MatrixXd>> ldlt(gram);
  const Eigen::VectorXd diag = ldlt.vectorD();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  const double rcond = dmax > 0.0 ? dmin / dmax : 0.0;
  if (ldlt.info() != Eigen::Success || dmin <= 0.0 || rcond < kRcondFloor) {
    std::string msg = "fit: Gram matrix is singular or indefinite (rcond ~ " +
                      std::to_string(rcond) + ")";
    if (lambda == 0.0) msg += "; use a positive lambda";
    throw validation_error(msg);
  }

  LinearModel m;
  m.lambda = lambda;
  m.p = p;
  m.d_out = d_out;
  m.weights = ldlt.solve(xty);
  m.gram_inverse = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  // the solve leaves last-ulp asymmetry behind
  m.gram_inverse = ((m.gram_inverse + m.gram_inverse.transpose()) * 0.5).eval();
  return m;
}

double training_mse(const DesignMatrix& xd, const PixelMatrix& y,
                    const LinearModel& m, const IndexList* rows) {
  const Index n = rows ? static_cast<Index>(rows->size()) : xd.n();
  const double dof = static_cast<double>(m.d_out) * static_cast<double>(n - m.p);
  if (dof <= 0.0) return 0.0;
  double sse = 0.0;
  if (rows) {
    for (Index i : *rows)
      sse += (y.data.row(i) - xd.data.row(i) * m.weights).squaredNorm();
  } else {
    for (Index r0 = 0; r0 < n; r0 += kRowBlock) {
      const Index len = std::min(kRowBlock, n - r0);
      sse += (y.data.middleRows(r0, len) -
              xd.data.middleRows(r0, len) * m.weights)
                 .squaredNorm();
    }
  }
  return sse / dof;
}

}  // namespace

DesignMatrix augment(const PixelMatrix& x) {
  validate(x);
  DesignMatrix d;
  d.rows = x.rows;
  d.cols = x.cols;
  d.data.resize(x.n(), x.bands() + 1);
  d.data.leftCols(x.bands()) = x.data;
  d.data.col(x.bands()).setOnes();
  return d;
}

LinearModel fit(const DesignMatrix& xd, const PixelMatrix& y, double lambda) {
  if (xd.n() != y.n())
    throw validation_error("fit: design has " + std::to_string(xd.n()) +
                           " rows but response has " + std::to_string(y.n()));
  if (xd.n() < 1 || xd.p() < 1) throw validation_error("fit: empty design");
  if (lambda < 0.0) throw validation_error("fit: lambda must be >= 0");

  const Index p = xd.p();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.diagonal().array() = lambda;
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xd.data.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() =
      gram.triangularView<Eigen::StrictlyLower>().transpose();

  LinearModel m = solve_normal_equations(
      std::move(gram), xd.data.transpose() * y.data, lambda);
  m.mse = training_mse(xd, y, m, nullptr);
  return m;
}

LinearModel fit_rows(const DesignMatrix& xd, const PixelMatrix& y,
                     const IndexList& rows, double lambda) {
  if (rows.empty()) throw validation_error("fit_rows: empty training set");
  if (xd.n() != y.n())
    throw validation_error("fit_rows: design/response row mismatch");
  if (lambda < 0.0) throw validation_error("fit_rows: lambda must be >= 0");
  for (Index i : rows)
    if (i < 0 || i >= xd.n())
      throw validation_error("fit_rows: training index " + std::to_string(i) +
                             " out of range");

  const Index p = xd.p();
  const Index d_out = y.bands();
  const Index nt = static_cast<Index>(rows.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.diagonal().array() = lambda;
  Eigen::MatrixXd xty = Eigen::MatrixXd::Zero(p, d_out);

  // gather-and-accumulate in blocks; never materializes the full subset
  Eigen::MatrixXd xblk(kRowBlock, p), yblk(kRowBlock, d_out);
  for (Index r0 = 0; r0 < nt; r0 += kRowBlock) {
    const Index len = std::min(kRowBlock, nt - r0);
    for (Index k = 0; k < len; ++k) {
      xblk.row(k) = xd.data.row(rows[static_cast<size_t>(r0 + k)]);
      yblk.row(k) = y.data.row(rows[static_cast<size_t>(r0 + k)]);
    }
    gram.selfadjointView<Eigen::Lower>().rankUpdate(
        xblk.topRows(len).transpose());
    xty.noalias() += xblk.topRows(len).transpose() * yblk.topRows(len);
  }
  gram.triangularView<Eigen::StrictlyUpper>() =
      gram.triangularView<Eigen::StrictlyLower>().transpose();

  LinearModel m = solve_normal_equations(std::move(gram), xty, lambda);
  m.mse = training_mse(xd, y, m, &rows);
  return m;
}

PixelMatrix predict(const LinearModel& m, const DesignMatrix& xd) {
  if (xd.p() != m.p)
    throw validation_error("predict: design has p=" + std::to_string(xd.p()) +
                           " but model expects p=" + std::to_string(m.p));
  PixelMatrix out;
  out.rows = xd.rows;
  out.cols = xd.cols;
  out.data.noalias() = xd.data * m.weights;
  return out;
}

PixelMatrix residuals(const PixelMatrix& y, const PixelMatrix& yhat) {
  if (y.n() != yhat.n() || y.bands() != yhat.bands())
    throw validation_error("residuals: shape mismatch " +
                           std::to_string(y.n()) + "x" +
                           std::to_string(y.bands()) + " vs " +
                           std::to_string(yhat.n()) + "x" +
                           std::to_string(yhat.bands()));
  PixelMatrix e;
  e.rows = y.rows;
  e.cols = y.cols;
  e.data = y.data - yhat.data;
  return e;
}

Eigen::VectorXd leverages(const LinearModel& m, const DesignMatrix& xd) {
  if (xd.p() != m.p)
    throw validation_error("leverages: design has p=" +
                           std::to_string(xd.p()) + " but model expects p=" +
                           std::to_string(m.p));
  const Index n = xd.n();
  Eigen::VectorXd h(n);
  for (Index r0 = 0; r0 < n; r0 += kRowBlock) {
    const Index len = std::min(kRowBlock, n - r0);
    const auto blk = xd.data.middleRows(r0, len);
    // h_i = x_i' G^-1 x_i; clamp rounding noise below zero
    h.segment(r0, len) = ((blk * m.gram_inverse).cwiseProduct(blk))
                             .rowwise()
                             .sum()
                             .cwiseMax(0.0);
  }
  return h;
}

double residual_variance(const PixelMatrix& e, Index p) {
  const double dof =
      static_cast<double>(e.bands()) * static_cast<double>(e.n() - p);
  if (dof <= 0.0)
    throw validation_error("residual_variance: non-positive degrees of "
                           "freedom d(n-p) with n=" +
                           std::to_string(e.n()) + ", p=" + std::to_string(p));
  return e.data.squaredNorm() / dof;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& data,
                              const IndexList& rows) {
  if (rows.empty())
    throw validation_error("fit_standardizer: empty training set");
  const Index d = data.cols();
  const double n = static_cast<double>(rows.size());
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(d);
  s.scale = Eigen::VectorXd::Ones(d);
  for (Index i : rows) s.mean += data.row(i).transpose();
  s.mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (Index i : rows)
    var += (data.row(i).transpose() - s.mean).array().square().matrix();
  var /= n;
  for (Index j = 0; j < d; ++j)
    s.scale[j] = var[j] > 0.0 ? std::sqrt(var[j]) : 1.0;
  return s;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s,
                                   const Eigen::MatrixXd& data) {
  if (data.cols() != s.mean.size())
    throw validation_error("apply_standardizer: band count mismatch");
  return (data.rowwise() - s.mean.transpose()).array().rowwise() /
         s.scale.transpose().array();
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw validation_error("model json: expected non-empty array of rows");
  const Index r = static_cast<Index>(j.size());
  const Index c = static_cast<Index>(j.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = j.at(static_cast<size_t>(i));
    if (static_cast<Index>(row.size()) != c)
      throw validation_error("model json: ragged matrix rows");
    for (Index k = 0; k < c; ++k)
      m(i, k) = row.at(static_cast<size_t>(k)).get<double>();
  }
  return m;
}

}  // namespace

std::string model_to_json(const LinearModel& m) {
  nlohmann::json j;
  j["weights"] = matrix_to_json(m.weights);
  j["gram_inverse"] = matrix_to_json(m.gram_inverse);
  j["lambda"] = m.lambda;
  j["mse"] = m.mse;
  j["p"] = m.p;
  j["d_out"] = m.d_out;
  return j.dump(2);
}

LinearModel model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  LinearModel m;
  m.weights = matrix_from_json(j.at("weights"));
  m.gram_inverse = matrix_from_json(j.at("gram_inverse"));
  m.lambda = j.at("lambda").get<double>();
  m.mse = j.at("mse").get<double>();
  m.p = j.at("p").get<Index>();
  m.d_out = j.at("d_out").get<Index>();
  if (m.weights.rows() != m.p || m.gram_inverse.rows() != m.p ||
      m.gram_inverse.cols() != m.p || m.weights.cols() != m.d_out)
    throw validation_error("model json: inconsistent shapes");
  return m;
}

}  // namespace rcook
