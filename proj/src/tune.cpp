#include "rcook/tune.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "rcook/eval.hpp"
#include "rcook/prng.hpp"
#include "rcook/regression.hpp"
#include "rcook/rff.hpp"

namespace rcook {

namespace {

// Substream tags under the grid seed.
enum : std::uint64_t {
  kStreamFolds = 11,
  kStreamMaps = 12,
  kStreamSample = 13,
};

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// One eigendecomposition of the fold's Gram serves the whole lambda axis:
// (G + lambda I)^-1 = Q diag(1/(eig + lambda)) Q'.
struct RidgeSweep {
  Eigen::VectorXd eigs;       // p
  Eigen::MatrixXd coef;       // p x d = Q' Ztr' Ytr
  Eigen::MatrixXd a;          // nte x p = Zte Q
  Eigen::MatrixXd a_sq;       // a squared elementwise
  Eigen::MatrixXd y_test;     // nte x d
  double y_train_sqnorm = 0.0;
  Index n_train = 0, p = 0, d = 0;

  RidgeSweep(const Eigen::MatrixXd& z_train, const Eigen::MatrixXd& y_train,
             const Eigen::MatrixXd& z_test, const Eigen::MatrixXd& y_te)
      : y_test(y_te) {
    n_train = z_train.rows();
    p = z_train.cols();
    d = y_train.cols();
    if (n_train <= p)
      throw validation_error(
          "cv_tune: fold training size " + std::to_string(n_train) +
          " must exceed feature count " + std::to_string(p));
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z_train.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        gram.selfadjointView<Eigen::Lower>());
    if (eig.info() != Eigen::Success)
      throw validation_error("cv_tune: eigendecomposition failed");
    eigs = eig.eigenvalues().cwiseMax(0.0);
    coef.noalias() = eig.eigenvectors().transpose() *
                     (z_train.transpose() * y_train);
    a.noalias() = z_test * eig.eigenvectors();
    a_sq = a.array().square();
    y_train_sqnorm = y_train.squaredNorm();
  }

  // Held-out Cook scores at one ridge strength.
  Eigen::VectorXd scores(double lambda, CookVariant variant) const {
    // near-null directions are truncated rather than inverted
    const double floor = std::max(eigs.maxCoeff(), 1.0) * 1e-12;
    Eigen::VectorXd winv(p);
    for (Index k = 0; k < p; ++k) {
      const double ev = eigs[k] + lambda;
      winv[k] = ev > floor ? 1.0 / ev : 0.0;
    }
    const Eigen::MatrixXd wbar = winv.asDiagonal() * coef;

    // ||Y - ZW||^2 from the spectral coordinates alone
    double sse = y_train_sqnorm - 2.0 * coef.cwiseProduct(wbar).sum() +
                 (eigs.asDiagonal() * wbar).cwiseProduct(wbar).sum();
    sse = std::max(sse, 0.0);
    const double dof = static_cast<double>(d) *
                       static_cast<double>(n_train - p);
    const double s2 = std::max(sse / dof, kVarianceFloor);

    const Eigen::VectorXd h = (a_sq * winv).cwiseMin(1.0 - 1e-12).cwiseMax(0.0);
    const Eigen::MatrixXd e = y_test - a * wbar;
    const Index nte = y_test.rows();
    Eigen::VectorXd out(nte);
    const double dd = static_cast<double>(d);
    for (Index i = 0; i < nte; ++i) {
      const double err2 = e.row(i).squaredNorm();
      const double denom = variant == CookVariant::Classical
                               ? dd * s2 * (1.0 - h[i]) * (1.0 - h[i])
                               : dd * s2 * s2 * (1.0 - h[i] * h[i]);
      out[i] = err2 * h[i] / denom;
    }
    return out;
  }
};

double fold_auc(const Eigen::VectorXd& scores,
                const std::vector<std::uint8_t>& labels) {
  ScoreMap s;
  s.rows = static_cast<int>(scores.size());
  s.cols = 1;
  s.scores = scores;
  Mask m;
  m.rows = s.rows;
  m.cols = 1;
  m.data = labels;
  return roc(s, m).auc;
}

struct FoldData {
  Eigen::MatrixXd x_train, y_train, x_test, y_test;
  std::vector<std::uint8_t> test_labels;
};

// Stratified assignment: each class is shuffled then dealt round-robin.
std::vector<int> assign_folds(const Mask& truth, int folds,
                              std::uint64_t seed) {
  const Index n = truth.n();
  IndexList pos, neg;
  for (Index i = 0; i < n; ++i)
    (truth.data[static_cast<size_t>(i)] ? pos : neg).push_back(i);
  if (static_cast<int>(pos.size()) < folds ||
      static_cast<int>(neg.size()) < folds)
    throw validation_error(
        "cv_tune: stratification failure, cannot give every one of " +
        std::to_string(folds) + " folds both classes (" +
        std::to_string(pos.size()) + " positives, " +
        std::to_string(neg.size()) + " negatives)");
  prng::SplitMix64 gen(seed);
  auto shuffle = [&gen](IndexList& v) {
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      const size_t j = i + static_cast<size_t>(gen.next_below(v.size() - i));
      std::swap(v[i], v[j]);
    }
  };
  shuffle(pos);
  shuffle(neg);
  std::vector<int> fold_of(static_cast<size_t>(n));
  for (size_t k = 0; k < pos.size(); ++k)
    fold_of[static_cast<size_t>(pos[k])] = static_cast<int>(k % folds);
  for (size_t k = 0; k < neg.size(); ++k)
    fold_of[static_cast<size_t>(neg[k])] = static_cast<int>(k % folds);
  return fold_of;
}

FoldData make_fold(const PixelMatrix& x, const PixelMatrix& y,
                   const Mask& truth, const std::vector<int>& fold_of,
                   int fold) {
  IndexList train, test;
  for (Index i = 0; i < x.n(); ++i)
    (fold_of[static_cast<size_t>(i)] == fold ? test : train).push_back(i);

  const Standardizer sx = fit_standardizer(x.data, train);
  const Standardizer sy = fit_standardizer(y.data, train);
  FoldData f;
  f.x_train.resize(static_cast<Index>(train.size()), x.bands());
  f.y_train.resize(static_cast<Index>(train.size()), y.bands());
  for (size_t k = 0; k < train.size(); ++k) {
    f.x_train.row(static_cast<Index>(k)) = x.data.row(train[k]);
    f.y_train.row(static_cast<Index>(k)) = y.data.row(train[k]);
  }
  f.x_test.resize(static_cast<Index>(test.size()), x.bands());
  f.y_test.resize(static_cast<Index>(test.size()), y.bands());
  f.test_labels.resize(test.size());
  for (size_t k = 0; k < test.size(); ++k) {
    f.x_test.row(static_cast<Index>(k)) = x.data.row(test[k]);
    f.y_test.row(static_cast<Index>(k)) = y.data.row(test[k]);
    f.test_labels[k] = truth.data[static_cast<size_t>(test[k])];
  }
  f.x_train = apply_standardizer(sx, f.x_train);
  f.x_test = apply_standardizer(sx, f.x_test);
  f.y_train = apply_standardizer(sy, f.y_train);
  f.y_test = apply_standardizer(sy, f.y_test);
  return f;
}

Eigen::MatrixXd with_bias(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = m;
  out.col(m.cols()).setOnes();
  return out;
}

Eigen::MatrixXd rff_features(const RffMap& map, const Eigen::MatrixXd& m) {
  PixelMatrix px;
  px.rows = static_cast<int>(m.rows());
  px.cols = 1;
  px.data = m;
  return rff_design(map, px).data;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int k) {
  if (!(lo > 0.0)) throw validation_error("log_grid: lo must be > 0");
  if (!(hi > lo)) throw validation_error("log_grid: hi must exceed lo");
  if (k < 2) throw validation_error("log_grid: need at least 2 points");
  std::vector<double> v(static_cast<size_t>(k));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < k; ++i)
    v[static_cast<size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / static_cast<double>(k - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

GridSpec default_grid(std::uint64_t seed) {
  GridSpec g;
  g.sigma_grid = log_grid(1e-5, 1e4, 50);
  g.lambda_grid = log_grid(1e-5, 1e4, 50);
  g.folds = 5;
  g.seed = seed;
  return g;
}

TuneResult cv_tune(const PixelMatrix& x, const PixelMatrix& y,
                   const Mask& truth, const GridSpec& grid, Index rff_dim,
                   CookVariant variant) {
  validate(x);
  validate(y);
  validate(truth);
  if (x.n() != y.n() || x.n() != truth.n())
    throw validation_error("cv_tune: input row counts differ");
  if (grid.folds < 2) throw validation_error("cv_tune: folds must be >= 2");
  if (grid.lambda_grid.empty())
    throw validation_error("cv_tune: lambda grid is empty");
  for (double s : grid.sigma_grid)
    if (!(s > 0.0)) throw validation_error("cv_tune: sigma values must be > 0");
  for (double l : grid.lambda_grid)
    if (l < 0.0) throw validation_error("cv_tune: lambda values must be >= 0");
  const bool linear = grid.sigma_grid.empty();
  if (!linear && rff_dim < 1)
    throw validation_error("cv_tune: rff_dim must be >= 1");

  const std::vector<int> fold_of =
      assign_folds(truth, grid.folds, prng::derive(grid.seed, kStreamFolds));

  const size_t n_sigma = linear ? 1 : grid.sigma_grid.size();
  const size_t n_lambda = grid.lambda_grid.size();
  std::vector<double> auc_sum(n_sigma * n_lambda, 0.0);

  for (int f = 0; f < grid.folds; ++f) {
    const FoldData fold = make_fold(x, y, truth, fold_of, f);
    for (size_t j = 0; j < n_sigma; ++j) {
      Eigen::MatrixXd z_train, z_test;
      if (linear) {
        z_train = with_bias(fold.x_train);
        z_test = with_bias(fold.x_test);
      } else {
        const RffMap map = sample_map(
            x.bands(), rff_dim, grid.sigma_grid[j],
            prng::derive(prng::derive(grid.seed, kStreamMaps, j),
                         static_cast<std::uint64_t>(f)));
        z_train = rff_features(map, fold.x_train);
        z_test = rff_features(map, fold.x_test);
      }
      const RidgeSweep sweep(z_train, fold.y_train, z_test, fold.y_test);
      for (size_t l = 0; l < n_lambda; ++l)
        auc_sum[j * n_lambda + l] +=
            fold_auc(sweep.scores(grid.lambda_grid[l], variant),
                     fold.test_labels);
    }
  }

  TuneResult result;
  result.table.reserve(auc_sum.size());
  result.cv_auc = -1.0;
  for (size_t j = 0; j < n_sigma; ++j)
    for (size_t l = 0; l < n_lambda; ++l) {
      TuneCell cell;
      cell.sigma = linear ? std::numeric_limits<double>::quiet_NaN()
                          : grid.sigma_grid[j];
      cell.lambda = grid.lambda_grid[l];
      cell.mean_auc = auc_sum[j * n_lambda + l] / grid.folds;
      result.table.push_back(cell);
      // strict improvement keeps the first-best cell in grid order,
      // independent of evaluation order
      if (cell.mean_auc > result.cv_auc) {
        result.cv_auc = cell.mean_auc;
        result.best_sigma = cell.sigma;
        result.best_lambda = cell.lambda;
      }
    }
  return result;
}

SampledScene sample_pixels(const PixelMatrix& x, const PixelMatrix& y,
                           const Mask& truth, Index n, std::uint64_t seed) {
  validate(x);
  validate(y);
  validate(truth);
  if (x.n() != y.n() || x.n() != truth.n())
    throw validation_error("sample_pixels: input row counts differ");
  if (n < 1 || n > x.n())
    throw validation_error("sample_pixels: n=" + std::to_string(n) +
                           " outside [1, " + std::to_string(x.n()) + "]");

  IndexList all(static_cast<size_t>(x.n()));
  std::iota(all.begin(), all.end(), Index{0});
  prng::SplitMix64 gen(prng::derive(seed, kStreamSample));
  for (size_t i = 0; i + 1 < all.size() && i < static_cast<size_t>(n); ++i) {
    const size_t j = i + static_cast<size_t>(gen.next_below(all.size() - i));
    std::swap(all[i], all[j]);
  }
  all.resize(static_cast<size_t>(n));

  SampledScene s;
  s.indices = all;
  s.x.rows = s.y.rows = s.truth.rows = static_cast<int>(n);
  s.x.cols = s.y.cols = s.truth.cols = 1;
  s.x.data.resize(n, x.bands());
  s.y.data.resize(n, y.bands());
  s.truth.data.resize(static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Index src = all[static_cast<size_t>(k)];
    s.x.data.row(k) = x.data.row(src);
    s.y.data.row(k) = y.data.row(src);
    s.truth.data[static_cast<size_t>(k)] =
        truth.data[static_cast<size_t>(src)];
  }
  return s;
}

Split split_at_fraction(Index n, double train_fraction) {
  if (n < 2) throw validation_error("split: need at least 2 rows");
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw validation_error("split: train fraction must be in (0,1)");
  Index tc = static_cast<Index>(std::llround(train_fraction * n));
  tc = std::clamp(tc, Index{1}, n - 1);
  Split s;
  s.train.resize(static_cast<size_t>(tc));
  s.test.resize(static_cast<size_t>(n - tc));
  std::iota(s.train.begin(), s.train.end(), Index{0});
  std::iota(s.test.begin(), s.test.end(), tc);
  return s;
}

Split split_half(Index n) { return split_at_fraction(n, 0.5); }

void export_tune_csv(const TuneResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  out << "sigma,lambda,mean_auc\r\n";
  for (const auto& cell : r.table) {
    if (!std::isnan(cell.sigma)) out << shortest(cell.sigma);
    out << "," << shortest(cell.lambda) << "," << shortest(cell.mean_auc)
        << "\r\n";
  }
  if (!out) throw io_error(path.string() + ": write failed");
}

std::string tune_to_json(const TuneResult& r, const GridSpec& grid,
                         Index rff_dim) {
  const bool linear = grid.sigma_grid.empty();
  nlohmann::json j;
  j["method"] = linear ? "cook" : "rcook";
  if (linear)
    j["best_sigma"] = nullptr;
  else
    j["best_sigma"] = r.best_sigma;
  j["best_lambda"] = r.best_lambda;
  j["cv_auc"] = r.cv_auc;
  j["folds"] = grid.folds;
  j["D"] = rff_dim;
  j["seed"] = grid.seed;
  j["prng_version"] = std::string(prng::kVersion);
  nlohmann::json table = nlohmann::json::array();
  for (const auto& cell : r.table) {
    nlohmann::json c;
    if (std::isnan(cell.sigma))
      c["sigma"] = nullptr;
    else
      c["sigma"] = cell.sigma;
    c["lambda"] = cell.lambda;
    c["mean_auc"] = cell.mean_auc;
    table.push_back(std::move(c));
  }
  j["table"] = std::move(table);
  return j.dump(2);
}

}  // namespace rcook
