#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcook/cook.hpp"
#include "rcook/types.hpp"

namespace rcook {

// k values in geometric progression from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int k);

// An empty sigma_grid selects the linear detector: only the lambda axis is
// searched and sigma comes back as NaN.
struct GridSpec {
  std::vector<double> sigma_grid;
  std::vector<double> lambda_grid;
  int folds = 5;
  std::uint64_t seed = 0;
};

// 50 log-spaced points on [1e-5, 1e4] per axis.
GridSpec default_grid(std::uint64_t seed);

struct TuneCell {
  double sigma = 0.0;  // NaN on the linear axis
  double lambda = 0.0;
  double mean_auc = 0.0;
};

struct TuneResult {
  double best_sigma = 0.0;
  double best_lambda = 0.0;
  double cv_auc = 0.0;
  std::vector<TuneCell> table;  // sigma-major, lambda-minor
};

// Stratified k-fold grid search maximizing out-of-fold AUC. The feature map
// is resampled per (sigma index, fold) from seeds derived off grid.seed, so
// results do not depend on evaluation order. Throws when a fold cannot hold
// both classes.
TuneResult cv_tune(const PixelMatrix& x, const PixelMatrix& y,
                   const Mask& truth, const GridSpec& grid, Index rff_dim,
                   CookVariant variant = CookVariant::Classical);

// Uniform subsample without replacement, in shuffled order; `indices` maps
// the sampled rows back to the source raster.
struct SampledScene {
  PixelMatrix x;
  PixelMatrix y;
  Mask truth;
  IndexList indices;
};
SampledScene sample_pixels(const PixelMatrix& x, const PixelMatrix& y,
                           const Mask& truth, Index n, std::uint64_t seed);

// Positions [0, n) partitioned into a leading train run and the rest; on a
// shuffled sample this is a random split.
struct Split {
  IndexList train;
  IndexList test;
};
Split split_half(Index n);
Split split_at_fraction(Index n, double train_fraction);

void export_tune_csv(const TuneResult& r, const std::filesystem::path& path);
std::string tune_to_json(const TuneResult& r, const GridSpec& grid,
                         Index rff_dim);

}  // namespace rcook
