// rcook: chronochrome anomalous change detection between two co-registered
// multispectral images, scored by linear or randomized Cook distances.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rcook/eval.hpp"
#include "rcook/pipeline.hpp"
#include "rcook/prng.hpp"
#include "rcook/raster_io.hpp"
#include "rcook/synth.hpp"
#include "rcook/tune.hpp"
#include "rcook/types.hpp"

namespace {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rcook::io_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw rcook::io_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw rcook::io_error(path + ": write failed");
}

struct SynthArgs {
  std::string spec_path, out_x, out_y, out_truth;
};

int run_synth(const SynthArgs& a) {
  const rcook::SceneSpec spec =
      rcook::scene_spec_from_json(read_text_file(a.spec_path));
  const rcook::Scene scene = rcook::generate(spec);
  rcook::save_matrix(scene.x, a.out_x);
  rcook::save_matrix(scene.y, a.out_y);
  rcook::save_mask(scene.truth, a.out_truth);
  return 0;
}

struct DetectArgs {
  std::string x_path, y_path, truth_path;
  std::string method = "cook";
  std::string variant = "classical";
  double sigma = 0.0;
  bool sigma_set = false;
  double lambda = 0.0;
  rcook::Index rff_dim = 100;
  std::uint64_t seed = 0;
  double train_frac = 0.5;
  rcook::Index n_samples = 0;  // 0 = min(10^4, pixels)
  std::string out_scores, out_map, threshold;
};

rcook::DetectorConfig make_config(const DetectArgs& a) {
  rcook::DetectorConfig cfg;
  if (a.method == "cook") {
    cfg.method = rcook::DetectorMethod::Cook;
  } else if (a.method == "rcook") {
    cfg.method = rcook::DetectorMethod::RCook;
    if (!a.sigma_set)
      throw rcook::validation_error(
          "detect: --sigma is required when --method rcook");
    cfg.sigma = a.sigma;
  } else {
    throw rcook::validation_error("detect: --method must be cook or rcook");
  }
  if (a.variant == "classical")
    cfg.variant = rcook::CookVariant::Classical;
  else if (a.variant == "paper-literal")
    cfg.variant = rcook::CookVariant::PaperLiteral;
  else
    throw rcook::validation_error(
        "detect: --variant must be classical or paper-literal");
  cfg.lambda = a.lambda;
  cfg.rff_dim = a.rff_dim;
  cfg.seed = a.seed;
  return cfg;
}

json config_json(const rcook::DetectorConfig& cfg) {
  json j = {
      {"method", cfg.method == rcook::DetectorMethod::Cook ? "cook" : "rcook"},
      {"variant", cfg.variant == rcook::CookVariant::Classical
                      ? "classical"
                      : "paper-literal"},
      {"lambda", cfg.lambda},
      {"seed", cfg.seed},
      {"standardize", cfg.standardize},
  };
  if (cfg.method == rcook::DetectorMethod::RCook) {
    j["sigma"] = cfg.sigma;
    j["D"] = cfg.rff_dim;
  }
  return j;
}

rcook::Index effective_samples(rcook::Index requested, rcook::Index total) {
  if (requested == 0) return std::min<rcook::Index>(10000, total);
  return requested;  // sample_pixels validates the range
}

int run_detect(const DetectArgs& a) {
  const rcook::PixelMatrix x = rcook::load_matrix(a.x_path);
  const rcook::PixelMatrix y = rcook::load_matrix(a.y_path);
  const rcook::DetectorConfig cfg = make_config(a);
  const rcook::Index n_samples = effective_samples(a.n_samples, x.n());

  std::optional<double> threshold;
  if (!a.threshold.empty() && a.threshold != "auto") {
    try {
      size_t used = 0;
      threshold = std::stod(a.threshold, &used);
      if (used != a.threshold.size()) throw std::invalid_argument(a.threshold);
    } catch (const std::exception&) {
      throw rcook::validation_error(
          "detect: --threshold must be 'auto' or a number, got '" +
          a.threshold + "'");
    }
  }

  json out;
  rcook::ScoreMap scores;
  if (!a.truth_path.empty()) {
    const rcook::Mask truth = rcook::load_mask(a.truth_path);
    const rcook::ExperimentReport report = rcook::run_experiment(
        x, y, truth, cfg, n_samples, a.seed, a.train_frac);
    out = json::parse(rcook::report_to_json(report));
    scores = report.scores;
    if (a.threshold == "auto") threshold = report.operating_point.threshold;
  } else {
    if (a.threshold == "auto")
      throw rcook::validation_error(
          "detect: --threshold auto requires --truth");
    const rcook::SampledScene sample =
        rcook::sample_pixels(x, y, rcook::Mask{std::vector<std::uint8_t>(
                                                   static_cast<size_t>(x.n())),
                                               x.rows, x.cols},
                             n_samples, a.seed);
    const rcook::Split split =
        rcook::split_at_fraction(n_samples, a.train_frac);
    rcook::IndexList train_orig(split.train.size());
    for (size_t k = 0; k < split.train.size(); ++k)
      train_orig[k] = sample.indices[static_cast<size_t>(split.train[k])];
    rcook::DetectResult det = rcook::detect(x, y, cfg, train_orig);
    scores = std::move(det.scores);
    out["config"] = config_json(cfg);
    out["n_pixels"] = x.n();
    out["n_samples"] = n_samples;
    out["train_count"] = static_cast<rcook::Index>(train_orig.size());
    out["test_count"] = n_samples - static_cast<rcook::Index>(train_orig.size());
    out["saturated_count"] = static_cast<rcook::Index>(det.saturated.size());
    out["prng_version"] = std::string(rcook::prng::kVersion);
  }

  if (!a.out_scores.empty()) rcook::save_scores(scores, a.out_scores);
  if (threshold) {
    out["threshold_applied"] = *threshold;
    if (!a.out_map.empty())
      rcook::save_mask(rcook::apply_threshold(scores, *threshold), a.out_map);
  } else if (!a.out_map.empty()) {
    rcook::save_heatmap(scores, a.out_map);
  }

  std::cout << out.dump(2) << "\n";
  return 0;
}

struct TuneArgs {
  std::string x_path, y_path, truth_path;
  std::string method = "rcook";
  bool grid_default = false;
  std::string grid_path;
  rcook::Index rff_dim = 100;
  int folds = 5;
  std::uint64_t seed = 0;
  std::string out_path;
  double train_frac = 0.5;
  rcook::Index n_samples = 0;
};

int run_tune(const TuneArgs& a) {
  if (a.grid_default == !a.grid_path.empty())
    throw rcook::validation_error(
        "tune: give exactly one of --grid-default or --grid");
  if (a.method != "cook" && a.method != "rcook")
    throw rcook::validation_error("tune: --method must be cook or rcook");

  rcook::GridSpec grid;
  if (a.grid_default) {
    grid = rcook::default_grid(a.seed);
  } else {
    json g;
    try {
      g = json::parse(read_text_file(a.grid_path));
      if (g.contains("sigma"))
        grid.sigma_grid = g.at("sigma").get<std::vector<double>>();
      grid.lambda_grid = g.at("lambda").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw rcook::validation_error(std::string("tune: bad --grid json: ") +
                                    e.what());
    }
    grid.seed = a.seed;
  }
  grid.folds = a.folds;
  if (a.method == "cook") grid.sigma_grid.clear();

  const rcook::PixelMatrix x = rcook::load_matrix(a.x_path);
  const rcook::PixelMatrix y = rcook::load_matrix(a.y_path);
  const rcook::Mask truth = rcook::load_mask(a.truth_path);
  if (truth.n() != x.n())
    throw rcook::validation_error("tune: truth does not match the raster");

  // cross-validate on the training part of the sampled pixel set
  const rcook::Index n_samples = effective_samples(a.n_samples, x.n());
  const rcook::SampledScene sample =
      rcook::sample_pixels(x, y, truth, n_samples, a.seed);
  const rcook::Split split = rcook::split_at_fraction(n_samples, a.train_frac);
  rcook::PixelMatrix xt, yt;
  rcook::Mask tt;
  const auto nt = static_cast<rcook::Index>(split.train.size());
  xt.rows = yt.rows = tt.rows = static_cast<int>(nt);
  xt.cols = yt.cols = tt.cols = 1;
  xt.data.resize(nt, x.bands());
  yt.data.resize(nt, y.bands());
  tt.data.resize(static_cast<size_t>(nt));
  for (rcook::Index k = 0; k < nt; ++k) {
    xt.data.row(k) = sample.x.data.row(split.train[static_cast<size_t>(k)]);
    yt.data.row(k) = sample.y.data.row(split.train[static_cast<size_t>(k)]);
    tt.data[static_cast<size_t>(k)] =
        sample.truth.data[static_cast<size_t>(split.train[static_cast<size_t>(k)])];
  }

  const rcook::TuneResult result = rcook::cv_tune(xt, yt, tt, grid, a.rff_dim);
  const std::string text = rcook::tune_to_json(result, grid, a.rff_dim);
  if (!a.out_path.empty()) write_text_file(a.out_path, text + "\n");
  std::cout << text << "\n";
  return 0;
}

struct EvalArgs {
  std::string scores_path, truth_path, out_roc;
};

int run_eval(const EvalArgs& a) {
  const rcook::ScoreMap scores = rcook::load_scores(a.scores_path);
  const rcook::Mask truth = rcook::load_mask(a.truth_path);
  const rcook::RocCurve curve = rcook::roc(scores, truth);
  if (!a.out_roc.empty()) rcook::export_roc_csv(curve, a.out_roc);
  const rcook::RocPoint op = rcook::best_operating_point(curve);

  json out;
  out["auc"] = curve.auc;
  out["n_pos"] = truth.count_true();
  out["n_neg"] = truth.n() - truth.count_true();
  out["operating_point"] = {{"fpr", op.fpr},
                            {"tpr", op.tpr},
                            {"threshold", op.threshold}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chronochrome anomalous change detection with linear and "
               "randomized Cook distances"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene pair");
  synth->add_option("--spec", synth_args.spec_path,
                    "Scene spec JSON file")->required();
  synth->add_option("--out-x", synth_args.out_x, "First image output path")
      ->required();
  synth->add_option("--out-y", synth_args.out_y, "Second image output path")
      ->required();
  synth->add_option("--out-truth", synth_args.out_truth,
                    "Ground-truth mask output path")->required();

  DetectArgs detect_args;
  auto* detect = app.add_subcommand("detect", "Score per-pixel changes");
  detect->add_option("--x", detect_args.x_path, "First image")->required();
  detect->add_option("--y", detect_args.y_path, "Second image")->required();
  detect->add_option("--truth", detect_args.truth_path,
                     "Ground-truth mask; enables AUC reporting");
  detect->add_option("--method", detect_args.method, "cook or rcook")
      ->required();
  auto* sigma_opt =
      detect->add_option("--sigma", detect_args.sigma, "Kernel bandwidth");
  detect->add_option("--lambda", detect_args.lambda,
                     "Ridge strength (default 0)");
  detect->add_option("--D", detect_args.rff_dim,
                     "Random feature count (default 100)");
  detect->add_option("--seed", detect_args.seed, "PRNG seed")->required();
  detect->add_option("--train-frac", detect_args.train_frac,
                     "Training fraction of the sampled pixels (default 0.5)");
  detect->add_option("--n-samples", detect_args.n_samples,
                     "Pixels sampled for fitting (default min(10000, n))");
  detect->add_option("--out-scores", detect_args.out_scores,
                     "Score map output path");
  detect->add_option("--out-map", detect_args.out_map,
                     "Anomaly image output: thresholded mask when "
                     "--threshold is set, grayscale heatmap otherwise");
  detect->add_option("--threshold", detect_args.threshold,
                     "'auto' (needs --truth) or a numeric score threshold");
  detect->add_option("--variant", detect_args.variant,
                     "classical or paper-literal (default classical)");

  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "Cross-validated grid search");
  tune->add_option("--x", tune_args.x_path, "First image")->required();
  tune->add_option("--y", tune_args.y_path, "Second image")->required();
  tune->add_option("--truth", tune_args.truth_path, "Ground-truth mask")
      ->required();
  tune->add_option("--method", tune_args.method,
                   "cook or rcook (default rcook)");
  tune->add_flag("--grid-default", tune_args.grid_default,
                 "Use the default 50x50 log grid on [1e-5, 1e4]");
  tune->add_option("--grid", tune_args.grid_path,
                   "Grid JSON file: {\"sigma\": [...], \"lambda\": [...]}");
  tune->add_option("--D", tune_args.rff_dim,
                   "Random feature count (default 100)");
  tune->add_option("--folds", tune_args.folds, "CV folds (default 5)");
  tune->add_option("--seed", tune_args.seed, "PRNG seed")->required();
  tune->add_option("--out", tune_args.out_path, "Result JSON output path");
  tune->add_option("--n-samples", tune_args.n_samples,
                   "Pixels sampled (default min(10000, n))");
  tune->add_option("--train-frac", tune_args.train_frac,
                   "Training fraction of the sample (default 0.5)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "ROC/AUC of a score map");
  eval->add_option("--scores", eval_args.scores_path, "Score map")->required();
  eval->add_option("--truth", eval_args.truth_path, "Ground-truth mask")
      ->required();
  eval->add_option("--out-roc", eval_args.out_roc, "ROC CSV output path");

  EvalArgs export_args;
  auto* roc_export =
      app.add_subcommand("roc-export", "Write the ROC curve of a score map");
  roc_export->add_option("--scores", export_args.scores_path, "Score map")
      ->required();
  roc_export->add_option("--truth", export_args.truth_path,
                         "Ground-truth mask")->required();
  roc_export->add_option("--out-roc", export_args.out_roc,
                         "ROC CSV output path")->required();

  try {
    app.parse(argc, argv);
    detect_args.sigma_set = sigma_opt->count() > 0;
    if (synth->parsed()) return run_synth(synth_args);
    if (detect->parsed()) return run_detect(detect_args);
    if (tune->parsed()) return run_tune(tune_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (roc_export->parsed()) return run_eval(export_args);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const rcook::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const rcook::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
