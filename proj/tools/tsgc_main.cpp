// tsgc — semi-supervised time-series classification on similarity graphs.
//
//   tsgc run   --config exp.cfg [--dataset ...] [--distance ...] [--method ...] ...
//   tsgc bench --lengths 10,100,1000 --repeats 5

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "tsgc/harness.hpp"

namespace {

std::vector<double> parse_fraction_list(const std::string& csv) {
  std::vector<double> out;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      out.push_back(std::stod(current));
      current.clear();
    }
  };
  for (char c : csv) {
    if (c == ',') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

std::vector<std::size_t> parse_length_list(const std::string& csv) {
  std::vector<std::size_t> out;
  for (double v : parse_fraction_list(csv)) out.push_back(static_cast<std::size_t>(v));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based semi-supervised time series classification"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run a distance x method experiment grid");
  std::string config_path;
  std::vector<std::string> dataset_args, distance_args, method_args;
  std::string split_arg, fractions_arg, features_arg;
  int repeats = 0, self_tuning_k = 0, threads = -1;
  std::uint64_t seed = 0;
  std::string cache_dir, out_path;
  bool znorm = false, mpdist_znorm = false, quiet = false;
  double sdtw_gamma = 0, mp_wf = 0, mp_kf = 0;
  int ac_eigenpairs = 0, ac_max_iters = 0;
  double ac_epsilon = 0, ac_omega = 0, ac_c = 0, ac_tau = 0, ac_tol = 0;
  double ls_beta = 0, ls_tol = 0;
  int gcn_knn = 0, gcn_hidden = 0, gcn_epochs = 0;
  double gcn_dropout = 0, gcn_lr = 0, gcn_wd = 0;

  run->add_option("--config", config_path, "Key=value experiment config file");
  run->add_option("--dataset", dataset_args,
                  "Dataset as comma-separated file list (repeatable); archive TRAIN file first");
  run->add_option("--distance", distance_args, "euclidean|dtw|sdtw|mpdist (repeatable)");
  run->add_option("--method", method_args, "ac|ls|gcn|1nn (repeatable)");
  run->add_option("--split", split_arg, "fixed|random");
  run->add_option("--fractions", fractions_arg, "Labeled fractions, e.g. 0.01,0.05,0.1,0.2");
  run->add_option("--repeats", repeats, "Random splits per fraction");
  run->add_option("--seed", seed, "Base seed; split r uses seed+r");
  run->add_option("--self-tuning-k", self_tuning_k, "Neighbor rank for the kernel scales");
  run->add_option("--cache-dir", cache_dir, "Distance matrix cache directory");
  run->add_option("--out", out_path, "Result CSV path");
  run->add_flag("--znormalize", znorm, "Z-normalize each series at load");
  run->add_option("--threads", threads, "Worker threads (0 = hardware)");
  run->add_flag("--quiet", quiet, "Suppress progress output");
  run->add_option("--sdtw-gamma", sdtw_gamma, "Soft-DTW smoothing");
  run->add_option("--mpdist-window-fraction", mp_wf, "MPdist window share");
  run->add_option("--mpdist-k-fraction", mp_kf, "MPdist rank share");
  run->add_flag("--mpdist-znorm", mpdist_znorm, "Z-normalize MPdist windows");
  run->add_option("--ac-eigenpairs", ac_eigenpairs, "Allen-Cahn eigenpair count");
  run->add_option("--ac-epsilon", ac_epsilon, "Interface width (default 1/sqrt(n))");
  run->add_option("--ac-omega", ac_omega, "Fidelity strength");
  run->add_option("--ac-c", ac_c, "Convexity constant (default 3/eps + omega)");
  run->add_option("--ac-tau", ac_tau, "Pseudo time step");
  run->add_option("--ac-tol", ac_tol, "Relative-change stop tolerance");
  run->add_option("--ac-max-iters", ac_max_iters, "Iteration cap");
  run->add_option("--ls-beta", ls_beta, "Linear-system regularization");
  run->add_option("--ls-tol", ls_tol, "CG relative residual tolerance");
  run->add_option("--gcn-knn", gcn_knn, "Sparsification degree");
  run->add_option("--gcn-hidden", gcn_hidden, "Hidden width");
  run->add_option("--gcn-dropout", gcn_dropout, "Dropout probability");
  run->add_option("--gcn-lr", gcn_lr, "Learning rate");
  run->add_option("--gcn-weight-decay", gcn_wd, "First-layer weight decay");
  run->add_option("--gcn-epochs", gcn_epochs, "Training epochs");
  run->add_option("--gcn-features", features_arg, "wrows|identity");

  // --- bench --------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Time the four distances on random series");
  std::string bench_lengths = "10,100,1000";
  int bench_repeats = 5;
  std::uint64_t bench_seed = 0;
  bench->add_option("--lengths", bench_lengths, "Series lengths, comma separated");
  bench->add_option("--repeats", bench_repeats, "Timing repeats per measure (median)");
  bench->add_option("--seed", bench_seed, "Series generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      tsgc::ExperimentSpec spec;
      if (!config_path.empty()) spec = tsgc::parse_config_file(config_path);

      // CLI flags win over config values.
      if (!dataset_args.empty()) {
        spec.datasets.clear();
        for (const auto& arg : dataset_args) {
          tsgc::DatasetSource source;
          std::string current;
          for (char c : arg + ",") {
            if (c == ',') {
              if (!current.empty()) source.paths.emplace_back(current);
              current.clear();
            } else {
              current.push_back(c);
            }
          }
          spec.datasets.push_back(std::move(source));
        }
      }
      if (!distance_args.empty()) {
        for (const auto& t : distance_args) tsgc::DistanceKind::from_token(t);
        spec.distance_tokens = distance_args;
      }
      if (!method_args.empty()) {
        spec.methods.clear();
        for (const auto& t : method_args) spec.methods.push_back(tsgc::method_from_token(t));
      }
      if (run->count("--split")) {
        if (split_arg == "fixed") {
          spec.split_mode = tsgc::SplitMode::fixed_archive_train;
        } else if (split_arg == "random") {
          spec.split_mode = tsgc::SplitMode::random;
        } else {
          throw std::invalid_argument("--split must be fixed or random");
        }
      }
      if (run->count("--fractions")) spec.fractions = parse_fraction_list(fractions_arg);
      if (run->count("--repeats")) spec.repeats = repeats;
      if (run->count("--seed")) spec.base_seed = seed;
      if (run->count("--self-tuning-k")) spec.self_tuning_k = self_tuning_k;
      if (run->count("--cache-dir")) spec.cache_dir = cache_dir;
      if (run->count("--out")) spec.out_csv = out_path;
      if (run->count("--znormalize")) spec.znormalize_series = znorm;
      if (run->count("--threads")) spec.threads = threads;
      if (run->count("--sdtw-gamma")) spec.sdtw_gamma = sdtw_gamma;
      if (run->count("--mpdist-window-fraction")) spec.mpdist_window_fraction = mp_wf;
      if (run->count("--mpdist-k-fraction")) spec.mpdist_k_fraction = mp_kf;
      if (run->count("--mpdist-znorm")) spec.mpdist_znorm = mpdist_znorm;
      if (run->count("--ac-eigenpairs")) spec.allen_cahn.eigenpair_count = ac_eigenpairs;
      if (run->count("--ac-epsilon")) spec.allen_cahn.epsilon = ac_epsilon;
      if (run->count("--ac-omega")) spec.allen_cahn.omega = ac_omega;
      if (run->count("--ac-c")) spec.allen_cahn.convexity = ac_c;
      if (run->count("--ac-tau")) spec.allen_cahn.tau = ac_tau;
      if (run->count("--ac-tol")) spec.allen_cahn.tol = ac_tol;
      if (run->count("--ac-max-iters")) spec.allen_cahn.max_iters = ac_max_iters;
      if (run->count("--ls-beta")) spec.linear_system.beta = ls_beta;
      if (run->count("--ls-tol")) spec.linear_system.tol = ls_tol;
      if (run->count("--gcn-knn")) spec.gcn.knn = gcn_knn;
      if (run->count("--gcn-hidden")) spec.gcn.hidden = gcn_hidden;
      if (run->count("--gcn-dropout")) spec.gcn.dropout = gcn_dropout;
      if (run->count("--gcn-lr")) spec.gcn.learning_rate = gcn_lr;
      if (run->count("--gcn-weight-decay")) spec.gcn.weight_decay = gcn_wd;
      if (run->count("--gcn-epochs")) spec.gcn.epochs = gcn_epochs;
      if (run->count("--gcn-features")) {
        if (features_arg == "wrows") {
          spec.gcn_features = tsgc::GcnFeatureKind::weight_rows;
        } else if (features_arg == "identity") {
          spec.gcn_features = tsgc::GcnFeatureKind::identity;
        } else {
          throw std::invalid_argument("--gcn-features must be wrows or identity");
        }
      }

      const auto report = tsgc::run_experiment(spec, quiet ? nullptr : &std::cerr);
      tsgc::write_results(report.cells, spec.out_csv);
      if (!quiet) {
        std::cerr << "wrote " << report.cells.size() << " cells to " << spec.out_csv.string()
                  << "\n";
      }
    } else if (bench->parsed()) {
      const auto rows = tsgc::bench_distances(parse_length_list(bench_lengths), bench_repeats,
                                              bench_seed);
      std::printf("%10s %14s %14s %14s %14s\n", "length", "euclidean_s", "dtw_s", "sdtw_s",
                  "mpdist_s");
      for (const auto& r : rows) {
        std::printf("%10zu %14.6e %14.6e %14.6e %14.6e\n", r.length, r.euclidean_s, r.dtw_s,
                    r.sdtw_s, r.mpdist_s);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
