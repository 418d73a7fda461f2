#pragma once

// Experiment orchestration: runs the dataset x distance x method x split
// grid with distance-matrix caching, and writes result tables as CSV.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tsgc/distance.hpp"
#include "tsgc/gcn.hpp"
#include "tsgc/solvers.hpp"

namespace tsgc {

enum class Method { allen_cahn, linear_system, gcn, one_nn };

/// CLI/CSV tokens: ac | ls | gcn | 1nn.
std::string method_token(Method m);
Method method_from_token(const std::string& token);

enum class SplitMode { fixed_archive_train, random };
enum class GcnFeatureKind { weight_rows, identity };

struct DatasetSource {
  std::vector<std::filesystem::path> paths;  // concatenated into one pool
  std::string name;                          // empty = derive from first path
};

struct ExperimentSpec {
  std::vector<DatasetSource> datasets;
  std::vector<std::string> distance_tokens;  // euclidean | dtw | sdtw | mpdist
  std::vector<Method> methods;
  int self_tuning_k = 7;
  SplitMode split_mode = SplitMode::random;
  std::vector<double> fractions = {0.1};
  int repeats = 1;
  std::uint64_t base_seed = 0;
  bool znormalize_series = false;

  // Distance parameters applied when tokens are resolved.
  double sdtw_gamma = 1.0;
  double mpdist_window_fraction = 0.5;
  double mpdist_k_fraction = 0.05;
  bool mpdist_znorm = false;

  AllenCahnParams allen_cahn;
  LinearSystemParams linear_system;
  GcnParams gcn;
  GcnFeatureKind gcn_features = GcnFeatureKind::weight_rows;

  std::filesystem::path cache_dir;  // empty disables the on-disk cache
  std::filesystem::path out_csv = "results.csv";
  int threads = 0;
};

/// One grid cell. A failed cell carries its message in `error` and empty
/// accuracies; the grid never aborts because of one cell.
struct CellResult {
  std::string dataset;
  std::string distance;
  std::string method;
  double fraction = 0.0;
  std::string seed_token;  // split seed, or "archive" for the fixed split
  std::optional<double> accuracy_unlabeled;  // absent when every node is labeled
  std::optional<double> accuracy_all;
  double wall_time_s = 0.0;
  bool converged = false;
  std::string error;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  int cache_hits = 0;
  int cache_misses = 0;
};

/// Fraction of eval_indices where predicted matches truth.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                const std::vector<std::size_t>& eval_indices);

/// Builds the DistanceKind for one token under this spec's parameters.
DistanceKind resolve_distance(const ExperimentSpec& spec, const std::string& token);

/// Runs the full grid. Deterministic in the spec and base_seed (split seed
/// for repeat r is base_seed + r). Progress notes go to `log` when given.
ExperimentReport run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

/// CSV with header dataset,distance,method,fraction,seed,accuracy_unlabeled,
/// accuracy_all,wall_time_s,converged. Rows are sorted; groups of at least
/// two rows get a mean±std summary row with seed field "summary".
std::string results_to_csv(std::vector<CellResult> cells);
void write_results(const std::vector<CellResult>& cells, const std::filesystem::path& path);

/// Key=value experiment config ('#' starts a comment). Unknown keys raise
/// ParseError. CLI flags are meant to be applied on top of the result.
ExperimentSpec parse_config_file(const std::filesystem::path& path);

struct BenchRow {
  std::size_t length = 0;
  double euclidean_s = 0.0;
  double dtw_s = 0.0;
  double sdtw_s = 0.0;
  double mpdist_s = 0.0;
};

/// Median wall time of each distance on random series pairs of the given
/// lengths. Informational only.
std::vector<BenchRow> bench_distances(const std::vector<std::size_t>& lengths, int repeats,
                                      std::uint64_t seed = 0);

}  // namespace tsgc
