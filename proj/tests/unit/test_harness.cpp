#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/synthetic.hpp"
#include "tsgc/common.hpp"
#include "tsgc/distance_cache.hpp"
#include "tsgc/harness.hpp"

using namespace tsgc;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Writes the sinusoid fixture as TRAIN/TEST tsv files and returns a source.
DatasetSource write_dataset_pair(const std::filesystem::path& dir, std::size_t n,
                                 std::size_t length, std::uint64_t seed) {
  const auto full = synthetic::sinusoid_dataset(n, length, seed);
  Dataset train = full, test = full;
  train.series.assign(full.series.begin(), full.series.begin() + static_cast<long>(n / 2));
  test.series.assign(full.series.begin() + static_cast<long>(n / 2), full.series.end());
  save_ucr_tsv(train, dir / "Synth_TRAIN.tsv");
  save_ucr_tsv(test, dir / "Synth_TEST.tsv");
  return DatasetSource{{dir / "Synth_TRAIN.tsv", dir / "Synth_TEST.tsv"}, ""};
}

/// Drops the wall_time_s column (index 7) from every CSV line.
std::string strip_wall_time(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == 7) continue;
      out += fields[i];
      out += (i + 1 < fields.size()) ? "," : "";
    }
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("accuracy fractions") {
  const std::vector<int> truth{1, -1, 1, -1};
  CHECK(accuracy({1, -1, 1, -1}, truth, {0, 1, 2, 3}) == 1.0);
  CHECK(accuracy({-1, 1, -1, 1}, truth, {0, 1, 2, 3}) == 0.0);
  CHECK(accuracy({1, -1, 1, 1}, truth, {0, 1, 2, 3}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(accuracy({1}, {1}, {}), MetricError);
}

TEST_CASE("empty result collections give a header-only file") {
  CHECK(results_to_csv({}) ==
        "dataset,distance,method,fraction,seed,accuracy_unlabeled,accuracy_all,wall_time_s,"
        "converged\n");
}

TEST_CASE("a single row yields a two-line file without summary") {
  CellResult cell;
  cell.dataset = "d";
  cell.distance = "dtw";
  cell.method = "ac";
  cell.fraction = 0.1;
  cell.seed_token = "7";
  cell.accuracy_unlabeled = 0.75;
  cell.accuracy_all = 0.8;
  cell.converged = true;
  const auto csv = results_to_csv({cell});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find("summary") == std::string::npos);
}

TEST_CASE("summary rows reproduce the group mean to 1e-12") {
  std::vector<CellResult> cells;
  Rng rng(12);
  double sum = 0.0;
  for (int r = 0; r < 100; ++r) {
    CellResult cell;
    cell.dataset = "d";
    cell.distance = "sdtw";
    cell.method = "gcn";
    cell.fraction = 0.05;
    cell.seed_token = std::to_string(r);
    const double acc = static_cast<double>(rng.next_index(101)) / 100.0;
    sum += acc;
    cell.accuracy_unlabeled = acc;
    cell.accuracy_all = acc;
    cell.converged = true;
    cells.push_back(cell);
  }

  const auto csv = results_to_csv(cells);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);  // header + 100 rows + summary

  std::istringstream in(csv);
  std::string line, summary_line;
  while (std::getline(in, line)) {
    if (line.find(",summary,") != std::string::npos) summary_line = line;
  }
  REQUIRE(!summary_line.empty());
  const auto start = summary_line.find(",summary,") + 9;
  const auto written_mean = std::stod(summary_line.substr(start));
  CHECK(std::abs(written_mean - sum / 100.0) <= 1e-12);
}

TEST_CASE("rows come out sorted regardless of input order") {
  std::vector<CellResult> cells;
  for (const char* seed : {"9", "10", "2"}) {
    CellResult cell;
    cell.dataset = "d";
    cell.distance = "dtw";
    cell.method = "1nn";
    cell.fraction = 0.1;
    cell.seed_token = seed;
    cell.accuracy_all = 0.5;
    cells.push_back(cell);
  }
  const auto csv = results_to_csv(cells);
  const auto p2 = csv.find(",2,");
  const auto p9 = csv.find(",9,");
  const auto p10 = csv.find(",10,");
  CHECK(p2 < p9);
  CHECK(p9 < p10);  // numeric, not lexicographic
}

TEST_CASE("degenerate 1x1x1 grid at fraction 1 reports all-node accuracy only") {
  const auto dir = temp_dir("tsgc_degenerate");
  ExperimentSpec spec;
  spec.datasets = {write_dataset_pair(dir, 12, 16, 5)};
  spec.distance_tokens = {"euclidean"};
  spec.methods = {Method::one_nn};
  spec.fractions = {1.0};
  spec.repeats = 1;

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 1);
  const auto& cell = report.cells[0];
  CHECK(cell.error.empty());
  CHECK(!cell.accuracy_unlabeled.has_value());
  REQUIRE(cell.accuracy_all.has_value());
  CHECK(*cell.accuracy_all == 1.0);  // everything labeled, 1nn copies the input
}

TEST_CASE("second run over the same spec hits the cache for every matrix") {
  const auto dir = temp_dir("tsgc_cachehits");
  ExperimentSpec spec;
  spec.datasets = {write_dataset_pair(dir, 14, 12, 8)};
  spec.distance_tokens = {"dtw", "sdtw"};
  spec.methods = {Method::one_nn};
  spec.fractions = {0.5};
  spec.cache_dir = dir / "cache";

  const auto first = run_experiment(spec);
  CHECK(first.cache_misses == 2);
  CHECK(first.cache_hits == 0);

  const auto second = run_experiment(spec);
  CHECK(second.cache_misses == 0);
  CHECK(second.cache_hits == 2);

  // Cached bytes reload to exactly the freshly computed matrix.
  const auto ds = load_ucr_files(spec.datasets[0].paths);
  const auto kind = resolve_distance(spec, "sdtw");
  const auto fresh = pairwise_distance_matrix(ds, kind);
  const auto cache_path = spec.cache_dir / cache_file_name(fresh.dataset_fingerprint, kind);
  const auto cached = load_distance_matrix(cache_path, fresh.dataset_fingerprint, kind);
  CHECK((cached.entries - fresh.entries).norm() == 0.0);

  // A corrupt cache entry is recomputed rather than failing the cells.
  {
    std::ofstream out(cache_path, std::ios::binary);
    out << "garbage";
  }
  const auto third = run_experiment(spec);
  CHECK(third.cache_hits == 1);    // dtw entry still intact
  CHECK(third.cache_misses == 1);  // sdtw recomputed and re-cached
  for (const auto& cell : third.cells) CHECK(cell.error.empty());
}

TEST_CASE("identical spec and seed reproduce the CSV except wall times") {
  const auto dir = temp_dir("tsgc_determinism");
  ExperimentSpec spec;
  spec.datasets = {write_dataset_pair(dir, 16, 12, 3)};
  spec.distance_tokens = {"euclidean", "dtw"};
  spec.methods = {Method::allen_cahn, Method::one_nn, Method::linear_system};
  spec.fractions = {0.25, 0.5};
  spec.repeats = 2;
  spec.base_seed = 99;
  spec.cache_dir = dir / "cache";

  const auto a = results_to_csv(run_experiment(spec).cells);
  const auto b = results_to_csv(run_experiment(spec).cells);
  CHECK(strip_wall_time(a) == strip_wall_time(b));
  CHECK(a.find("error") == std::string::npos);
}

TEST_CASE("fixed archive split labels the TRAIN block") {
  const auto dir = temp_dir("tsgc_fixed");
  ExperimentSpec spec;
  spec.datasets = {write_dataset_pair(dir, 20, 16, 13)};
  spec.distance_tokens = {"dtw"};
  spec.methods = {Method::one_nn};
  spec.split_mode = SplitMode::fixed_archive_train;

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].seed_token == "archive");
  CHECK(report.cells[0].fraction == doctest::Approx(0.5));
  CHECK(report.cells[0].accuracy_unlabeled.has_value());
}

TEST_CASE("the full pipeline learns a separable synthetic problem") {
  const auto dir = temp_dir("tsgc_e2e");
  ExperimentSpec spec;
  spec.datasets = {write_dataset_pair(dir, 40, 24, 17)};
  spec.distance_tokens = {"dtw", "sdtw"};
  spec.methods = {Method::allen_cahn, Method::linear_system, Method::gcn, Method::one_nn};
  spec.fractions = {0.25};
  spec.repeats = 1;
  spec.base_seed = 5;
  spec.gcn.epochs = 200;

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 8);
  for (const auto& cell : report.cells) {
    INFO(cell.distance, "/", cell.method);
    CHECK(cell.error.empty());
    REQUIRE(cell.accuracy_unlabeled.has_value());
    CHECK(*cell.accuracy_unlabeled >= 0.7);
  }
}

TEST_CASE("grids span several datasets") {
  const auto dir = temp_dir("tsgc_multids");
  save_ucr_tsv(synthetic::sinusoid_dataset(10, 12, 4), dir / "A.tsv");
  save_ucr_tsv(synthetic::sinusoid_dataset(14, 10, 9), dir / "B.tsv");
  ExperimentSpec spec;
  spec.datasets = {DatasetSource{{dir / "A.tsv"}, ""}, DatasetSource{{dir / "B.tsv"}, ""}};
  spec.distance_tokens = {"euclidean", "mpdist"};
  spec.methods = {Method::one_nn, Method::linear_system};
  spec.fractions = {0.4};

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 8);  // 2 datasets x 2 distances x 2 methods
  int a_rows = 0, b_rows = 0;
  for (const auto& cell : report.cells) {
    CHECK(cell.error.empty());
    (cell.dataset == "A" ? a_rows : b_rows)++;
  }
  CHECK(a_rows == 4);
  CHECK(b_rows == 4);
}

TEST_CASE("failed cells are recorded without aborting the grid") {
  const auto dir = temp_dir("tsgc_badcell");
  ExperimentSpec spec;
  // Ragged series: euclidean must fail, dtw must succeed.
  Dataset ds;
  ds.name = "ragged";
  ds.class_tokens = {"a", "b"};
  for (int i = 0; i < 8; ++i) {
    TimeSeries ts;
    ts.label = i % 2 == 0 ? -1 : 1;
    ts.values.assign(static_cast<std::size_t>(4 + i % 3), 0.1 * i);
    ds.series.push_back(ts);
  }
  save_ucr_tsv(ds, dir / "ragged.tsv");
  spec.datasets = {DatasetSource{{dir / "ragged.tsv"}, ""}};
  spec.distance_tokens = {"euclidean", "dtw"};
  spec.methods = {Method::one_nn};
  spec.fractions = {0.5};

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 2);
  int failed = 0, ok = 0;
  for (const auto& cell : report.cells) {
    if (cell.error.empty()) {
      ++ok;
      CHECK(cell.distance == "dtw");
    } else {
      ++failed;
      CHECK(cell.distance == "euclidean");
      CHECK(!cell.accuracy_all.has_value());
    }
  }
  CHECK(failed == 1);
  CHECK(ok == 1);
}

TEST_CASE("fixed split without an archive boundary yields failed rows, not an abort") {
  const auto dir = temp_dir("tsgc_noboundary");
  save_ucr_tsv(synthetic::sinusoid_dataset(10, 8, 1), dir / "single.tsv");
  ExperimentSpec spec;
  spec.datasets = {DatasetSource{{dir / "single.tsv"}, ""}};
  spec.distance_tokens = {"dtw"};
  spec.methods = {Method::one_nn, Method::linear_system};
  spec.split_mode = SplitMode::fixed_archive_train;  // single file: no TRAIN/TEST boundary

  const auto report = run_experiment(spec);
  REQUIRE(report.cells.size() == 2);
  for (const auto& cell : report.cells) {
    CHECK(!cell.error.empty());
    CHECK(!cell.accuracy_all.has_value());
  }
}

TEST_CASE("config files parse every key and reject unknown ones") {
  const auto dir = temp_dir("tsgc_config");
  const auto path = dir / "exp.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "dataset = a_TRAIN.tsv, a_TEST.tsv\n"
        << "dataset = b.tsv\n"
        << "distance = sdtw, mpdist\n"
        << "method = ac, gcn, 1nn\n"
        << "split = fixed\n"
        << "fractions = 0.01, 0.2\n"
        << "repeats = 100\n"
        << "seed = 42\n"
        << "self_tuning_k = 20\n"
        << "znormalize = true\n"
        << "cache_dir = /tmp/c\n"
        << "out = r.csv\n"
        << "sdtw_gamma = 0.25\n"
        << "mpdist_window_fraction = 0.4\n"
        << "mpdist_k_fraction = 0.1\n"
        << "ac_eigenpairs = 30\n"
        << "ac_omega = 1e8\n"
        << "ac_epsilon = 0.05\n"
        << "ls_beta = 2\n"
        << "gcn_epochs = 123\n"
        << "gcn_features = identity\n";
  }
  const auto spec = parse_config_file(path);
  CHECK(spec.datasets.size() == 2);
  CHECK(spec.datasets[0].paths.size() == 2);
  CHECK(spec.distance_tokens == std::vector<std::string>{"sdtw", "mpdist"});
  CHECK(spec.methods.size() == 3);
  CHECK(spec.split_mode == SplitMode::fixed_archive_train);
  CHECK(spec.fractions == std::vector<double>{0.01, 0.2});
  CHECK(spec.repeats == 100);
  CHECK(spec.base_seed == 42);
  CHECK(spec.self_tuning_k == 20);
  CHECK(spec.znormalize_series);
  CHECK(spec.cache_dir == "/tmp/c");
  CHECK(spec.out_csv == "r.csv");
  CHECK(spec.sdtw_gamma == 0.25);
  CHECK(spec.mpdist_window_fraction == 0.4);
  CHECK(spec.mpdist_k_fraction == 0.1);
  CHECK(spec.allen_cahn.eigenpair_count == 30);
  CHECK(spec.allen_cahn.omega == 1e8);
  CHECK(spec.allen_cahn.epsilon == 0.05);
  CHECK(spec.linear_system.beta == 2.0);
  CHECK(spec.gcn.epochs == 123);
  CHECK(spec.gcn_features == GcnFeatureKind::identity);

  {
    std::ofstream out(path, std::ios::app);
    out << "no_such_key = 1\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), ParseError);
}

TEST_CASE("bench produces one timing row per length") {
  const auto rows = bench_distances({16, 32}, 3, 1);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.euclidean_s >= 0.0);
    CHECK(r.dtw_s > 0.0);
    CHECK(r.sdtw_s > 0.0);
    CHECK(r.mpdist_s > 0.0);
  }
  CHECK_THROWS_AS(bench_distances({1}, 3), std::invalid_argument);
}

TEST_CASE("euclidean is no slower than dtw on length-1000 series") {
  const auto rows = bench_distances({1000}, 3, 2);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].euclidean_s <= rows[0].dtw_s);
}
