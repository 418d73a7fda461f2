#include "tsgc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "tsgc/common.hpp"
#include "tsgc/distance_cache.hpp"

namespace tsgc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v, const char* fmt = "%.15g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::vector<std::string> split_list(const std::string& value, const char* separators = ",;") {
  std::vector<std::string> parts;
  std::string current;
  auto flush = [&]() {
    const auto b = current.find_first_not_of(" \t");
    if (b != std::string::npos) {
      const auto e = current.find_last_not_of(" \t");
      parts.push_back(current.substr(b, e - b + 1));
    }
    current.clear();
  };
  for (char c : value) {
    if (std::strchr(separators, c)) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return parts;
}

}  // namespace

std::string method_token(Method m) {
  switch (m) {
    case Method::allen_cahn: return "ac";
    case Method::linear_system: return "ls";
    case Method::gcn: return "gcn";
    case Method::one_nn: return "1nn";
  }
  return "?";
}

Method method_from_token(const std::string& token) {
  if (token == "ac") return Method::allen_cahn;
  if (token == "ls") return Method::linear_system;
  if (token == "gcn") return Method::gcn;
  if (token == "1nn") return Method::one_nn;
  throw std::invalid_argument("unknown method token: " + token);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                const std::vector<std::size_t>& eval_indices) {
  if (eval_indices.empty()) throw MetricError("accuracy over an empty evaluation set");
  if (predicted.size() != truth.size()) throw MetricError("prediction/truth size mismatch");
  std::size_t correct = 0;
  for (std::size_t i : eval_indices) {
    if (i >= predicted.size()) throw MetricError("evaluation index out of range");
    if (predicted[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(eval_indices.size());
}

DistanceKind resolve_distance(const ExperimentSpec& spec, const std::string& token) {
  DistanceKind kind = DistanceKind::from_token(token);
  switch (kind.tag) {
    case DistanceTag::soft_dtw_divergence:
      kind.gamma = spec.sdtw_gamma;
      break;
    case DistanceTag::mp_dist:
      kind.window_fraction = spec.mpdist_window_fraction;
      kind.k_fraction = spec.mpdist_k_fraction;
      kind.znorm_subsequences = spec.mpdist_znorm;
      break;
    default:
      break;
  }
  return kind;
}

namespace {

/// Everything shared by the cells of one dataset x distance pair. Pieces a
/// method needs that failed to build carry their error message instead.
struct GridContext {
  std::string dataset_name;
  const Dataset* dataset = nullptr;
  DistanceMatrix matrix;
  SimilarityGraph graph;
  NormalizedLaplacian laplacian;
  std::optional<SpectralBasis> basis;
  std::string basis_error;
  std::optional<SimilarityGraph> sparsified;
  Eigen::MatrixXd gcn_features;
  std::string gcn_error;
};

struct CellJob {
  const GridContext* context;
  Method method;
  LabeledSplit split;
  std::string seed_token;
  double fraction;
  std::uint64_t cell_seed;
};

std::vector<int> truth_labels(const Dataset& dataset) {
  std::vector<int> truth(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) truth[i] = dataset.series[i].label;
  return truth;
}

CellResult run_cell(const ExperimentSpec& spec, const CellJob& job) {
  const GridContext& ctx = *job.context;
  CellResult cell;
  cell.dataset = ctx.dataset_name;
  cell.distance = ctx.matrix.kind.token();
  cell.method = method_token(job.method);
  cell.fraction = job.fraction;
  cell.seed_token = job.seed_token;

  const auto start = Clock::now();
  try {
    const LabelVector f = labels_from_split(*ctx.dataset, job.split);
    std::vector<int> predicted;
    bool converged = true;

    switch (job.method) {
      case Method::allen_cahn: {
        if (!ctx.basis) throw NumericError(ctx.basis_error);
        AllenCahnParams params = spec.allen_cahn;
        auto result = allen_cahn_classify(*ctx.basis, f, params);
        predicted = std::move(result.labels);
        converged = result.converged;
        break;
      }
      case Method::linear_system: {
        auto result = linear_system_classify(ctx.laplacian, f, spec.linear_system);
        predicted = std::move(result.labels);
        break;
      }
      case Method::gcn: {
        if (!ctx.sparsified) throw GraphError(ctx.gcn_error);
        GcnParams params = spec.gcn;
        params.seed = job.cell_seed;
        auto result = gcn_train_and_classify(*ctx.sparsified, ctx.gcn_features, f, params);
        predicted = std::move(result.labels);
        break;
      }
      case Method::one_nn:
        predicted = one_nn_classify(ctx.matrix, f);
        break;
    }

    const std::vector<int> truth = truth_labels(*ctx.dataset);
    std::vector<char> is_labeled(ctx.dataset->size(), 0);
    for (std::size_t i : job.split.labeled_indices) is_labeled[i] = 1;
    std::vector<std::size_t> unlabeled, all(ctx.dataset->size());
    for (std::size_t i = 0; i < ctx.dataset->size(); ++i) {
      all[i] = i;
      if (!is_labeled[i]) unlabeled.push_back(i);
    }
    cell.accuracy_all = accuracy(predicted, truth, all);
    if (!unlabeled.empty()) cell.accuracy_unlabeled = accuracy(predicted, truth, unlabeled);
    cell.converged = converged;
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.converged = false;
  }
  cell.wall_time_s = seconds_since(start);
  return cell;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, std::ostream* log) {
  if (spec.datasets.empty()) throw std::invalid_argument("experiment needs at least one dataset");
  if (spec.distance_tokens.empty()) throw std::invalid_argument("experiment needs a distance");
  if (spec.methods.empty()) throw std::invalid_argument("experiment needs a method");
  if (spec.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  for (double f : spec.fractions) {
    if (!(f > 0.0) || f > 1.0) throw std::invalid_argument("fractions must lie in (0, 1]");
  }

  ExperimentReport report;
  const bool use_cache = !spec.cache_dir.empty();
  if (use_cache) std::filesystem::create_directories(spec.cache_dir);

  const bool wants_ac = std::count(spec.methods.begin(), spec.methods.end(), Method::allen_cahn);
  const bool wants_gcn = std::count(spec.methods.begin(), spec.methods.end(), Method::gcn);

  std::vector<std::unique_ptr<Dataset>> datasets;
  std::vector<std::unique_ptr<GridContext>> contexts;
  std::vector<CellJob> jobs;
  std::vector<CellResult> failed_rows;

  auto enumerate_splits = [&](const Dataset& ds) {
    // (split, seed token, fraction, cell seed) tuples for one dataset.
    struct SplitSpec {
      LabeledSplit split;
      std::string token;
      double fraction;
      std::uint64_t seed;
    };
    std::vector<SplitSpec> out;
    if (spec.split_mode == SplitMode::fixed_archive_train) {
      auto split = archive_train_split(ds);
      const double fraction = split.fraction;
      out.push_back({std::move(split), "archive", fraction, spec.base_seed});
    } else {
      for (double fraction : spec.fractions) {
        for (int r = 0; r < spec.repeats; ++r) {
          const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(r);
          out.push_back({random_split(ds, fraction, seed), std::to_string(seed), fraction, seed});
        }
      }
    }
    return out;
  };

  for (const auto& source : spec.datasets) {
    std::string name = source.name;
    std::unique_ptr<Dataset> dataset;
    try {
      dataset = std::make_unique<Dataset>(load_ucr_files(source.paths, source.name));
      if (spec.znormalize_series) znormalize(*dataset);
      name = dataset->name;
    } catch (const std::exception& e) {
      // The whole dataset is unusable: one failed row per would-be cell group.
      if (name.empty() && !source.paths.empty()) name = source.paths[0].stem().string();
      for (const auto& token : spec.distance_tokens) {
        for (Method m : spec.methods) {
          CellResult cell;
          cell.dataset = name;
          cell.distance = token;
          cell.method = method_token(m);
          cell.seed_token = "load";
          cell.error = e.what();
          failed_rows.push_back(cell);
        }
      }
      if (log) *log << "dataset " << name << " failed to load: " << e.what() << "\n";
      continue;
    }

    const std::string fingerprint = dataset_fingerprint(*dataset);
    const Dataset& ds = *datasets.emplace_back(std::move(dataset));

    for (const auto& token : spec.distance_tokens) {
      const DistanceKind kind = resolve_distance(spec, token);
      auto ctx = std::make_unique<GridContext>();
      ctx->dataset_name = name;
      ctx->dataset = &ds;
      try {
        bool loaded = false;
        const std::filesystem::path cache_path =
            use_cache ? spec.cache_dir / cache_file_name(fingerprint, kind)
                      : std::filesystem::path();
        if (use_cache && std::filesystem::exists(cache_path)) {
          try {
            ctx->matrix = load_distance_matrix(cache_path, fingerprint, kind);
            if (ctx->matrix.size() != ds.size()) {
              throw IoError("cached matrix size mismatch for " + cache_path.string());
            }
            ++report.cache_hits;
            loaded = true;
            if (log) *log << name << "/" << token << ": cache hit\n";
          } catch (const IoError& e) {
            // Unreadable cache entries are recomputed, not fatal.
            if (log) *log << name << "/" << token << ": " << e.what() << "; recomputing\n";
          }
        }
        if (!loaded) {
          const auto t0 = Clock::now();
          ctx->matrix = pairwise_distance_matrix(ds, kind, spec.threads);
          ++report.cache_misses;
          if (use_cache) save_distance_matrix(ctx->matrix, cache_path);
          if (log) {
            *log << name << "/" << token << ": distance matrix computed in "
                 << format_double(seconds_since(t0), "%.2f") << " s\n";
          }
        }

        const int k = std::min<int>(spec.self_tuning_k, static_cast<int>(ds.size()) - 1);
        const auto scales = self_tuning_scales(ctx->matrix, k);
        ctx->graph = gaussian_adjacency(ctx->matrix, scales);
        ctx->laplacian = sym_normalized_laplacian(ctx->graph);
      } catch (const std::exception& e) {
        // No graph, no cells: fail every method for this pair.
        for (Method m : spec.methods) {
          CellResult cell;
          cell.dataset = name;
          cell.distance = token;
          cell.method = method_token(m);
          cell.seed_token = "context";
          cell.error = e.what();
          failed_rows.push_back(cell);
        }
        if (log) *log << name << "/" << token << " context failed: " << e.what() << "\n";
        continue;
      }

      if (wants_ac) {
        try {
          const int m_e =
              std::min<int>(spec.allen_cahn.eigenpair_count, static_cast<int>(ds.size()));
          ctx->basis = smallest_eigenpairs(ctx->laplacian, m_e);
        } catch (const std::exception& e) {
          ctx->basis_error = e.what();
        }
      }
      if (wants_gcn) {
        try {
          const int k = std::min<int>(spec.gcn.knn, static_cast<int>(ds.size()) - 1);
          ctx->sparsified = knn_sparsify(ctx->graph, k);
          ctx->gcn_features = spec.gcn_features == GcnFeatureKind::weight_rows
                                  ? ctx->graph.weights
                                  : identity_features(ds.size());
        } catch (const std::exception& e) {
          ctx->gcn_error = e.what();
        }
      }

      const GridContext* context = contexts.emplace_back(std::move(ctx)).get();
      try {
        for (auto& s : enumerate_splits(ds)) {
          for (Method m : spec.methods) {
            jobs.push_back({context, m, s.split, s.token, s.fraction, s.seed});
          }
        }
      } catch (const std::exception& e) {
        for (Method m : spec.methods) {
          CellResult cell;
          cell.dataset = name;
          cell.distance = token;
          cell.method = method_token(m);
          cell.seed_token = "split";
          cell.error = e.what();
          failed_rows.push_back(cell);
        }
      }
    }
  }

  report.cells.resize(jobs.size());
  parallel_for(
      jobs.size(), [&](std::size_t i) { report.cells[i] = run_cell(spec, jobs[i]); },
      spec.threads);
  report.cells.insert(report.cells.end(), failed_rows.begin(), failed_rows.end());

  if (log) {
    std::size_t failures = 0;
    for (const auto& c : report.cells) {
      if (!c.error.empty()) ++failures;
    }
    *log << report.cells.size() << " cells (" << failures << " failed), cache hits "
         << report.cache_hits << ", misses " << report.cache_misses << "\n";
  }
  return report;
}

namespace {

struct RowKey {
  std::string dataset, distance, method;
  double fraction;
  // "archive"/"load" style tokens order before numeric seeds.
  int seed_class;
  long long seed_value;
  std::string seed_token;

  static RowKey of(const CellResult& c) {
    RowKey k{c.dataset, c.distance, c.method, c.fraction, 0, 0, c.seed_token};
    try {
      std::size_t pos = 0;
      k.seed_value = std::stoll(c.seed_token, &pos);
      k.seed_class = pos == c.seed_token.size() ? 1 : 0;
    } catch (...) {
      k.seed_class = 0;
    }
    return k;
  }

  bool operator<(const RowKey& o) const {
    return std::tie(dataset, distance, method, fraction, seed_class, seed_value, seed_token) <
           std::tie(o.dataset, o.distance, o.method, o.fraction, o.seed_class, o.seed_value,
                    o.seed_token);
  }
};

std::string csv_accuracy(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void append_row(std::string& out, const CellResult& c) {
  out += c.dataset + ',' + c.distance + ',' + c.method + ',' + format_double(c.fraction) + ',' +
         c.seed_token + ',' + csv_accuracy(c.accuracy_unlabeled) + ',' +
         csv_accuracy(c.accuracy_all) + ',' + format_double(c.wall_time_s, "%.6f") + ',' +
         (c.converged ? "1" : "0") + '\n';
}

struct Stats {
  std::size_t count = 0;
  double sum = 0.0, sum_sq = 0.0;

  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double stddev() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / static_cast<double>(count) - m * m));
  }
  std::string cell() const {
    if (count == 0) return "";
    return format_double(mean()) + "±" + format_double(stddev());
  }
};

}  // namespace

std::string results_to_csv(std::vector<CellResult> cells) {
  std::sort(cells.begin(), cells.end(),
            [](const CellResult& a, const CellResult& b) { return RowKey::of(a) < RowKey::of(b); });

  std::string out =
      "dataset,distance,method,fraction,seed,accuracy_unlabeled,accuracy_all,wall_time_s,"
      "converged\n";

  // Walk sorted rows group by group so each summary lands after its rows.
  std::size_t group_start = 0;
  auto same_group = [](const CellResult& a, const CellResult& b) {
    return a.dataset == b.dataset && a.distance == b.distance && a.method == b.method &&
           a.fraction == b.fraction;
  };
  for (std::size_t i = 0; i <= cells.size(); ++i) {
    if (i < cells.size() && (i == group_start || same_group(cells[group_start], cells[i]))) {
      append_row(out, cells[i]);
      continue;
    }
    const std::size_t group_size = i - group_start;
    if (group_size >= 2) {
      Stats unlabeled, all, wall, conv;
      for (std::size_t r = group_start; r < i; ++r) {
        if (cells[r].accuracy_unlabeled) unlabeled.add(*cells[r].accuracy_unlabeled);
        if (cells[r].accuracy_all) all.add(*cells[r].accuracy_all);
        wall.add(cells[r].wall_time_s);
        conv.add(cells[r].converged ? 1.0 : 0.0);
      }
      out += cells[group_start].dataset + ',' + cells[group_start].distance + ',' +
             cells[group_start].method + ',' + format_double(cells[group_start].fraction) +
             ",summary," + unlabeled.cell() + ',' + all.cell() + ',' +
             format_double(wall.mean(), "%.6f") + ',' + format_double(conv.mean()) + '\n';
    }
    if (i < cells.size()) {
      group_start = i;
      append_row(out, cells[i]);
    }
  }
  return out;
}

void write_results(const std::vector<CellResult>& cells, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write results file: " + path.string());
  out << results_to_csv(cells);
  if (!out) throw IoError("short write to results file: " + path.string());
}

ExperimentSpec parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());

  ExperimentSpec spec;
  spec.datasets.clear();
  spec.distance_tokens.clear();
  spec.fractions.clear();

  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos) throw ParseError("expected key = value", line_number);

    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("empty key or value", line_number);

    try {
      if (key == "dataset") {
        DatasetSource source;
        for (const auto& p : split_list(value)) source.paths.emplace_back(p);
        spec.datasets.push_back(std::move(source));
      } else if (key == "distance") {
        for (const auto& t : split_list(value)) {
          DistanceKind::from_token(t);  // validate
          spec.distance_tokens.push_back(t);
        }
      } else if (key == "method") {
        for (const auto& t : split_list(value)) spec.methods.push_back(method_from_token(t));
      } else if (key == "split") {
        if (value == "fixed") {
          spec.split_mode = SplitMode::fixed_archive_train;
        } else if (value == "random") {
          spec.split_mode = SplitMode::random;
        } else {
          throw std::invalid_argument("split must be fixed or random");
        }
      } else if (key == "fractions") {
        for (const auto& t : split_list(value)) spec.fractions.push_back(std::stod(t));
      } else if (key == "repeats") {
        spec.repeats = std::stoi(value);
      } else if (key == "seed") {
        spec.base_seed = std::stoull(value);
      } else if (key == "self_tuning_k") {
        spec.self_tuning_k = std::stoi(value);
      } else if (key == "znormalize") {
        spec.znormalize_series = (value == "true" || value == "1");
      } else if (key == "cache_dir") {
        spec.cache_dir = value;
      } else if (key == "out") {
        spec.out_csv = value;
      } else if (key == "threads") {
        spec.threads = std::stoi(value);
      } else if (key == "sdtw_gamma") {
        spec.sdtw_gamma = std::stod(value);
      } else if (key == "mpdist_window_fraction") {
        spec.mpdist_window_fraction = std::stod(value);
      } else if (key == "mpdist_k_fraction") {
        spec.mpdist_k_fraction = std::stod(value);
      } else if (key == "mpdist_znorm") {
        spec.mpdist_znorm = (value == "true" || value == "1");
      } else if (key == "ac_eigenpairs") {
        spec.allen_cahn.eigenpair_count = std::stoi(value);
      } else if (key == "ac_epsilon") {
        if (value != "auto") spec.allen_cahn.epsilon = std::stod(value);
      } else if (key == "ac_omega") {
        spec.allen_cahn.omega = std::stod(value);
      } else if (key == "ac_c") {
        if (value != "auto") spec.allen_cahn.convexity = std::stod(value);
      } else if (key == "ac_tau") {
        spec.allen_cahn.tau = std::stod(value);
      } else if (key == "ac_tol") {
        spec.allen_cahn.tol = std::stod(value);
      } else if (key == "ac_max_iters") {
        spec.allen_cahn.max_iters = std::stoi(value);
      } else if (key == "ls_beta") {
        spec.linear_system.beta = std::stod(value);
      } else if (key == "ls_tol") {
        spec.linear_system.tol = std::stod(value);
      } else if (key == "gcn_knn") {
        spec.gcn.knn = std::stoi(value);
      } else if (key == "gcn_hidden") {
        spec.gcn.hidden = std::stoi(value);
      } else if (key == "gcn_dropout") {
        spec.gcn.dropout = std::stod(value);
      } else if (key == "gcn_lr") {
        spec.gcn.learning_rate = std::stod(value);
      } else if (key == "gcn_weight_decay") {
        spec.gcn.weight_decay = std::stod(value);
      } else if (key == "gcn_epochs") {
        spec.gcn.epochs = std::stoi(value);
      } else if (key == "gcn_features") {
        if (value == "wrows") {
          spec.gcn_features = GcnFeatureKind::weight_rows;
        } else if (value == "identity") {
          spec.gcn_features = GcnFeatureKind::identity;
        } else {
          throw std::invalid_argument("gcn_features must be wrows or identity");
        }
      } else {
        throw std::invalid_argument("unknown config key: " + key);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad value for '") + key + "': " + e.what(), line_number);
    }
  }
  if (spec.fractions.empty()) spec.fractions = {0.1};
  return spec;
}

std::vector<BenchRow> bench_distances(const std::vector<std::size_t>& lengths, int repeats,
                                      std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  Rng rng(seed);

  auto median_time = [&](auto&& fn) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = Clock::now();
      fn();
      times.push_back(seconds_since(t0));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };

  std::vector<BenchRow> rows;
  for (std::size_t length : lengths) {
    if (length < 2) throw std::invalid_argument("bench lengths must be >= 2");
    TimeSeries x, y;
    x.values.resize(length);
    y.values.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
      x.values[i] = rng.next_double(-1.0, 1.0);
      y.values[i] = rng.next_double(-1.0, 1.0);
    }

    BenchRow row;
    row.length = length;
    volatile double sink = 0.0;  // keep the calls alive
    row.euclidean_s = median_time([&] { sink = euclidean_distance(x, y); });
    row.dtw_s = median_time([&] { sink = dtw_distance(x, y); });
    row.sdtw_s = median_time([&] { sink = soft_dtw_divergence(x, y, 1.0); });
    row.mpdist_s = median_time([&] { sink = mpdist(x, y); });
    (void)sink;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tsgc
