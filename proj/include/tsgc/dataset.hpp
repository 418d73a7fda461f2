#pragma once

// UCR-style time series loading, label handling, and stratified random splits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tsgc {

/// One univariate series with its ground-truth class in {-1, +1}
/// (0 while the label is not yet known, e.g. freshly built test fixtures).
struct TimeSeries {
  std::vector<double> values;
  int label = 0;

  std::size_t length() const { return values.size(); }
};

/// A pool of series sharing one binary labeling. `class_tokens` keeps the raw
/// label strings in the order they were mapped (tokens[0] -> -1, [1] -> +1).
struct Dataset {
  std::vector<TimeSeries> series;
  std::string name;
  std::array<std::string, 2> class_tokens{};
  /// Number of records that came from the first (archive TRAIN) file when the
  /// dataset was assembled from several files; 0 if unknown.
  std::size_t archive_train_size = 0;

  std::size_t size() const { return series.size(); }
};

/// Indices of series whose labels are revealed to the classifiers.
struct LabeledSplit {
  std::vector<std::size_t> labeled_indices;  // sorted ascending, unique
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

/// Parses one UCR TSV/CSV file: per nonempty line a class token followed by
/// at least one numeric value, tab- or comma-separated. The two distinct raw
/// tokens are mapped to {-1,+1} with the lexicographically smaller token
/// becoming -1. Lines of differing lengths are allowed.
///
/// Throws ParseError (with line number) on malformed lines, DataError when
/// the file does not hold exactly two classes or contains NaN/Inf values.
Dataset load_ucr_tsv(const std::filesystem::path& path);

/// Loads and concatenates several files into one pool (the semi-supervised
/// setting treats archive TRAIN+TEST as a single dataset). The label-token
/// mapping is recomputed over the union; `archive_train_size` is set to the
/// first file's record count. `name`, when empty, is derived from the first
/// file's stem with a trailing _TRAIN/_TEST stripped.
Dataset load_ucr_files(const std::vector<std::filesystem::path>& paths, std::string name = "");

/// Writes the dataset back in tab-separated UCR form (raw class token first).
void save_ucr_tsv(const Dataset& dataset, const std::filesystem::path& path);

/// Replaces each series by (x - mean) / std, elementwise per series.
/// Series with zero variance become all-zero.
void znormalize(Dataset& dataset);

/// Stable content hash of the parsed dataset (values, lengths, labels),
/// rendered as 16 hex characters. Used to key distance-matrix cache files.
std::string dataset_fingerprint(const Dataset& dataset);

/// Stratified random split: size = round-half-up(n * fraction) clamped to
/// [2, n], per-class counts proportional to class frequencies with each class
/// contributing at least one index. Deterministic in (dataset, fraction, seed).
LabeledSplit random_split(const Dataset& dataset, double fraction, std::uint64_t seed);

/// Split that marks the archive TRAIN records (the first
/// `archive_train_size` indices) as labeled.
LabeledSplit archive_train_split(const Dataset& dataset);

}  // namespace tsgc
