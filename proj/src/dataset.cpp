#include "tsgc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "tsgc/common.hpp"

namespace tsgc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == '\t' || c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  // Trim surrounding spaces; drop fields that end up empty (trailing separators).
  std::vector<std::string> cleaned;
  for (auto& f : fields) {
    const auto begin = f.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = f.find_last_not_of(" \t");
    cleaned.push_back(f.substr(begin, end - begin + 1));
  }
  return cleaned;
}

double parse_value(const std::string& token, long line_number) {
  std::size_t consumed = 0;
  double v;
  try {
    v = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw ParseError("malformed numeric field '" + token + "'", line_number);
  }
  if (consumed != token.size()) {
    throw ParseError("malformed numeric field '" + token + "'", line_number);
  }
  return v;
}

struct RawRecord {
  std::string token;
  std::vector<double> values;
};

std::vector<RawRecord> parse_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path.string());

  std::vector<RawRecord> records;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;  // blank line
    if (fields.size() < 2) {
      throw ParseError("record needs a class token and at least one value", line_number);
    }
    RawRecord rec;
    rec.token = fields[0];
    rec.values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double v = parse_value(fields[i], line_number);
      if (!std::isfinite(v)) {
        throw DataError("non-finite value in " + path.string() + " at line " +
                        std::to_string(line_number));
      }
      rec.values.push_back(v);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Dataset assemble(std::vector<RawRecord> records, std::string name, std::size_t train_size) {
  std::vector<std::string> tokens;
  for (const auto& r : records) {
    if (std::find(tokens.begin(), tokens.end(), r.token) == tokens.end()) {
      tokens.push_back(r.token);
    }
  }
  if (tokens.size() != 2) {
    throw DataError("unsupported dataset: expected exactly 2 classes, found " +
                    std::to_string(tokens.size()));
  }
  std::sort(tokens.begin(), tokens.end());  // lexicographically smaller -> -1

  Dataset ds;
  ds.name = std::move(name);
  ds.class_tokens = {tokens[0], tokens[1]};
  ds.archive_train_size = train_size;
  ds.series.reserve(records.size());
  for (auto& r : records) {
    TimeSeries ts;
    ts.values = std::move(r.values);
    ts.label = (r.token == tokens[0]) ? -1 : +1;
    ds.series.push_back(std::move(ts));
  }
  if (ds.series.size() < 2) throw DataError("dataset needs at least 2 series");
  return ds;
}

std::string derive_name(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  for (const char* suffix : {"_TRAIN", "_TEST", "_train", "_test"}) {
    const std::string s(suffix);
    if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
      stem.resize(stem.size() - s.size());
      break;
    }
  }
  return stem;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace

Dataset load_ucr_tsv(const std::filesystem::path& path) {
  auto records = parse_records(path);
  const std::size_t count = records.size();
  return assemble(std::move(records), derive_name(path), count);
}

Dataset load_ucr_files(const std::vector<std::filesystem::path>& paths, std::string name) {
  if (paths.empty()) throw IoError("no dataset files given");
  std::vector<RawRecord> all;
  std::size_t train_size = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto records = parse_records(paths[i]);
    if (i == 0) train_size = records.size();
    std::move(records.begin(), records.end(), std::back_inserter(all));
  }
  if (name.empty()) name = derive_name(paths[0]);
  return assemble(std::move(all), std::move(name), train_size);
}

void save_ucr_tsv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path.string());
  char buf[40];
  for (const auto& ts : dataset.series) {
    out << dataset.class_tokens[ts.label < 0 ? 0 : 1];
    for (double v : ts.values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

void znormalize(Dataset& dataset) {
  for (auto& ts : dataset.series) {
    const std::size_t m = ts.values.size();
    double mean = 0.0;
    for (double v : ts.values) mean += v;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double v : ts.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(m);
    const double sd = std::sqrt(var);
    for (double& v : ts.values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  }
}

std::string dataset_fingerprint(const Dataset& dataset) {
  // FNV-1a over lengths, labels, and raw value bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(dataset.series.size());
  for (const auto& ts : dataset.series) {
    mix(ts.values.size());
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(ts.label)));
    for (double v : ts.values) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      std::memcpy(&bits, &v, sizeof(bits));
      mix(bits);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LabeledSplit random_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw SplitError("fraction must lie in (0, 1]");
  }
  const std::size_t n = dataset.size();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) {
    (dataset.series[i].label > 0 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw SplitError("stratification impossible: a class has no members");
  }

  std::size_t total = std::clamp<std::size_t>(round_half_up(fraction * static_cast<double>(n)),
                                              2, n);
  std::size_t n_neg = round_half_up(static_cast<double>(total) * static_cast<double>(neg.size()) /
                                    static_cast<double>(n));
  n_neg = std::clamp<std::size_t>(n_neg, 1, std::min(neg.size(), total - 1));
  std::size_t n_pos = total - n_neg;
  if (n_pos > pos.size()) {  // steal back from the other class
    n_neg += n_pos - pos.size();
    n_pos = pos.size();
  }
  if (n_neg > neg.size()) {
    n_pos += n_neg - neg.size();
    n_neg = neg.size();
  }

  Rng rng(seed);
  auto draw = [&rng](std::vector<std::size_t>& from, std::size_t k) {
    shuffle(from, rng);
    return std::vector<std::size_t>(from.begin(), from.begin() + static_cast<long>(k));
  };
  auto chosen_neg = draw(neg, n_neg);
  auto chosen_pos = draw(pos, n_pos);

  LabeledSplit split;
  split.seed = seed;
  split.fraction = fraction;
  split.labeled_indices = std::move(chosen_neg);
  split.labeled_indices.insert(split.labeled_indices.end(), chosen_pos.begin(), chosen_pos.end());
  std::sort(split.labeled_indices.begin(), split.labeled_indices.end());
  return split;
}

LabeledSplit archive_train_split(const Dataset& dataset) {
  if (dataset.archive_train_size == 0 || dataset.archive_train_size >= dataset.size()) {
    throw SplitError("dataset carries no usable archive TRAIN/TEST boundary");
  }
  LabeledSplit split;
  split.fraction =
      static_cast<double>(dataset.archive_train_size) / static_cast<double>(dataset.size());
  split.labeled_indices.resize(dataset.archive_train_size);
  for (std::size_t i = 0; i < dataset.archive_train_size; ++i) split.labeled_indices[i] = i;
  // Both classes must appear among the labeled records.
  bool has_pos = false, has_neg = false;
  for (std::size_t i : split.labeled_indices) {
    (dataset.series[i].label > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw SplitError("archive TRAIN part misses a class");
  return split;
}

}  // namespace tsgc
