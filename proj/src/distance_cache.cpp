#include "tsgc/distance_cache.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "tsgc/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache format is little-endian; big-endian hosts are not supported");

namespace tsgc {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t tag_code(DistanceTag tag) {
  switch (tag) {
    case DistanceTag::euclidean: return 0;
    case DistanceTag::dtw: return 1;
    case DistanceTag::soft_dtw_divergence: return 2;
    case DistanceTag::mp_dist: return 3;
  }
  return 0xffffffff;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  std::string s(buf);
  for (char& c : s) {
    if (c == '.') c = 'p';  // keep file names dot-free apart from the extension
  }
  return s;
}

}  // namespace

std::string cache_file_name(const std::string& fingerprint, const DistanceKind& kind) {
  std::string name = fingerprint + "_" + kind.token();
  switch (kind.tag) {
    case DistanceTag::soft_dtw_divergence:
      name += "_g" + format_param(kind.gamma);
      break;
    case DistanceTag::mp_dist:
      name += "_w" + format_param(kind.window_fraction) + "_k" + format_param(kind.k_fraction);
      if (kind.znorm_subsequences) name += "_z";
      break;
    default:
      break;
  }
  return name + ".dmat";
}

void save_distance_matrix(const DistanceMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write cache file: " + path.string());

  const std::uint64_t n = matrix.size();
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kVersion);
  write_raw(out, n);
  write_raw(out, tag_code(matrix.kind.tag));
  write_raw(out, matrix.kind.gamma);
  write_raw(out, matrix.kind.window_fraction);
  write_raw(out, matrix.kind.k_fraction);
  write_raw(out, static_cast<double>(matrix.kind.znorm_subsequences ? 1.0 : 0.0));

  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i; j < n; ++j) {
      write_raw(out, matrix.entries(static_cast<long>(i), static_cast<long>(j)));
    }
  }
  if (!out) throw IoError("short write to cache file: " + path.string());
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path,
                                    const std::string& expected_fingerprint,
                                    const DistanceKind& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cache file: " + path.string());

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("bad magic in cache file: " + path.string());
  }
  std::uint32_t version;
  read_raw(in, version);
  if (version != kVersion) throw IoError("unsupported cache version in " + path.string());

  std::uint64_t n;
  std::uint32_t tag;
  double gamma, wf, kf, znorm;
  read_raw(in, n);
  read_raw(in, tag);
  read_raw(in, gamma);
  read_raw(in, wf);
  read_raw(in, kf);
  read_raw(in, znorm);
  if (!in) throw IoError("truncated cache header in " + path.string());

  if (tag != tag_code(expected_kind.tag) || gamma != expected_kind.gamma ||
      wf != expected_kind.window_fraction || kf != expected_kind.k_fraction ||
      (znorm != 0.0) != expected_kind.znorm_subsequences) {
    throw IoError("cache file parameters do not match the requested kind: " + path.string());
  }

  DistanceMatrix matrix;
  matrix.kind = expected_kind;
  matrix.dataset_fingerprint = expected_fingerprint;
  matrix.entries = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i; j < n; ++j) {
      double v;
      read_raw(in, v);
      matrix.entries(static_cast<long>(i), static_cast<long>(j)) = v;
      matrix.entries(static_cast<long>(j), static_cast<long>(i)) = v;
    }
  }
  if (!in) throw IoError("truncated cache payload in " + path.string());
  return matrix;
}

}  // namespace tsgc
