#include "tsgc/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgc/common.hpp"

namespace tsgc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonempty(const TimeSeries& x, const TimeSeries& y) {
  if (x.values.empty() || y.values.empty()) {
    throw std::invalid_argument("empty series");
  }
}

/// softmin of up to three values, infinities excluded. Exact log-sum-exp with
/// shift by the smallest finite value.
double soft_min3(double a, double b, double c, double gamma) {
  const double lo = std::min({a, b, c});
  if (lo == kInf) return kInf;
  double sum = 0.0;
  if (a != kInf) sum += std::exp(-(a - lo) / gamma);
  if (b != kInf) sum += std::exp(-(b - lo) / gamma);
  if (c != kInf) sum += std::exp(-(c - lo) / gamma);
  return lo - gamma * std::log(sum);
}

}  // namespace

std::string DistanceKind::token() const {
  switch (tag) {
    case DistanceTag::euclidean: return "euclidean";
    case DistanceTag::dtw: return "dtw";
    case DistanceTag::soft_dtw_divergence: return "sdtw";
    case DistanceTag::mp_dist: return "mpdist";
  }
  return "?";
}

DistanceKind DistanceKind::from_token(const std::string& token) {
  if (token == "euclidean") return euclidean();
  if (token == "dtw") return dtw();
  if (token == "sdtw") return soft_dtw_divergence();
  if (token == "mpdist") return mp_dist();
  throw std::invalid_argument("unknown distance token: " + token);
}

double euclidean_distance(const TimeSeries& x, const TimeSeries& y) {
  if (x.length() != y.length()) {
    throw std::invalid_argument("incompatible lengths: " + std::to_string(x.length()) + " vs " +
                                std::to_string(y.length()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.length(); ++i) {
    const double d = x.values[i] - y.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double dtw_distance(const TimeSeries& x, const TimeSeries& y) {
  require_nonempty(x, y);
  const std::size_t m = x.length(), mt = y.length();
  // Rolling rows of the accumulated cost matrix, padded with +inf borders.
  std::vector<double> prev(mt + 1, kInf), cur(mt + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= mt; ++j) {
      const double cost = std::abs(x.values[i - 1] - y.values[j - 1]);
      cur[j] = cost + std::min({cur[j - 1], prev[j], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[mt];
}

double soft_min(const std::vector<double>& values, double gamma) {
  if (values.empty()) throw std::invalid_argument("soft_min of empty set");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double lo = *std::min_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(-(v - lo) / gamma);
  return lo - gamma * std::log(sum);
}

double soft_dtw(const TimeSeries& x, const TimeSeries& y, double gamma) {
  require_nonempty(x, y);
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const std::size_t m = x.length(), mt = y.length();
  std::vector<double> prev(mt + 1, kInf), cur(mt + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= mt; ++j) {
      const double cost = std::abs(x.values[i - 1] - y.values[j - 1]);
      cur[j] = cost + soft_min3(cur[j - 1], prev[j], prev[j - 1], gamma);
    }
    std::swap(prev, cur);
  }
  return prev[mt];
}

double soft_dtw_divergence(const TimeSeries& x, const TimeSeries& y, double gamma) {
  const double xy = soft_dtw(x, y, gamma);
  const double xx = soft_dtw(x, x, gamma);
  const double yy = soft_dtw(y, y, gamma);
  return xy - 0.5 * (xx + yy);
}

namespace {

/// Copies window [i, i+L) of `v`, z-normalized when requested.
void fill_window(const std::vector<double>& v, std::size_t i, std::size_t L, bool znorm,
                 std::vector<double>& out) {
  out.assign(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i + L));
  if (!znorm) return;
  double mean = 0.0;
  for (double t : out) mean += t;
  mean /= static_cast<double>(L);
  double var = 0.0;
  for (double t : out) var += (t - mean) * (t - mean);
  var /= static_cast<double>(L);
  const double sd = std::sqrt(var);
  for (double& t : out) t = sd > 0.0 ? (t - mean) / sd : 0.0;
}

}  // namespace

std::vector<double> matrix_profile(const TimeSeries& x, const TimeSeries& y, std::size_t window,
                                   bool znorm_subsequences) {
  require_nonempty(x, y);
  if (window < 1 || window > std::min(x.length(), y.length())) {
    throw std::invalid_argument("window too large: L=" + std::to_string(window) +
                                " exceeds a series length");
  }
  const std::size_t na = x.length() - window + 1;
  const std::size_t nb = y.length() - window + 1;

  // Squared distances over all window pairs; row/column minima afterwards.
  std::vector<double> min_a(na, kInf), min_b(nb, kInf);
  std::vector<double> wa, wb;
  for (std::size_t i = 0; i < na; ++i) {
    fill_window(x.values, i, window, znorm_subsequences, wa);
    for (std::size_t j = 0; j < nb; ++j) {
      fill_window(y.values, j, window, znorm_subsequences, wb);
      double sq = 0.0;
      for (std::size_t t = 0; t < window; ++t) {
        const double d = wa[t] - wb[t];
        sq += d * d;
      }
      min_a[i] = std::min(min_a[i], sq);
      min_b[j] = std::min(min_b[j], sq);
    }
  }

  std::vector<double> profile;
  profile.reserve(na + nb);
  for (double s : min_a) profile.push_back(std::sqrt(s));
  for (double s : min_b) profile.push_back(std::sqrt(s));
  return profile;
}

double mpdist(const TimeSeries& x, const TimeSeries& y, double window_fraction, double k_fraction,
              bool znorm_subsequences) {
  require_nonempty(x, y);
  if (!(window_fraction > 0.0) || window_fraction > 1.0) {
    throw std::invalid_argument("window_fraction must lie in (0, 1]");
  }
  const std::size_t min_len = std::min(x.length(), y.length());
  const std::size_t window = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(window_fraction * static_cast<double>(min_len))));
  auto profile = matrix_profile(x, y, window, znorm_subsequences);

  std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(k_fraction * static_cast<double>(x.length() + y.length()))));
  k = std::min(k, profile.size());
  std::nth_element(profile.begin(), profile.begin() + static_cast<long>(k - 1), profile.end());
  return profile[k - 1];
}

double distance(const TimeSeries& x, const TimeSeries& y, const DistanceKind& kind) {
  switch (kind.tag) {
    case DistanceTag::euclidean: return euclidean_distance(x, y);
    case DistanceTag::dtw: return dtw_distance(x, y);
    case DistanceTag::soft_dtw_divergence: return soft_dtw_divergence(x, y, kind.gamma);
    case DistanceTag::mp_dist:
      return mpdist(x, y, kind.window_fraction, kind.k_fraction, kind.znorm_subsequences);
  }
  throw std::invalid_argument("unknown distance kind");
}

DistanceMatrix pairwise_distance_matrix(const Dataset& dataset, const DistanceKind& kind,
                                        int threads) {
  const std::size_t n = dataset.size();
  DistanceMatrix out;
  out.kind = kind;
  out.dataset_fingerprint = dataset_fingerprint(dataset);
  out.entries = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  if (n < 2) return out;

  if (kind.tag == DistanceTag::euclidean) {
    for (std::size_t i = 1; i < n; ++i) {
      if (dataset.series[i].length() != dataset.series[0].length()) {
        throw std::invalid_argument("euclidean distance needs uniform lengths; series 0 and " +
                                    std::to_string(i) + " differ");
      }
    }
  }

  // Soft-DTW self terms are shared by every pair in a row/column.
  std::vector<double> self_terms;
  if (kind.tag == DistanceTag::soft_dtw_divergence) {
    self_terms.resize(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          self_terms[i] = soft_dtw(dataset.series[i], dataset.series[i], kind.gamma);
        },
        threads);
  }

  // Flatten the strict upper triangle: pair p -> (i, j), i < j.
  const std::size_t n_pairs = n * (n - 1) / 2;
  parallel_for(
      n_pairs,
      [&](std::size_t p) {
        // Invert the row-major triangular index.
        std::size_t i = 0;
        std::size_t row_start = 0;
        std::size_t row_len = n - 1;
        while (p >= row_start + row_len) {
          row_start += row_len;
          --row_len;
          ++i;
        }
        const std::size_t j = i + 1 + (p - row_start);
        double d;
        try {
          if (kind.tag == DistanceTag::soft_dtw_divergence) {
            d = soft_dtw(dataset.series[i], dataset.series[j], kind.gamma) -
                0.5 * (self_terms[i] + self_terms[j]);
            // Debiasing can leave ~1e-16 of round-off below zero.
            if (d < 0.0 && d > -1e-9) d = 0.0;
          } else {
            d = distance(dataset.series[i], dataset.series[j], kind);
          }
        } catch (const std::exception& e) {
          throw DataError("distance failed for pair (" + std::to_string(i) + ", " +
                          std::to_string(j) + "): " + e.what());
        }
        out.entries(static_cast<long>(i), static_cast<long>(j)) = d;
        out.entries(static_cast<long>(j), static_cast<long>(i)) = d;
      },
      threads);

  return out;
}

}  // namespace tsgc
