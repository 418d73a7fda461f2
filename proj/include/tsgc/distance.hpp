#pragma once

// Pairwise time-series distances: Euclidean, DTW, soft-DTW divergence, and
// the matrix-profile distance (MPdist), plus full distance-matrix assembly.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tsgc/dataset.hpp"

namespace tsgc {

enum class DistanceTag { euclidean, dtw, soft_dtw_divergence, mp_dist };

struct DistanceKind {
  DistanceTag tag = DistanceTag::euclidean;
  double gamma = 1.0;              // soft-DTW smoothing, > 0
  double window_fraction = 0.5;    // MPdist window L as a share of the shorter series
  double k_fraction = 0.05;        // MPdist rank k as a share of len(x)+len(y)
  bool znorm_subsequences = false; // MPdist option: z-normalize each window

  static DistanceKind euclidean() { return {}; }
  static DistanceKind dtw() { return {DistanceTag::dtw}; }
  static DistanceKind soft_dtw_divergence(double gamma = 1.0) {
    return {DistanceTag::soft_dtw_divergence, gamma};
  }
  static DistanceKind mp_dist(double window_fraction = 0.5, double k_fraction = 0.05,
                              bool znorm = false) {
    return {DistanceTag::mp_dist, 1.0, window_fraction, k_fraction, znorm};
  }

  /// CLI/CSV token: euclidean | dtw | sdtw | mpdist.
  std::string token() const;
  static DistanceKind from_token(const std::string& token);
};

/// ||x - y||_2 for equal-length series.
double euclidean_distance(const TimeSeries& x, const TimeSeries& y);

/// Classic dynamic time warping with local cost |x_i - y_j|; accumulated-cost
/// recursion over the full m x m~ grid, no band constraint.
double dtw_distance(const TimeSeries& x, const TimeSeries& y);

/// -gamma * log sum exp(-v/gamma) with max-shift; <= min(values) always.
double soft_min(const std::vector<double>& values, double gamma);

/// Soft-DTW via the Bellman soft recursion
///   r(i,j) = |x_i - y_j| + softmin{r(i-1,j), r(i,j-1), r(i-1,j-1)},
/// equal to the log-sum-exp over all monotone alignment matrices. Can be
/// negative for small gamma-to-cost ratios.
double soft_dtw(const TimeSeries& x, const TimeSeries& y, double gamma);

/// Debiased soft-DTW: SDTW(x,y) - (SDTW(x,x) + SDTW(y,y)) / 2. Symmetric and
/// zero for identical inputs.
double soft_dtw_divergence(const TimeSeries& x, const TimeSeries& y, double gamma);

/// P_ABBA: for each length-L window of x the smallest Euclidean distance to
/// any length-L window of y, then the same with roles swapped. Output size is
/// (len(x)-L+1) + (len(y)-L+1), unsorted.
std::vector<double> matrix_profile(const TimeSeries& x, const TimeSeries& y, std::size_t window,
                                   bool znorm_subsequences = false);

/// MPdist: k-th smallest entry of sorted P_ABBA with
///   L = max(2, floor(window_fraction * min(len))),
///   k = max(1, floor(k_fraction * (len(x)+len(y)))), clamped to |P_ABBA|.
double mpdist(const TimeSeries& x, const TimeSeries& y, double window_fraction = 0.5,
              double k_fraction = 0.05, bool znorm_subsequences = false);

/// Dispatches to the scalar distance selected by `kind`.
double distance(const TimeSeries& x, const TimeSeries& y, const DistanceKind& kind);

struct DistanceMatrix {
  Eigen::MatrixXd entries;  // symmetric, zero diagonal, nonnegative
  DistanceKind kind;
  std::string dataset_fingerprint;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Computes the full symmetric matrix over the dataset; only the upper
/// triangle is evaluated (in parallel) and mirrored. Soft-DTW self terms are
/// computed once per series. Per-pair failures abort with the offending
/// index pair in the message.
DistanceMatrix pairwise_distance_matrix(const Dataset& dataset, const DistanceKind& kind,
                                        int threads = 0);

}  // namespace tsgc
