#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive so they cannot share bugs with the library paths they
// check.

#include <Eigen/Dense>
#include <vector>

#include "tsgc/dataset.hpp"
#include "tsgc/distance.hpp"
#include "tsgc/solvers.hpp"

namespace tsgc::oracle {

/// Total costs of every (m, m~)-warping path, found by exhaustive recursion
/// over the step set {right, down, diagonal}.
std::vector<double> enumerate_warping_path_costs(const TimeSeries& x, const TimeSeries& y);

/// min over enumerate_warping_path_costs.
double dtw_by_enumeration(const TimeSeries& x, const TimeSeries& y);

/// -gamma log sum exp(-cost/gamma) over all enumerated alignment costs.
double soft_dtw_by_enumeration(const TimeSeries& x, const TimeSeries& y, double gamma);

/// Soft-DTW divergence assembled from three enumeration calls.
double soft_dtw_divergence_by_enumeration(const TimeSeries& x, const TimeSeries& y, double gamma);

/// MPdist straight from its definition: build both all-subsequences sets,
/// take row/column minima of the full cross-distance table, sort, pick k-th.
double naive_mpdist(const TimeSeries& x, const TimeSeries& y, double window_fraction,
                    double k_fraction);

/// Greedy 1NN propagation as a direct O(steps * n^2) rescan of the distance
/// matrix, no incremental bookkeeping.
std::vector<int> naive_one_nn(const DistanceMatrix& distances, const LabelVector& labels);

/// Dense node-space convexity-splitting iteration (LU solve per step).
/// Returns the iterates u^1..u^max_steps starting from u^0 = f.
std::vector<Eigen::VectorXd> dense_allen_cahn_iterates(const Eigen::MatrixXd& laplacian,
                                                       const Eigen::VectorXd& labels,
                                                       double epsilon, double omega, double c,
                                                       double tau, int steps);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenvalues
/// ascending, eigenvectors as columns.
void jacobi_eigen(const Eigen::MatrixXd& symmetric, Eigen::VectorXd& values,
                  Eigen::MatrixXd& vectors);

}  // namespace tsgc::oracle
