#pragma once

// Similarity graphs from distance matrices: self-tuned Gaussian weights,
// the symmetric normalized Laplacian, and kNN sparsification.

#include <Eigen/Dense>
#include <vector>

#include "tsgc/distance.hpp"

namespace tsgc {

/// Per-node kernel bandwidths sigma_i = distance to the K-th nearest
/// neighbor (self excluded).
struct SelfTuningScales {
  Eigen::VectorXd sigma;  // strictly positive
  int neighbor_rank = 0;  // the K that produced the scales
};

struct SimilarityGraph {
  Eigen::MatrixXd weights;  // symmetric, zero diagonal, entries in [0,1]
  Eigen::VectorXd degrees;  // row sums, strictly positive

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

struct NormalizedLaplacian {
  Eigen::MatrixXd matrix;  // I - D^{-1/2} W D^{-1/2}, explicitly symmetrized

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// sigma_i = K-th smallest off-diagonal entry of row i. A zero scale is
/// replaced by the row's smallest strictly positive entry; a fully zero row
/// raises GraphError.
SelfTuningScales self_tuning_scales(const DistanceMatrix& distances, int K);

/// w_ij = exp(-dist(i,j)^2 / (sigma_i sigma_j)) off the diagonal; the
/// diagonal stays zero (the GCN layer re-adds self loops itself).
SimilarityGraph gaussian_adjacency(const DistanceMatrix& distances,
                                   const SelfTuningScales& scales);

NormalizedLaplacian sym_normalized_laplacian(const SimilarityGraph& graph);

/// Keeps w_ij iff j ranks among i's k heaviest neighbors or vice versa
/// (symmetric union; ties broken toward the smaller index). Kept weights are
/// unchanged. Throws GraphError if some node ends up isolated.
SimilarityGraph knn_sparsify(const SimilarityGraph& graph, int k);

}  // namespace tsgc
