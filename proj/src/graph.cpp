#include "tsgc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgc/common.hpp"

namespace tsgc {

SelfTuningScales self_tuning_scales(const DistanceMatrix& distances, int K) {
  const long n = distances.entries.rows();
  if (K < 1 || K > n - 1) {
    throw std::invalid_argument("self-tuning K must lie in [1, n-1], got " + std::to_string(K));
  }

  SelfTuningScales scales;
  scales.neighbor_rank = K;
  scales.sigma.resize(n);
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (long i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (long j = 0; j < n; ++j) {
      if (j != i) row[c++] = distances.entries(i, j);
    }
    std::nth_element(row.begin(), row.begin() + (K - 1), row.end());
    double sigma = row[K - 1];
    if (sigma == 0.0) {
      // Duplicate points: fall back to the nearest distinct neighbor.
      double smallest_positive = std::numeric_limits<double>::infinity();
      for (double d : row) {
        if (d > 0.0) smallest_positive = std::min(smallest_positive, d);
      }
      if (!std::isfinite(smallest_positive)) {
        throw GraphError("degenerate dataset: node " + std::to_string(i) +
                         " has zero distance to every other node");
      }
      sigma = smallest_positive;
    }
    scales.sigma(i) = sigma;
  }
  return scales;
}

SimilarityGraph gaussian_adjacency(const DistanceMatrix& distances,
                                   const SelfTuningScales& scales) {
  const long n = distances.entries.rows();
  if (scales.sigma.size() != n) {
    throw std::invalid_argument("scales/distances dimension mismatch");
  }

  SimilarityGraph graph;
  graph.weights = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double d = distances.entries(i, j);
      const double w = std::exp(-(d * d) / (scales.sigma(i) * scales.sigma(j)));
      graph.weights(i, j) = w;
      graph.weights(j, i) = w;
    }
  }
  graph.degrees = graph.weights.rowwise().sum();
  return graph;
}

NormalizedLaplacian sym_normalized_laplacian(const SimilarityGraph& graph) {
  const long n = graph.weights.rows();
  for (long i = 0; i < n; ++i) {
    if (!(graph.degrees(i) > 0.0)) {
      throw GraphError("isolated node " + std::to_string(i) + " (zero degree)");
    }
  }
  const Eigen::VectorXd inv_sqrt_deg = graph.degrees.array().rsqrt();
  NormalizedLaplacian lap;
  lap.matrix = Eigen::MatrixXd::Identity(n, n) -
               (inv_sqrt_deg.asDiagonal() * graph.weights * inv_sqrt_deg.asDiagonal());
  lap.matrix = 0.5 * (lap.matrix + lap.matrix.transpose()).eval();  // kill round-off asymmetry
  return lap;
}

SimilarityGraph knn_sparsify(const SimilarityGraph& graph, int k) {
  const long n = graph.weights.rows();
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("kNN sparsification needs k in [1, n-1], got " +
                                std::to_string(k));
  }

  Eigen::MatrixXd keep = Eigen::MatrixXd::Zero(n, n);
  std::vector<long> order(static_cast<std::size_t>(n - 1));
  for (long i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (long j = 0; j < n; ++j) {
      if (j != i) order[c++] = j;
    }
    // Heaviest first, smaller index on ties.
    std::sort(order.begin(), order.end(), [&](long a, long b) {
      if (graph.weights(i, a) != graph.weights(i, b)) {
        return graph.weights(i, a) > graph.weights(i, b);
      }
      return a < b;
    });
    for (int r = 0; r < k; ++r) {
      const long j = order[static_cast<std::size_t>(r)];
      keep(i, j) = 1.0;
      keep(j, i) = 1.0;  // union rule
    }
  }

  SimilarityGraph out;
  out.weights = graph.weights.cwiseProduct(keep);
  out.degrees = out.weights.rowwise().sum();
  for (long i = 0; i < n; ++i) {
    if (!(out.degrees(i) > 0.0)) {
      throw GraphError("kNN sparsification isolated node " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace tsgc
