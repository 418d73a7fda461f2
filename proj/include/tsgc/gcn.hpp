#pragma once

// Two-layer graph convolutional network for binary node classification,
// trained full-batch with Adam. Written against dense matrices; the graphs
// here are kNN-sparsified similarity graphs of at most a few thousand nodes.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tsgc/graph.hpp"
#include "tsgc/solvers.hpp"

namespace tsgc {

struct GcnParams {
  int knn = 10;  // sparsification degree, applied by the caller
  int hidden = 32;
  double dropout = 0.5;
  double learning_rate = 0.01;
  double weight_decay = 0.0005;  // first-layer weights only
  int epochs = 500;
  std::uint64_t seed = 0;
};

struct GcnModel {
  Eigen::MatrixXd theta1;     // d x h
  Eigen::RowVectorXd bias1;   // 1 x h
  Eigen::MatrixXd theta2;     // h x 2
  Eigen::RowVectorXd bias2;   // 1 x 2
};

struct GcnGradients {
  Eigen::MatrixXd theta1;
  Eigen::RowVectorXd bias1;
  Eigen::MatrixXd theta2;
  Eigen::RowVectorXd bias2;
};

/// Fixed per graph/feature pair: Ahat = Dhat^{-1/2} (W + I) Dhat^{-1/2} and
/// the cached first-layer propagation Ahat * X.
struct GcnWorkspace {
  Eigen::MatrixXd a_hat;  // n x n
  Eigen::MatrixXd ax;     // n x d
};

GcnWorkspace gcn_workspace(const SimilarityGraph& sparsified_graph,
                           const Eigen::MatrixXd& features);

/// Glorot-uniform weights, zero biases; deterministic in seed.
GcnModel gcn_init(std::size_t feature_dim, int hidden, std::uint64_t seed);

/// One-hot row targets for the labeled nodes: class 0 = label -1, class 1 = +1.
struct GcnTargets {
  std::vector<long> rows;     // labeled node indices
  std::vector<int> classes;   // parallel to rows, in {0, 1}
};
GcnTargets gcn_targets(const LabelVector& labels);

/// Mean softmax cross-entropy over the labeled rows plus
/// weight_decay * ||theta1||_F^2. `dropout_mask`, when given, is applied to
/// the hidden activations and must already carry the 1/(1-p) scaling.
/// Fills analytic gradients when `gradients` is non-null.
double gcn_loss(const GcnModel& model, const GcnWorkspace& ws, const GcnTargets& targets,
                double weight_decay, const Eigen::MatrixXd* dropout_mask = nullptr,
                GcnGradients* gradients = nullptr);

/// Logits of the full graph with dropout disabled.
Eigen::MatrixXd gcn_logits(const GcnModel& model, const GcnWorkspace& ws);

struct GcnResult {
  std::vector<int> labels;
  Eigen::MatrixXd logits;  // n x 2
  double final_loss = 0.0;
};

/// Full training run: init, `epochs` Adam steps on the whole graph, then
/// argmax prediction (logit ties resolve to +1). Deterministic in
/// params.seed. Throws TrainingError if the loss turns non-finite.
GcnResult gcn_train_and_classify(const SimilarityGraph& sparsified_graph,
                                 const Eigen::MatrixXd& features, const LabelVector& labels,
                                 const GcnParams& params);

/// Convenience one-hot feature matrix (identity), the fallback when
/// distance-profile features are not wanted.
Eigen::MatrixXd identity_features(std::size_t n);

}  // namespace tsgc
