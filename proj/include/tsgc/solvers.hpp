#pragma once

// Semi-supervised classifiers on the similarity graph: reduced graph
// Allen-Cahn, regularized linear system, and greedy 1NN propagation.
// The GCN lives in gcn.hpp.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tsgc/dataset.hpp"
#include "tsgc/distance.hpp"
#include "tsgc/graph.hpp"
#include "tsgc/spectral.hpp"

namespace tsgc {

/// f_i in {-1, 0, +1}; zero marks unlabeled nodes.
using LabelVector = Eigen::VectorXd;

/// Assembles f from the dataset's ground truth restricted to the split.
LabelVector labels_from_split(const Dataset& dataset, const LabeledSplit& split);

/// Elementwise sign with sign(0) = +1.
std::vector<int> predict_labels(const Eigen::VectorXd& u);

struct AllenCahnParams {
  int eigenpair_count = 20;
  std::optional<double> epsilon;  // default 1/sqrt(n)
  double omega = 1e10;
  std::optional<double> convexity;  // default 3/epsilon + omega
  double tau = 0.01;
  double tol = 1e-8;
  int max_iters = 10000;
};

struct AllenCahnResult {
  std::vector<int> labels;
  Eigen::VectorXd u;  // final order parameter
  bool converged = false;
  int iterations = 0;
};

/// Convexity-split gradient flow of the graph Ginzburg-Landau energy in the
/// reduced eigenbasis:
///   a_j <- [(1 + tau c) a_j - (tau/eps) b_j - tau d_j] / (1 + eps tau lambda_j + c tau)
/// with u = Phi a, b = Phi^T grad_psi(u), grad_psi(u)_i = 4 u_i (u_i^2 - 1),
/// d = Phi^T [omega_i (u_i - f_i)] and omega_i = omega on labeled nodes.
/// Starts from u0 = f (projected), stops on relative change < tol.
/// Non-convergence returns the last iterate with converged = false.
AllenCahnResult allen_cahn_classify(const SpectralBasis& basis, const LabelVector& labels,
                                    const AllenCahnParams& params);

struct LinearSystemParams {
  double beta = 1.0;
  double tol = 1e-5;
};

struct LinearSystemResult {
  std::vector<int> labels;
  Eigen::VectorXd u;
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Solves (I + beta L_sym) u = f by conjugate gradients to relative residual
/// <= tol, then thresholds. Throws NumericError past 10 n iterations.
LinearSystemResult linear_system_classify(const NormalizedLaplacian& laplacian,
                                          const LabelVector& labels,
                                          const LinearSystemParams& params = {});

/// Greedy 1NN label propagation: repeatedly copy the label across the
/// globally shortest labeled-to-unlabeled distance (ties toward the smaller
/// (i, j) pair) until no unlabeled node remains.
std::vector<int> one_nn_classify(const DistanceMatrix& distances, const LabelVector& labels);

}  // namespace tsgc
