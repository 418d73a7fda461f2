#include "tsgc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgc/common.hpp"

namespace tsgc {

LabelVector labels_from_split(const Dataset& dataset, const LabeledSplit& split) {
  LabelVector f = LabelVector::Zero(static_cast<long>(dataset.size()));
  for (std::size_t i : split.labeled_indices) {
    if (i >= dataset.size()) throw SplitError("labeled index out of range");
    f(static_cast<long>(i)) = static_cast<double>(dataset.series[i].label);
  }
  return f;
}

std::vector<int> predict_labels(const Eigen::VectorXd& u) {
  std::vector<int> labels(static_cast<std::size_t>(u.size()));
  for (long i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u(i))) throw NumericError("non-finite entry in order parameter");
    labels[static_cast<std::size_t>(i)] = u(i) < 0.0 ? -1 : +1;
  }
  return labels;
}

AllenCahnResult allen_cahn_classify(const SpectralBasis& basis, const LabelVector& labels,
                                    const AllenCahnParams& params) {
  const long n = basis.eigenvectors.rows();
  const long m_e = basis.eigenvectors.cols();
  if (labels.size() != n) throw std::invalid_argument("label vector length mismatch");

  const double eps = params.epsilon.value_or(1.0 / std::sqrt(static_cast<double>(n)));
  const double c = params.convexity.value_or(3.0 / eps + params.omega);
  const double tau = params.tau;

  Eigen::VectorXd fidelity_weight = Eigen::VectorXd::Zero(n);
  for (long i = 0; i < n; ++i) {
    if (labels(i) != 0.0) fidelity_weight(i) = params.omega;
  }

  // Per-coefficient implicit factor of the convexity splitting.
  Eigen::VectorXd denom(m_e);
  for (long j = 0; j < m_e; ++j) denom(j) = 1.0 + eps * tau * basis.eigenvalues(j) + c * tau;

  Eigen::VectorXd a = basis.eigenvectors.transpose() * labels;  // u0 = f
  Eigen::VectorXd u = basis.eigenvectors * a;

  AllenCahnResult result;
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    const Eigen::VectorXd grad_psi =
        4.0 * u.array() * (u.array().square() - 1.0);                     // double well
    const Eigen::VectorXd grad_fid = fidelity_weight.array() * (u - labels).array();
    const Eigen::VectorXd b = basis.eigenvectors.transpose() * grad_psi;
    const Eigen::VectorXd d = basis.eigenvectors.transpose() * grad_fid;

    a = (((1.0 + tau * c) * a - (tau / eps) * b - tau * d).array() / denom.array()).matrix();
    const Eigen::VectorXd u_next = basis.eigenvectors * a;

    if (!u_next.allFinite()) {
      throw NumericError("Allen-Cahn iterate became non-finite", iter);
    }
    const double rel_change = (u_next - u).norm() / std::max(u_next.norm(), 1e-30);
    u = u_next;
    result.iterations = iter;
    if (rel_change < params.tol) {
      result.converged = true;
      break;
    }
  }

  result.u = u;
  result.labels = predict_labels(u);
  return result;
}

LinearSystemResult linear_system_classify(const NormalizedLaplacian& laplacian,
                                          const LabelVector& labels,
                                          const LinearSystemParams& params) {
  const long n = laplacian.matrix.rows();
  if (labels.size() != n) throw std::invalid_argument("label vector length mismatch");
  if (params.beta < 0.0) throw std::invalid_argument("beta must be nonnegative");

  LinearSystemResult result;
  const double f_norm = labels.norm();
  if (f_norm == 0.0) {  // homogeneous system
    result.u = Eigen::VectorXd::Zero(n);
    result.labels = predict_labels(result.u);
    return result;
  }

  // CG on the SPD operator u -> u + beta * L u.
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v + params.beta * (laplacian.matrix * v);
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = labels;  // b - A*0
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const long max_iters = 10 * n;

  long iter = 0;
  while (std::sqrt(rr) > params.tol * f_norm) {
    if (iter >= max_iters) {
      throw NumericError("conjugate gradient iteration cap exceeded", iter);
    }
    ++iter;
    const Eigen::VectorXd q = apply(p);
    const double alpha = rr / p.dot(q);
    u += alpha * p;
    r -= alpha * q;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }

  result.u = std::move(u);
  result.relative_residual = std::sqrt(rr) / f_norm;
  result.iterations = static_cast<int>(iter);
  result.labels = predict_labels(result.u);
  return result;
}

std::vector<int> one_nn_classify(const DistanceMatrix& distances, const LabelVector& labels) {
  const long n = distances.entries.rows();
  if (labels.size() != n) throw std::invalid_argument("label vector length mismatch");

  std::vector<int> out(static_cast<std::size_t>(n), 0);
  std::vector<long> unlabeled;
  for (long i = 0; i < n; ++i) {
    if (labels(i) != 0.0) {
      out[static_cast<std::size_t>(i)] = labels(i) < 0.0 ? -1 : +1;
    } else {
      unlabeled.push_back(i);
    }
  }
  if (unlabeled.size() == static_cast<std::size_t>(n)) {
    throw std::invalid_argument("1NN propagation needs at least one labeled node");
  }

  // best[j] = (distance, labeled index) of the closest labeled node to j,
  // with the smaller labeled index kept on distance ties.
  struct Best {
    double dist = std::numeric_limits<double>::infinity();
    long from = -1;
  };
  std::vector<Best> best(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    if (out[static_cast<std::size_t>(i)] == 0) continue;
    for (long j : unlabeled) {
      const double d = distances.entries(i, j);
      Best& b = best[static_cast<std::size_t>(j)];
      if (d < b.dist || (d == b.dist && i < b.from)) b = {d, i};
    }
  }

  while (!unlabeled.empty()) {
    // Globally shortest labeled-to-unlabeled edge; ties by smaller (i, j).
    std::size_t pick = 0;
    for (std::size_t t = 1; t < unlabeled.size(); ++t) {
      const Best& cand = best[static_cast<std::size_t>(unlabeled[t])];
      const Best& cur = best[static_cast<std::size_t>(unlabeled[pick])];
      if (cand.dist < cur.dist ||
          (cand.dist == cur.dist &&
           (cand.from < cur.from ||
            (cand.from == cur.from && unlabeled[t] < unlabeled[pick])))) {
        pick = t;
      }
    }
    const long j = unlabeled[pick];
    out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(best[static_cast<std::size_t>(j)].from)];
    unlabeled.erase(unlabeled.begin() + static_cast<long>(pick));

    for (long u : unlabeled) {
      const double d = distances.entries(j, u);
      Best& b = best[static_cast<std::size_t>(u)];
      if (d < b.dist || (d == b.dist && j < b.from)) b = {d, j};
    }
  }
  return out;
}

}  // namespace tsgc
