#include "tsgc/gcn.hpp"

#include <cmath>

#include "tsgc/common.hpp"

namespace tsgc {

GcnWorkspace gcn_workspace(const SimilarityGraph& sparsified_graph,
                           const Eigen::MatrixXd& features) {
  const long n = sparsified_graph.weights.rows();
  if (features.rows() != n) throw std::invalid_argument("feature row count mismatch");

  Eigen::MatrixXd w_hat = sparsified_graph.weights;
  w_hat.diagonal().array() += 1.0;  // self loops
  const Eigen::VectorXd inv_sqrt_deg = w_hat.rowwise().sum().array().rsqrt();

  GcnWorkspace ws;
  ws.a_hat = inv_sqrt_deg.asDiagonal() * w_hat * inv_sqrt_deg.asDiagonal();
  ws.ax = ws.a_hat * features;
  return ws;
}

GcnModel gcn_init(std::size_t feature_dim, int hidden, std::uint64_t seed) {
  Rng rng(seed);
  auto glorot = [&rng](long rows, long cols) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) m(i, j) = rng.next_double(-bound, bound);
    }
    return m;
  };

  GcnModel model;
  model.theta1 = glorot(static_cast<long>(feature_dim), hidden);
  model.bias1 = Eigen::RowVectorXd::Zero(hidden);
  model.theta2 = glorot(hidden, 2);
  model.bias2 = Eigen::RowVectorXd::Zero(2);
  return model;
}

GcnTargets gcn_targets(const LabelVector& labels) {
  GcnTargets targets;
  for (long i = 0; i < labels.size(); ++i) {
    if (labels(i) == 0.0) continue;
    targets.rows.push_back(i);
    targets.classes.push_back(labels(i) < 0.0 ? 0 : 1);
  }
  if (targets.rows.empty()) throw std::invalid_argument("GCN training needs labeled nodes");
  return targets;
}

double gcn_loss(const GcnModel& model, const GcnWorkspace& ws, const GcnTargets& targets,
                double weight_decay, const Eigen::MatrixXd* dropout_mask,
                GcnGradients* gradients) {
  // Forward.
  Eigen::MatrixXd pre_hidden = (ws.ax * model.theta1).rowwise() + model.bias1;  // n x h
  Eigen::MatrixXd hidden = pre_hidden.cwiseMax(0.0);
  if (dropout_mask) hidden = hidden.cwiseProduct(*dropout_mask);
  const Eigen::MatrixXd propagated = ws.a_hat * hidden;                          // n x h
  const Eigen::MatrixXd logits = (propagated * model.theta2).rowwise() + model.bias2;

  const double inv_count = 1.0 / static_cast<double>(targets.rows.size());
  double loss = 0.0;
  Eigen::MatrixXd dlogits;
  if (gradients) dlogits = Eigen::MatrixXd::Zero(logits.rows(), 2);

  for (std::size_t t = 0; t < targets.rows.size(); ++t) {
    const long row = targets.rows[t];
    const int cls = targets.classes[t];
    // Stable log-softmax.
    const double max_logit = std::max(logits(row, 0), logits(row, 1));
    const double z0 = logits(row, 0) - max_logit;
    const double z1 = logits(row, 1) - max_logit;
    const double log_sum = std::log(std::exp(z0) + std::exp(z1));
    loss += inv_count * (log_sum - (cls == 0 ? z0 : z1));
    if (gradients) {
      const double p0 = std::exp(z0 - log_sum);
      dlogits(row, 0) = inv_count * (p0 - (cls == 0 ? 1.0 : 0.0));
      dlogits(row, 1) = inv_count * ((1.0 - p0) - (cls == 1 ? 1.0 : 0.0));
    }
  }
  loss += weight_decay * model.theta1.squaredNorm();

  if (gradients) {
    gradients->theta2 = propagated.transpose() * dlogits;
    gradients->bias2 = dlogits.colwise().sum();
    Eigen::MatrixXd dhidden = ws.a_hat * (dlogits * model.theta2.transpose());  // a_hat symmetric
    if (dropout_mask) dhidden = dhidden.cwiseProduct(*dropout_mask);
    const Eigen::MatrixXd dpre =
        dhidden.cwiseProduct((pre_hidden.array() > 0.0).cast<double>().matrix());
    gradients->theta1 = ws.ax.transpose() * dpre + 2.0 * weight_decay * model.theta1;
    gradients->bias1 = dpre.colwise().sum();
  }
  return loss;
}

Eigen::MatrixXd gcn_logits(const GcnModel& model, const GcnWorkspace& ws) {
  const Eigen::MatrixXd hidden =
      (((ws.ax * model.theta1).rowwise() + model.bias1).cwiseMax(0.0));
  return ((ws.a_hat * hidden) * model.theta2).rowwise() + model.bias2;
}

namespace {

/// Adam state for one tensor.
struct AdamSlot {
  Eigen::MatrixXd m, v;

  explicit AdamSlot(long rows, long cols)
      : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

  template <typename Param, typename Grad>
  void step(Param& param, const Grad& grad, double lr, int t) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double correction1 = 1.0 - std::pow(beta1, t);
    const double correction2 = 1.0 - std::pow(beta2, t);
    param.array() -= (lr / correction1) * m.array() / ((v.array() / correction2).sqrt() + eps);
  }
};

}  // namespace

GcnResult gcn_train_and_classify(const SimilarityGraph& sparsified_graph,
                                 const Eigen::MatrixXd& features, const LabelVector& labels,
                                 const GcnParams& params) {
  if (!(params.dropout >= 0.0 && params.dropout < 1.0)) {
    throw std::invalid_argument("dropout must lie in [0, 1)");
  }
  if (!features.allFinite()) throw std::invalid_argument("features must be finite");

  const GcnWorkspace ws = gcn_workspace(sparsified_graph, features);
  const GcnTargets targets = gcn_targets(labels);
  GcnModel model = gcn_init(static_cast<std::size_t>(features.cols()), params.hidden,
                            params.seed);

  Rng rng(params.seed ^ 0x5eed0fdadbeefULL);  // separate stream for dropout masks
  const long n = features.rows();
  const double keep = 1.0 - params.dropout;

  AdamSlot adam_t1(model.theta1.rows(), model.theta1.cols());
  AdamSlot adam_b1(1, model.bias1.cols());
  AdamSlot adam_t2(model.theta2.rows(), model.theta2.cols());
  AdamSlot adam_b2(1, model.bias2.cols());

  GcnGradients grads;
  Eigen::MatrixXd mask;
  double loss = 0.0;
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    const Eigen::MatrixXd* mask_ptr = nullptr;
    if (params.dropout > 0.0) {
      mask.resize(n, params.hidden);
      for (long i = 0; i < n; ++i) {
        for (long j = 0; j < params.hidden; ++j) {
          mask(i, j) = rng.next_double() < keep ? 1.0 / keep : 0.0;
        }
      }
      mask_ptr = &mask;
    }

    loss = gcn_loss(model, ws, targets, params.weight_decay, mask_ptr, &grads);
    if (!std::isfinite(loss)) {
      throw TrainingError("GCN loss became non-finite at epoch " + std::to_string(epoch));
    }

    adam_t1.step(model.theta1, grads.theta1, params.learning_rate, epoch);
    adam_b1.step(model.bias1, grads.bias1, params.learning_rate, epoch);
    adam_t2.step(model.theta2, grads.theta2, params.learning_rate, epoch);
    adam_b2.step(model.bias2, grads.bias2, params.learning_rate, epoch);
  }

  GcnResult result;
  result.logits = gcn_logits(model, ws);
  if (!result.logits.allFinite()) throw TrainingError("GCN produced non-finite logits");
  result.final_loss = loss;
  result.labels.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    result.labels[static_cast<std::size_t>(i)] =
        result.logits(i, 1) >= result.logits(i, 0) ? +1 : -1;
  }
  return result;
}

Eigen::MatrixXd identity_features(std::size_t n) {
  return Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n));
}

}  // namespace tsgc
