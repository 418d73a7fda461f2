#include <doctest.h>

#include <cmath>

#include "support/synthetic.hpp"
#include "tsgc/common.hpp"
#include "tsgc/gcn.hpp"

using namespace tsgc;

namespace {

struct Fixture {
  SimilarityGraph graph;
  Eigen::MatrixXd features;
  LabelVector labels;
};

Fixture random_fixture(std::size_t n, std::uint64_t seed) {
  const auto cloud = synthetic::blob_cloud(n, seed);
  Fixture fx;
  const auto scales = self_tuning_scales(cloud.distances, std::min<int>(5, int(n) - 1));
  const auto dense = gaussian_adjacency(cloud.distances, scales);
  fx.graph = knn_sparsify(dense, std::min<int>(4, int(n) - 1));
  fx.features = dense.weights;
  fx.labels = LabelVector::Zero(static_cast<long>(n));
  for (std::size_t i = 0; i < n; i += 3) {
    fx.labels(static_cast<long>(i)) = cloud.labels[i];
  }
  return fx;
}

}  // namespace

TEST_CASE("propagation matrix re-adds self loops and normalizes") {
  const auto g = synthetic::two_cliques(3);
  const auto ws = gcn_workspace(g, identity_features(6));
  // Row sums of Ahat for a (k-1)-regular graph with self loops are 1.
  for (long i = 0; i < 6; ++i) {
    CHECK(ws.a_hat.row(i).sum() == doctest::Approx(1.0));
    CHECK(ws.a_hat(i, i) > 0.0);
  }
  CHECK((ws.a_hat - ws.a_hat.transpose()).norm() <= 1e-14);
}

TEST_CASE("hidden and logit shapes follow the defaults") {
  const auto fx = random_fixture(20, 9);
  const GcnModel model = gcn_init(static_cast<std::size_t>(fx.features.cols()), 32, 7);
  CHECK(model.theta1.rows() == 20);
  CHECK(model.theta1.cols() == 32);
  CHECK(model.theta2.rows() == 32);
  CHECK(model.theta2.cols() == 2);

  const auto ws = gcn_workspace(fx.graph, fx.features);
  const auto logits = gcn_logits(model, ws);
  CHECK(logits.rows() == 20);
  CHECK(logits.cols() == 2);
}

TEST_CASE("analytic gradients match central finite differences") {
  const auto fx = random_fixture(12, 4);
  const auto ws = gcn_workspace(fx.graph, fx.features);
  const auto targets = gcn_targets(fx.labels);
  GcnModel model = gcn_init(static_cast<std::size_t>(fx.features.cols()), 8, 11);
  const double wd = 0.0005;

  GcnGradients grads;
  gcn_loss(model, ws, targets, wd, nullptr, &grads);

  const double step = 1e-5;
  double worst = 0.0;
  auto check_tensor = [&](auto& param, const auto& grad) {
    for (long i = 0; i < param.rows(); ++i) {
      for (long j = 0; j < param.cols(); ++j) {
        const double saved = param(i, j);
        param(i, j) = saved + step;
        const double up = gcn_loss(model, ws, targets, wd);
        param(i, j) = saved - step;
        const double down = gcn_loss(model, ws, targets, wd);
        param(i, j) = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(numeric), std::abs(grad(i, j)), 1e-8});
        worst = std::max(worst, std::abs(numeric - grad(i, j)) / denom);
      }
    }
  };
  check_tensor(model.theta1, grads.theta1);
  check_tensor(model.bias1, grads.bias1);
  check_tensor(model.theta2, grads.theta2);
  check_tensor(model.bias2, grads.bias2);
  CHECK(worst < 1e-4);
}

TEST_CASE("training is bit-identical under a fixed seed") {
  const auto fx = random_fixture(16, 21);
  GcnParams params;
  params.hidden = 8;
  params.epochs = 60;
  params.seed = 1234;
  const auto a = gcn_train_and_classify(fx.graph, fx.features, fx.labels, params);
  const auto b = gcn_train_and_classify(fx.graph, fx.features, fx.labels, params);
  CHECK(a.labels == b.labels);
  CHECK((a.logits - b.logits).norm() == 0.0);
  CHECK(a.final_loss == b.final_loss);
  CHECK(std::isfinite(a.final_loss));

  params.seed = 4321;
  const auto c = gcn_train_and_classify(fx.graph, fx.features, fx.labels, params);
  CHECK((a.logits - c.logits).norm() > 0.0);

  params.seed = 1234;
  params.dropout = 0.0;
  const auto d = gcn_train_and_classify(fx.graph, fx.features, fx.labels, params);
  const auto e = gcn_train_and_classify(fx.graph, fx.features, fx.labels, params);
  CHECK(d.labels == e.labels);
  CHECK((d.logits - e.logits).norm() == 0.0);
}

TEST_CASE("two opposite-labeled cliques are classified perfectly") {
  const auto graph = synthetic::two_cliques(5);
  LabelVector f = LabelVector::Zero(10);
  f(0) = -1;
  f(5) = +1;
  GcnParams params;
  params.epochs = 300;
  params.seed = 3;
  const auto result = gcn_train_and_classify(graph, identity_features(10), f, params);
  for (int i = 0; i < 5; ++i) CHECK(result.labels[static_cast<std::size_t>(i)] == -1);
  for (int i = 5; i < 10; ++i) CHECK(result.labels[static_cast<std::size_t>(i)] == +1);
}

TEST_CASE("gcn rejects bad inputs") {
  const auto fx = random_fixture(10, 2);
  GcnParams params;
  params.dropout = 1.0;
  CHECK_THROWS_AS(gcn_train_and_classify(fx.graph, fx.features, fx.labels, params),
                  std::invalid_argument);
  CHECK_THROWS_AS(gcn_targets(LabelVector::Zero(10)), std::invalid_argument);
}
