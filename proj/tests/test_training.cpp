#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "modal/datasets.hpp"
#include "modal/metrics.hpp"
#include "modal/objective.hpp"
#include "modal/prediction.hpp"
#include "modal/training.hpp"
#include "test_support.hpp"

using namespace modal;

namespace {

MlpParams scalar_param_net() {
  // single 1x1 layer, identity everywhere: the weight is the only live
  // parameter once the bias gradient stays zero
  NetConfig config;
  config.input_dim = 1;
  config.hidden = {1};
  config.hidden_act = Activation::Identity;
  config.output_act = Activation::Identity;
  MlpParams p = init_xavier(config, 0);
  p.layers[0].w = {0.5};
  p.layers[1].w = {1.0};
  return p;
}

}  // namespace

TEST_CASE("adam leaves params unchanged on zero gradient") {
  modal::Rng rng(1);
  MlpParams p = testutil::random_net(rng, 3);
  const MlpParams before = p;
  AdamState state = make_adam_state(p);
  MlpGrad grad = make_grad(p);
  adam_step(p, grad, state, 0.1);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    CHECK(p.layers[l].w == before.layers[l].w);
    CHECK(p.layers[l].b == before.layers[l].b);
  }
}

TEST_CASE("first adam step is -lr * g / (|g| + eps)") {
  MlpParams p = scalar_param_net();
  AdamState state = make_adam_state(p);
  MlpGrad grad = make_grad(p);
  const double g = -0.37;
  grad.layers[0].w[0] = g;
  const double w0 = p.layers[0].w[0];
  adam_step(p, grad, state, 0.01);
  CHECK(p.layers[0].w[0] ==
        doctest::Approx(w0 - 0.01 * g / (std::abs(g) + 1e-8)).epsilon(1e-12));
}

TEST_CASE("ten adam steps match an independent scalar reference") {
  MlpParams p = scalar_param_net();
  AdamState state = make_adam_state(p);
  MlpGrad grad = make_grad(p);
  const double g = 0.8;
  const double lr = 0.05;
  grad.layers[0].w[0] = g;

  // hand-rolled reference trace
  double theta = p.layers[0].w[0];
  double m = 0.0, v = 0.0;
  for (int t = 1; t <= 10; ++t) {
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1.0 - std::pow(0.9, t));
    const double vhat = v / (1.0 - std::pow(0.999, t));
    theta -= lr * mhat / (std::sqrt(vhat) + 1e-8);
    adam_step(p, grad, state, lr);
    CHECK(p.layers[0].w[0] == doctest::Approx(theta).epsilon(1e-12));
  }
  CHECK(state.t == 10);
}

TEST_CASE("adam rejects mismatched shapes") {
  modal::Rng rng(2);
  MlpParams p = testutil::random_net(rng, 3);
  NetConfig other;
  other.input_dim = 3;
  other.hidden = {2, 2, 2};
  MlpParams q = init_xavier(other, 1);
  AdamState state = make_adam_state(p);
  MlpGrad wrong = make_grad(q);
  CHECK_THROWS_AS(adam_step(p, wrong, state, 0.1), std::invalid_argument);
}

TEST_CASE("train with zero steps returns the initialized params") {
  Labeled circle = gen_circle(64, 0.1, 3);
  NetConfig net;
  net.input_dim = 2;
  net.hidden = {4};
  TrainConfig tc;
  tc.steps = 0;
  tc.seed = 17;
  const TrainResult result = train(circle.data, net, tc);
  const MlpParams fresh = init_xavier(net, derive_seed(17, 0));
  for (size_t l = 0; l < fresh.layers.size(); ++l)
    CHECK(result.params.layers[l].w == fresh.layers[l].w);
  CHECK(result.curve.empty());
}

TEST_CASE("identical seeds replay identical curves and parameter bytes") {
  Labeled circle = gen_circle(512, 0.1, 5);
  NetConfig net;
  net.input_dim = 2;
  net.hidden = {8, 8};
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.batch_size = 32;
  tc.steps = 300;
  tc.eval_every = 100;
  tc.seed = 99;
  tc.record_heldout = true;

  const TrainResult a = train(circle.data, net, tc);
  const TrainResult b = train(circle.data, net, tc);
  REQUIRE(a.curve.size() == b.curve.size());
  CHECK(a.curve.size() == 3);  // heldout_loss at steps 100, 200, 300
  for (size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].step == b.curve[i].step);
    CHECK(a.curve[i].metric == b.curve[i].metric);
    CHECK(a.curve[i].value == b.curve[i].value);
    CHECK(std::isfinite(a.curve[i].value));
  }
  for (size_t l = 0; l < a.params.layers.size(); ++l) {
    CHECK(std::memcmp(a.params.layers[l].w.data(), b.params.layers[l].w.data(),
                      a.params.layers[l].w.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.params.layers[l].b.data(), b.params.layers[l].b.data(),
                      a.params.layers[l].b.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("divergence aborts with a diagnostic") {
  Labeled circle = gen_circle(64, 0.1, 7);
  NetConfig net;
  net.input_dim = 2;
  net.hidden = {4};
  TrainConfig tc;
  tc.steps = 10;
  tc.seed = 1;
  int calls = 0;
  auto objective = [&calls](const MlpParams&, const Dataset&,
                            std::span<const int>, MlpGrad& grad) {
    grad.set_zero();
    return ++calls >= 3 ? std::nan("") : 1.0;
  };
  CHECK_THROWS_AS(train_custom(circle.data, net, tc, objective),
                  TrainingDiverged);
}

TEST_CASE("empty dataset is rejected") {
  Dataset empty;
  NetConfig net;
  net.input_dim = 2;
  net.hidden = {4};
  TrainConfig tc;
  CHECK_THROWS_AS(train(empty, net, tc), std::invalid_argument);
}

TEST_CASE("the evaluator runs on schedule with finite held-out loss") {
  Labeled circle = gen_circle(256, 0.1, 11);
  NetConfig net;
  net.input_dim = 2;
  net.hidden = {8};
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.batch_size = 32;
  tc.steps = 500;
  tc.eval_every = 100;
  tc.seed = 4;
  tc.record_heldout = true;
  std::vector<long> seen;
  const TrainResult result =
      train(circle.data, net, tc, [&seen](long step, const MlpParams&) {
        seen.push_back(step);
        return std::vector<std::pair<std::string, double>>{{"probe", 1.0}};
      });
  CHECK(seen == std::vector<long>{100, 200, 300, 400, 500});
  int heldout_records = 0;
  for (const auto& r : result.curve) {
    CHECK(std::isfinite(r.value));
    if (r.metric == "heldout_loss") ++heldout_records;
  }
  CHECK(heldout_records == 5);
}
