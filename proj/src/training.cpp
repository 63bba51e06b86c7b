#include "modal/training.hpp"

#include <algorithm>
#include <cmath>

#include "modal/objective.hpp"
#include "modal/rng.hpp"

namespace modal {

AdamState make_adam_state(const MlpParams& params) {
  AdamState s;
  s.m = make_grad(params);
  s.v = make_grad(params);
  return s;
}

void adam_step(MlpParams& params, const MlpGrad& grad, AdamState& state,
               double lr) {
  if (grad.layers.size() != params.layers.size() ||
      state.m.layers.size() != params.layers.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (size_t li = 0; li < params.layers.size(); ++li) {
    auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
      if (g.size() != theta.size())
        throw std::invalid_argument("adam_step: shape mismatch");
      for (size_t i = 0; i < theta.size(); ++i) {
        m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
        v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
      }
    };
    update(params.layers[li].w, grad.layers[li].w, state.m.layers[li].w,
           state.v.layers[li].w);
    update(params.layers[li].b, grad.layers[li].b, state.m.layers[li].b,
           state.v.layers[li].b);
  }
}

TrainResult train_custom(const Dataset& data, const NetConfig& net,
                         const TrainConfig& config,
                         const BatchObjective& objective,
                         const Evaluator& evaluator) {
  if (data.n == 0) throw std::invalid_argument("train: empty dataset");
  if (config.batch_size < 1) throw std::invalid_argument("train: batch_size < 1");
  if (config.learning_rate <= 0.0)
    throw std::invalid_argument("train: learning_rate <= 0");

  TrainResult result;
  result.params = init_xavier(net, derive_seed(config.seed, 0));
  Rng sampler(derive_seed(config.seed, 1));
  AdamState adam = make_adam_state(result.params);
  MlpGrad grad = make_grad(result.params);
  MlpGrad scratch = make_grad(result.params);

  // fixed held-out batch for the finiteness check at evaluation points
  std::vector<int> heldout(std::min<long>(data.n, 256));
  for (size_t i = 0; i < heldout.size(); ++i) heldout[i] = static_cast<int>(i);

  std::vector<int> batch(config.batch_size);
  const long seed_l = static_cast<long>(config.seed);

  for (long step = 1; step <= config.steps; ++step) {
    for (int& b : batch) b = static_cast<int>(sampler.integer(data.n));
    const double loss = objective(result.params, data, batch, grad);
    if (!std::isfinite(loss))
      throw TrainingDiverged("non-finite training loss at step " +
                             std::to_string(step));
    adam_step(result.params, grad, adam, config.learning_rate);

    if (config.eval_every > 0 && step % config.eval_every == 0) {
      const double ho = objective(result.params, data, heldout, scratch);
      if (!std::isfinite(ho))
        throw TrainingDiverged("non-finite held-out loss at step " +
                               std::to_string(step));
      if (config.record_heldout)
        result.curve.push_back({step, "heldout_loss", ho, seed_l});
      if (evaluator) {
        for (const auto& [name, value] : evaluator(step, result.params))
          result.curve.push_back({step, name, value, seed_l});
      }
    }
  }
  return result;
}

TrainResult train(const Dataset& data, const NetConfig& net,
                  const TrainConfig& config, const Evaluator& evaluator) {
  BatchWorkspace ws;
  const double eta = config.eta;
  auto objective = [eta, &ws](const MlpParams& params, const Dataset& d,
                              std::span<const int> idx, MlpGrad& grad) {
    return batch_loss_and_grad(params, d, idx, eta, grad, ws);
  };
  return train_custom(data, net, config, objective, evaluator);
}

}  // namespace modal
