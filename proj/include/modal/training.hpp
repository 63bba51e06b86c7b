#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/metrics.hpp"
#include "modal/mlp.hpp"

namespace modal {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 128;
  long steps = 1;
  long eval_every = 200;
  std::uint64_t seed = 0;
  double eta = 0.0;
  bool record_heldout = false;  // also emit the held-out batch loss as a metric
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  MlpGrad m;
  MlpGrad v;
};

AdamState make_adam_state(const MlpParams& params);

// Standard Adam with bias correction:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * mhat / (sqrt(vhat) + eps)
void adam_step(MlpParams& params, const MlpGrad& grad, AdamState& state,
               double lr);

// Thrown when the training loss stops being finite; training aborts rather
// than clipping.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(const std::string& what)
      : std::runtime_error(what) {}
};

// Computes the mean batch loss and writes the mean parameter gradient.
using BatchObjective = std::function<double(
    const MlpParams&, const Dataset&, std::span<const int>, MlpGrad&)>;

// Called every eval_every steps; returns named metric values to record.
using Evaluator = std::function<std::vector<std::pair<std::string, double>>(
    long step, const MlpParams&)>;

struct TrainResult {
  MlpParams params;
  std::vector<EvalRecord> curve;
};

// Minibatch Adam loop. Batches are drawn uniformly with replacement from a
// generator seeded off config.seed; the whole run is deterministic.
TrainResult train_custom(const Dataset& data, const NetConfig& net,
                         const TrainConfig& config,
                         const BatchObjective& objective,
                         const Evaluator& evaluator = {});

// Trains the implicit modal-regression network on the local loss.
TrainResult train(const Dataset& data, const NetConfig& net,
                  const TrainConfig& config, const Evaluator& evaluator = {});

}  // namespace modal
