#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modal/baselines.hpp"
#include "modal/config.hpp"
#include "modal/datasets.hpp"
#include "modal/metrics.hpp"
#include "modal/pipeline.hpp"
#include "modal/prediction.hpp"
#include "modal/training.hpp"

namespace modal {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Everything one run (one seed) trains and evaluates on.
struct RunData {
  Dataset train;
  Dataset test;
  ModeOracle oracle;
  bool has_oracle = false;
  // Modality-built datasets evaluate against explicit per-row target sets.
  std::vector<std::vector<double>> test_target_sets;
  bool has_target_sets = false;
  // csv pipelines report errors in the pre-scaling (e.g. log) space
  TargetScaler scaler;
  bool unscale_errors = false;
};

RunData build_run_data(const Config& cfg, std::uint64_t run_seed);
ModeGrid build_grid(const Config& cfg, const Dataset& train);
NetConfig build_net(const Config& cfg, int feature_dim, bool implicit_model);
TrainConfig build_train_config(const Config& cfg, std::uint64_t run_seed,
                               const std::vector<std::string>& metrics);

// One full run: train (or fit) the configured method and record the
// requested metrics every eval_every steps. Returns the learning curve and
// writes the model file under output_dir.
std::vector<EvalRecord> run_single(const Config& cfg, std::uint64_t run_seed,
                                   const std::string& output_dir);

// Subcommands; all artifacts land in experiment.output_dir.
int cmd_generate(const Config& cfg);
int cmd_train(const Config& cfg);
int cmd_eval(const Config& cfg);
int cmd_experiment(const Config& cfg);
int cmd_predict(const Config& cfg);

// Parses argv, loads the config, applies overrides, dispatches, and maps
// exceptions to exit codes (2 config, 3 divergence, 4 I/O).
int run_cli(int argc, char** argv);

}  // namespace modal
