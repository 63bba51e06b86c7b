#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/prediction.hpp"
#include "modal/rng.hpp"

namespace modal {

struct EvalRecord {
  long step = 0;
  std::string metric;
  double value = 0.0;
  long seed = 0;
};

enum class ErrorTerm { Squared, Abs };

// Distance from a single prediction to the nearest true mode; squared when
// the term feeds an RMSE aggregate.
double closest_mode_error(double prediction, std::span<const double> true_modes,
                          ErrorTerm term);

// max of the two directed sup-inf set distances.
double hausdorff(std::span<const double> a, std::span<const double> b,
                 ErrorTerm term);

// Directed variant: max over a of the distance to the nearest b. With a
// singleton b this is the worst-case prediction error.
double directed_hausdorff(std::span<const double> a, std::span<const double> b,
                          ErrorTerm term);

struct ModalPredictions {
  ModeSet global;
  ModeSet local;
};

using ModePredictor = std::function<ModalPredictions(std::span<const double>)>;

// Aggregated modal-regression metrics over a test set.
struct ModalEvalResult {
  double rmse_global_pick = 0.0;  // random S_global pick vs closest true mode
  double mae_global_pick = 0.0;
  std::optional<double> hausdorff_rmse;  // S_local vs true mode set
  std::optional<double> hausdorff_mae;
  std::optional<double> worst_rmse;  // directed: predictions to true modes
  std::optional<double> worst_mae;
  int local_empty_count = 0;        // points with no local minimizer (failures)
  double local_singleton_fraction = 0.0;  // caveat: Hausdorff degenerates

  std::vector<EvalRecord> records(long step, long seed,
                                  const std::vector<std::string>& only = {}) const;
};

// Evaluates a predictor against the oracle on every test row. The oracle is
// queried with the row's oracle key (its scalar generator input).
ModalEvalResult evaluate_modal(const ModePredictor& predictor,
                               const Dataset& test, const ModeOracle& oracle,
                               Rng& eval_rng);

// Same pick-vs-closest-mode evaluation, but against per-row target sets
// (used by the modality-construction pipeline where each instance carries
// an explicit list of acceptable targets).
ModalEvalResult evaluate_modal_targets(
    const ModePredictor& predictor, const Dataset& test,
    const std::vector<std::vector<double>>& target_sets, Rng& eval_rng);

// Plain regression RMSE of a point predictor against test targets,
// optionally restricted by a filter on the oracle key.
double regression_rmse(const std::function<double(std::span<const double>)>& f,
                       const Dataset& test,
                       const std::function<bool(double)>& key_filter = {});

// Predictor adapters.
ModePredictor implicit_predictor(const MlpParams& params, const ModeGrid& grid,
                                 double eta);
// For conditional-density models: global = density argmax (ties kept),
// local = strict interior local maxima.
ModePredictor density_predictor(
    const std::function<double(std::span<const double>, double)>& density,
    const ModeGrid& grid);
// For point regressors: both sets are the singleton {f(x)}.
ModePredictor point_predictor(
    const std::function<double(std::span<const double>)>& f);

}  // namespace modal
