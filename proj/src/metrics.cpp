#include "modal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modal {

namespace {

inline double dist(double a, double b, ErrorTerm term) {
  const double d = std::abs(a - b);
  return term == ErrorTerm::Squared ? d * d : d;
}

}  // namespace

double closest_mode_error(double prediction, std::span<const double> true_modes,
                          ErrorTerm term) {
  if (true_modes.empty())
    throw std::invalid_argument("closest_mode_error: empty mode set");
  double best = dist(prediction, true_modes[0], term);
  for (size_t i = 1; i < true_modes.size(); ++i)
    best = std::min(best, dist(prediction, true_modes[i], term));
  return best;
}

double directed_hausdorff(std::span<const double> a, std::span<const double> b,
                          ErrorTerm term) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("directed_hausdorff: empty set");
  double worst = 0.0;
  for (double av : a) worst = std::max(worst, closest_mode_error(av, b, term));
  return worst;
}

double hausdorff(std::span<const double> a, std::span<const double> b,
                 ErrorTerm term) {
  return std::max(directed_hausdorff(a, b, term),
                  directed_hausdorff(b, a, term));
}

std::vector<EvalRecord> ModalEvalResult::records(
    long step, long seed, const std::vector<std::string>& only) const {
  std::vector<std::pair<std::string, double>> all;
  all.emplace_back("rmse_global_pick", rmse_global_pick);
  all.emplace_back("mae_global_pick", mae_global_pick);
  if (hausdorff_rmse) all.emplace_back("hausdorff_rmse", *hausdorff_rmse);
  if (hausdorff_mae) all.emplace_back("hausdorff_mae", *hausdorff_mae);
  if (worst_rmse) all.emplace_back("worst_rmse", *worst_rmse);
  if (worst_mae) all.emplace_back("worst_mae", *worst_mae);
  all.emplace_back("local_empty_count", local_empty_count);
  all.emplace_back("local_singleton_fraction", local_singleton_fraction);

  std::vector<EvalRecord> out;
  for (auto& [name, value] : all) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), name) == only.end())
      continue;
    out.push_back({step, name, value, seed});
  }
  return out;
}

namespace {

ModalEvalResult evaluate_rows(
    const ModePredictor& predictor, const Dataset& test,
    const std::function<std::vector<double>(int)>& truth_for_row,
    Rng& eval_rng) {
  if (test.n == 0) throw std::invalid_argument("evaluate_modal: empty test set");
  double sq_sum = 0.0, abs_sum = 0.0;
  double h_sq_sum = 0.0, h_abs_sum = 0.0;
  double w_sq_sum = 0.0, w_abs_sum = 0.0;
  int h_count = 0;
  int singleton = 0;
  ModalEvalResult res;

  for (int i = 0; i < test.n; ++i) {
    const auto truth = truth_for_row(i);
    if (truth.empty())
      throw std::invalid_argument("evaluate_modal: oracle returned empty set");
    const ModalPredictions pred = predictor(test.row(i));
    if (pred.global.empty())
      throw std::runtime_error("evaluate_modal: empty global prediction set");

    const double pick = pick_random_mode(pred.global, eval_rng);
    sq_sum += closest_mode_error(pick, truth, ErrorTerm::Squared);
    abs_sum += closest_mode_error(pick, truth, ErrorTerm::Abs);

    if (pred.local.empty()) {
      ++res.local_empty_count;
    } else {
      if (pred.local.size() == 1) ++singleton;
      h_sq_sum += hausdorff(pred.local.modes, truth, ErrorTerm::Squared);
      h_abs_sum += hausdorff(pred.local.modes, truth, ErrorTerm::Abs);
      w_sq_sum += directed_hausdorff(pred.local.modes, truth, ErrorTerm::Squared);
      w_abs_sum += directed_hausdorff(pred.local.modes, truth, ErrorTerm::Abs);
      ++h_count;
    }
  }

  res.rmse_global_pick = std::sqrt(sq_sum / test.n);
  res.mae_global_pick = abs_sum / test.n;
  if (h_count > 0) {
    res.hausdorff_rmse = std::sqrt(h_sq_sum / h_count);
    res.hausdorff_mae = h_abs_sum / h_count;
    res.worst_rmse = std::sqrt(w_sq_sum / h_count);
    res.worst_mae = w_abs_sum / h_count;
    res.local_singleton_fraction = static_cast<double>(singleton) / h_count;
  }
  return res;
}

}  // namespace

ModalEvalResult evaluate_modal(const ModePredictor& predictor,
                               const Dataset& test, const ModeOracle& oracle,
                               Rng& eval_rng) {
  if (!oracle.modes) throw std::invalid_argument("evaluate_modal: no oracle");
  auto truth_for_row = [&](int i) {
    const double key = test.oracle_key.empty()
                           ? (test.d == 1 ? test.x[i] : 0.0)
                           : test.oracle_key[i];
    return oracle.modes(key);
  };
  if (test.oracle_key.empty() && test.d != 1)
    throw std::invalid_argument("evaluate_modal: test set lacks an oracle key");
  return evaluate_rows(predictor, test, truth_for_row, eval_rng);
}

ModalEvalResult evaluate_modal_targets(
    const ModePredictor& predictor, const Dataset& test,
    const std::vector<std::vector<double>>& target_sets, Rng& eval_rng) {
  if (target_sets.size() != static_cast<size_t>(test.n))
    throw std::invalid_argument("evaluate_modal_targets: target list mismatch");
  return evaluate_rows(
      predictor, test, [&](int i) { return target_sets[i]; }, eval_rng);
}

double regression_rmse(const std::function<double(std::span<const double>)>& f,
                       const Dataset& test,
                       const std::function<bool(double)>& key_filter) {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < test.n; ++i) {
    if (key_filter) {
      const double key = test.oracle_key.empty() ? test.x[i] : test.oracle_key[i];
      if (!key_filter(key)) continue;
    }
    const double r = f(test.row(i)) - test.y[i];
    sum += r * r;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("regression_rmse: empty selection");
  return std::sqrt(sum / count);
}

ModePredictor implicit_predictor(const MlpParams& params, const ModeGrid& grid,
                                 double eta) {
  return [&params, grid, eta](std::span<const double> x) {
    const auto profile = loss_profile(params, x, grid, eta);
    ModalPredictions out;
    out.global = s_global(profile, grid);
    out.local = s_local(profile, grid);
    return out;
  };
}

ModePredictor density_predictor(
    const std::function<double(std::span<const double>, double)>& density,
    const ModeGrid& grid) {
  return [density, grid](std::span<const double> x) {
    std::vector<double> p(grid.values.size());
    for (size_t j = 0; j < grid.values.size(); ++j)
      p[j] = density(x, grid.values[j]);
    const double best = *std::max_element(p.begin(), p.end());
    ModalPredictions out;
    out.global.kind = ModeKind::Global;
    for (size_t j = 0; j < p.size(); ++j)
      if (p[j] == best) out.global.modes.push_back(grid.values[j]);
    out.local.kind = ModeKind::Local;
    for (size_t j = 1; j + 1 < p.size(); ++j)
      if (p[j] > p[j - 1] && p[j] > p[j + 1])
        out.local.modes.push_back(grid.values[j]);
    return out;
  };
}

ModePredictor point_predictor(
    const std::function<double(std::span<const double>)>& f) {
  return [f](std::span<const double> x) {
    const double v = f(x);
    ModalPredictions out;
    out.global.modes = {v};
    out.local.kind = ModeKind::Local;
    out.local.modes = {v};
    return out;
  };
}

}  // namespace modal
