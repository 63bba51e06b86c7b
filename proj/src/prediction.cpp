#include "modal/prediction.hpp"

#include <algorithm>
#include <stdexcept>

#include "modal/objective.hpp"

namespace modal {

ModeGrid make_grid(double y_min, double y_max, int count) {
  if (!(y_min < y_max)) throw std::invalid_argument("make_grid: y_min >= y_max");
  if (count < 3) throw std::invalid_argument("make_grid: count < 3");
  ModeGrid grid;
  grid.y_min = y_min;
  grid.y_max = y_max;
  grid.count = count;
  grid.values.resize(count);
  for (int j = 0; j < count; ++j)
    grid.values[j] = y_min + (y_max - y_min) * (static_cast<double>(j) / (count - 1));
  grid.values.front() = y_min;
  grid.values.back() = y_max;
  return grid;
}

ModeGrid grid_from_targets(const Dataset& data, int count, double pad_fraction) {
  if (data.n == 0) throw std::invalid_argument("grid_from_targets: empty dataset");
  const double lo = *std::min_element(data.y.begin(), data.y.end());
  const double hi = *std::max_element(data.y.begin(), data.y.end());
  const double pad = (hi - lo) * pad_fraction;
  return make_grid(lo - pad, hi + pad, count);
}

std::vector<double> loss_profile(const MlpParams& params,
                                 std::span<const double> x,
                                 const ModeGrid& grid, double eta) {
  std::vector<double> profile(grid.values.size());
  ForwardTrace trace;
  for (size_t j = 0; j < grid.values.size(); ++j)
    profile[j] = local_loss(forward_jet(params, x, grid.values[j], trace), eta);
  return profile;
}

ModeSet s_global(std::span<const double> profile, const ModeGrid& grid,
                 double tol) {
  if (profile.size() != grid.values.size())
    throw std::invalid_argument("s_global: profile/grid length mismatch");
  const double best = *std::min_element(profile.begin(), profile.end());
  ModeSet set;
  set.kind = ModeKind::Global;
  for (size_t j = 0; j < profile.size(); ++j)
    if (std::abs(profile[j] - best) < tol) set.modes.push_back(grid.values[j]);
  return set;
}

ModeSet s_local(std::span<const double> profile, const ModeGrid& grid) {
  if (profile.size() != grid.values.size())
    throw std::invalid_argument("s_local: profile/grid length mismatch");
  ModeSet set;
  set.kind = ModeKind::Local;
  for (size_t j = 1; j + 1 < profile.size(); ++j)
    if (profile[j] < profile[j - 1] && profile[j] < profile[j + 1])
      set.modes.push_back(grid.values[j]);
  return set;
}

double pick_random_mode(const ModeSet& set, Rng& rng) {
  if (set.modes.empty()) throw std::invalid_argument("pick_random_mode: empty set");
  return set.modes[rng.integer(set.modes.size())];
}

}  // namespace modal
