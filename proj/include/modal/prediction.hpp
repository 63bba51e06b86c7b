#pragma once

#include <span>
#include <vector>

#include "modal/datasets.hpp"
#include "modal/mlp.hpp"
#include "modal/rng.hpp"

namespace modal {

// Evenly spaced candidate targets for grid-search prediction.
struct ModeGrid {
  double y_min = 0.0;
  double y_max = 1.0;
  int count = 200;
  std::vector<double> values;

  double step() const { return (y_max - y_min) / (count - 1); }
};

ModeGrid make_grid(double y_min, double y_max, int count = 200);

// Default range is the training-target range, optionally padded by a
// fraction of its width on both sides.
ModeGrid grid_from_targets(const Dataset& data, int count = 200,
                           double pad_fraction = 0.0);

enum class ModeKind { Global, Local };

struct ModeSet {
  std::vector<double> modes;  // ascending
  ModeKind kind = ModeKind::Global;

  bool empty() const { return modes.empty(); }
  size_t size() const { return modes.size(); }
};

// Local loss l(x, y_j) at every grid value.
std::vector<double> loss_profile(const MlpParams& params,
                                 std::span<const double> x,
                                 const ModeGrid& grid, double eta);

// All grid values whose loss is within tol of the profile minimum.
ModeSet s_global(std::span<const double> profile, const ModeGrid& grid,
                 double tol = 1e-5);

// Strict interior local minimizers of the profile.
ModeSet s_local(std::span<const double> profile, const ModeGrid& grid);

double pick_random_mode(const ModeSet& set, Rng& rng);

}  // namespace modal
