#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "modal/objective.hpp"
#include "modal/prediction.hpp"
#include "test_support.hpp"

using namespace modal;

namespace {

// f(x, y) = y through an identity pass-through net, so the local loss is
// y^2 + (1+1)^2 = y^2 + 4 in closed form
MlpParams passthrough_net() {
  NetConfig config;
  config.input_dim = 2;
  config.hidden = {1};
  config.hidden_act = Activation::Identity;
  config.output_act = Activation::Identity;
  MlpParams p = init_xavier(config, 0);
  p.layers[0].w = {0.0, 1.0};
  p.layers[1].w = {1.0};
  return p;
}

}  // namespace

TEST_CASE("grid construction hits both endpoints with uniform spacing") {
  const ModeGrid grid = make_grid(-1.0, 1.0, 200);
  CHECK(grid.values.size() == 200);
  CHECK(grid.values.front() == -1.0);
  CHECK(grid.values.back() == 1.0);
  const double h = grid.step();
  for (size_t j = 1; j < grid.values.size(); ++j)
    CHECK(std::abs(grid.values[j] - grid.values[j - 1] - h) < 1e-12);
  CHECK(std::is_sorted(grid.values.begin(), grid.values.end()));

  CHECK_THROWS_AS(make_grid(1.0, 1.0, 200), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("grid_from_targets covers the target range with optional padding") {
  Dataset data;
  data.d = 1;
  data.n = 3;
  data.x = {0, 0, 0};
  data.y = {-2.0, 0.5, 3.0};
  const ModeGrid grid = grid_from_targets(data, 100);
  CHECK(grid.y_min == -2.0);
  CHECK(grid.y_max == 3.0);
  const ModeGrid padded = grid_from_targets(data, 100, 0.1);
  CHECK(padded.y_min == doctest::Approx(-2.5));
  CHECK(padded.y_max == doctest::Approx(3.5));
}

TEST_CASE("loss_profile matches the closed form y^2 + 4") {
  const MlpParams p = passthrough_net();
  const ModeGrid grid = make_grid(-1.0, 1.0, 200);
  const std::vector<double> x = {0.3};
  const auto profile = loss_profile(p, x, grid, 0.0);
  REQUIRE(profile.size() == 200);
  for (size_t j = 0; j < profile.size(); ++j) {
    CHECK(profile[j] >= 0.0);
    CHECK(profile[j] ==
          doctest::Approx(grid.values[j] * grid.values[j] + 4.0).epsilon(1e-12));
  }
  // brute-force recomputation, one jet at a time
  for (size_t j = 0; j < profile.size(); ++j) {
    const Jet2 jet = forward_jet(p, x, grid.values[j]);
    CHECK(profile[j] == local_loss(jet, 0.0));
  }
}

TEST_CASE("s_global keeps the tolerance band around the minimum") {
  const ModeGrid grid = make_grid(0.0, 1.0, 200);
  std::vector<double> profile(200, 5.0);
  profile[37] = 1.0;
  const ModeSet unique = s_global(profile, grid);
  REQUIRE(unique.size() == 1);
  CHECK(unique.modes[0] == grid.values[37]);

  const std::vector<double> flat(200, 2.0);
  CHECK(s_global(flat, grid).size() == 200);
}

TEST_CASE("s_global on y^2 + 4 agrees with direct enumeration") {
  const MlpParams p = passthrough_net();
  const ModeGrid grid = make_grid(-1.0, 1.0, 200);
  const std::vector<double> x = {0.0};
  const auto profile = loss_profile(p, x, grid, 0.0);

  const double best = *std::min_element(profile.begin(), profile.end());
  std::vector<double> expected;
  for (size_t j = 0; j < profile.size(); ++j)
    if (std::abs(profile[j] - best) < 1e-5) expected.push_back(grid.values[j]);

  const ModeSet set = s_global(profile, grid);
  CHECK(set.modes == expected);
  // 200 points over [-1,1] straddle zero symmetrically: both qualify
  CHECK(set.size() == 2);
}

TEST_CASE("s_local finds exactly the strict interior dips") {
  const ModeGrid grid = make_grid(0.0, 1.0, 10);
  std::vector<double> rising(10);
  for (int j = 0; j < 10; ++j) rising[j] = j;
  CHECK(s_local(rising, grid).empty());

  // W shape: dips at indices 2 and 7
  const std::vector<double> w = {5, 4, 1, 4, 5, 6, 4, 2, 4, 5};
  const ModeSet set = s_local(w, grid);
  REQUIRE(set.size() == 2);
  CHECK(set.modes[0] == grid.values[2]);
  CHECK(set.modes[1] == grid.values[7]);

  // plateaus are not strict minima
  const std::vector<double> plateau = {3, 1, 1, 3, 5, 5, 5, 5, 5, 5};
  CHECK(s_local(plateau, grid).empty());
}

TEST_CASE("pick_random_mode is uniform and reproducible") {
  ModeSet singleton;
  singleton.modes = {0.5};
  Rng rng(0);
  CHECK(pick_random_mode(singleton, rng) == 0.5);

  ModeSet pair;
  pair.modes = {-1.0, 1.0};
  Rng counter(123);
  int negatives = 0;
  for (int i = 0; i < 1000; ++i)
    if (pick_random_mode(pair, counter) < 0.0) ++negatives;
  CHECK(std::abs(negatives / 1000.0 - 0.5) < 0.05);

  Rng r1(7), r2(7);
  for (int i = 0; i < 50; ++i)
    CHECK(pick_random_mode(pair, r1) == pick_random_mode(pair, r2));

  ModeSet empty;
  CHECK_THROWS_AS(pick_random_mode(empty, rng), std::invalid_argument);
}

TEST_CASE("strict-interior global minimizers always appear in s_local") {
  modal::Rng rng(19);
  const ModeGrid grid = make_grid(-1.0, 1.0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> profile(50);
    for (double& v : profile) v = rng.uniform(0.0, 1.0);
    const ModeSet global = s_global(profile, grid, 1e-5);
    const ModeSet local = s_local(profile, grid);
    CHECK(!global.empty());
    for (size_t j = 1; j + 1 < profile.size(); ++j) {
      const bool strict_interior_min =
          profile[j] < profile[j - 1] && profile[j] < profile[j + 1];
      const bool in_global =
          std::find(global.modes.begin(), global.modes.end(), grid.values[j]) !=
          global.modes.end();
      if (in_global && strict_interior_min)
        CHECK(std::find(local.modes.begin(), local.modes.end(),
                        grid.values[j]) != local.modes.end());
    }
    // both outputs are grid subsets, sorted
    CHECK(std::is_sorted(global.modes.begin(), global.modes.end()));
    for (double m : local.modes) {
      CHECK(m >= grid.y_min);
      CHECK(m <= grid.y_max);
    }
  }
}
