#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "modal/datasets.hpp"

using namespace modal;

TEST_CASE("noise-free circle samples lie on the unit circle") {
  Labeled circle = gen_circle(500, 0.0, 42);
  for (int i = 0; i < circle.data.n; ++i) {
    const double xi = circle.data.x[i];
    const double yi = circle.data.y[i];
    CHECK(std::abs(xi * xi + yi * yi - 1.0) < 1e-12);
  }
  const auto modes = circle.oracle.modes(0.0);
  REQUIRE(modes.size() == 2);
  CHECK(modes[0] == -1.0);
  CHECK(modes[1] == 1.0);
  CHECK_FALSE(circle.oracle.dominant(0.3).has_value());
}

TEST_CASE("circle targets are symmetric on average") {
  Labeled circle = gen_circle(10000, 0.1, 7);
  double mean = 0.0;
  for (double y : circle.data.y) mean += y;
  mean /= circle.data.n;
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("generators replay bitwise-identically for a fixed seed") {
  const Labeled a = gen_double_circle(300, 0.1, 9);
  const Labeled b = gen_double_circle(300, 0.1, 9);
  CHECK(a.data.x == b.data.x);
  CHECK(a.data.y == b.data.y);
  const Labeled c = gen_double_circle(300, 0.1, 10);
  CHECK(a.data.y != c.data.y);
}

TEST_CASE("double circle geometry and oracle") {
  Labeled dc = gen_double_circle(500, 0.0, 3);
  for (int i = 0; i < dc.data.n; ++i) {
    const double r2 = dc.data.x[i] * dc.data.x[i] + dc.data.y[i] * dc.data.y[i];
    const double err = std::min(std::abs(r2 - 1.0), std::abs(r2 - 4.0));
    CHECK(err < 1e-12);
  }
  const auto at0 = dc.oracle.modes(0.0);
  REQUIRE(at0.size() == 4);
  CHECK(at0[0] == -2.0);
  CHECK(at0[1] == -1.0);
  CHECK(at0[2] == 1.0);
  CHECK(at0[3] == 2.0);
  const auto at15 = dc.oracle.modes(1.5);
  REQUIRE(at15.size() == 2);
  CHECK(at15[0] == doctest::Approx(-std::sqrt(1.75)));
  CHECK(at15[1] == doctest::Approx(std::sqrt(1.75)));
}

TEST_CASE("oracle modes stay inside the generated target range") {
  for (auto [labeled, span] :
       {std::pair{gen_circle(2000, 0.1, 1), 1.0},
        std::pair{gen_double_circle(2000, 0.1, 2), 2.0}}) {
    for (double xq : {-0.9, -0.5, 0.0, 0.4, 0.8}) {
      for (double m : labeled.oracle.modes(xq)) {
        CHECK(m >= -span - 1e-9);
        CHECK(m <= span + 1e-9);
      }
    }
  }
}

TEST_CASE("biased circle mixture weights and dominant mode") {
  Labeled biased = gen_biased_circle(10000, 21);
  int neg_x = 0, neg_x_pos_y = 0;
  for (int i = 0; i < biased.data.n; ++i) {
    if (biased.data.x[i] < 0.0) {
      ++neg_x;
      if (biased.data.y[i] > 0.0) ++neg_x_pos_y;
    }
  }
  const double fraction = static_cast<double>(neg_x_pos_y) / neg_x;
  CHECK(std::abs(fraction - 0.8) < 0.03);

  const auto dom = biased.oracle.dominant(0.5);
  REQUIRE(dom.has_value());
  CHECK(*dom == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-12));
  const auto dom_neg = biased.oracle.dominant(-0.5);
  REQUIRE(dom_neg.has_value());
  CHECK(*dom_neg == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  const auto modes = biased.oracle.modes(0.0);
  CHECK(modes == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("high-frequency generator and oracle") {
  Labeled hf = gen_highfreq(400, 0.0, 5);
  CHECK(hf.oracle.modes(-0.25)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hf.oracle.modes(1.0)[0] == doctest::Approx(1.0));
  for (int i = 0; i < hf.data.n; ++i) {
    CHECK(hf.data.y[i] == hf.oracle.modes(hf.data.x[i])[0]);
    CHECK(hf.data.x[i] >= -2.5);
    CHECK(hf.data.x[i] <= 2.5);
  }
}

TEST_CASE("inverse-sine inputs stay inside the analytic range") {
  Dataset inv = gen_inverse_sin(5000, 13);
  for (int i = 0; i < inv.n; ++i) {
    CHECK(inv.x[i] >= -0.1 - 1e-12);
    CHECK(inv.x[i] <= 1.1 + 1e-12);
    CHECK(inv.y[i] >= 0.0);
    CHECK(inv.y[i] <= 1.0);
  }
  // noiseless map: y = 0 -> x = 0, y = 0.5 -> x = 0.5
  CHECK(0.0 + 0.3 * std::sin(0.0) == 0.0);
  CHECK(0.5 + 0.3 * std::sin(std::numbers::pi) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tile coding activates one tile per tiling") {
  const TileCoder coder;
  CHECK(coder.tiles_per_tiling() == 32);
  for (double x : {-2.0, -1.3, -0.01, 0.0, 0.77, 1.999, 2.0}) {
    const auto code = tile_encode(coder, x);
    REQUIRE(code.size() == 128);
    int ones = 0;
    for (int k = 0; k < 4; ++k) {
      int per_tiling = 0;
      for (int t = 0; t < 32; ++t)
        if (code[k * 32 + t] == 1.0) ++per_tiling;
      CHECK(per_tiling == 1);
      ones += per_tiling;
    }
    CHECK(ones == 4);
  }
  CHECK(tile_encode(coder, 0.5) == tile_encode(coder, 0.5 + 1e-9));
  CHECK(tile_encode(coder, -2.0) != tile_encode(coder, 2.0));
  CHECK_THROWS_AS(tile_encode(coder, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(tile_encode(coder, std::nan("")), std::invalid_argument);
}

TEST_CASE("tile-coded datasets keep targets and the oracle key") {
  Labeled dc = gen_double_circle(100, 0.1, 8);
  const TileCoder coder;
  const Dataset tiled = tile_encode_dataset(coder, dc.data);
  CHECK(tiled.d == 128);
  CHECK(tiled.n == 100);
  CHECK(tiled.y == dc.data.y);
  CHECK(tiled.oracle_key == dc.data.x);
}

namespace {

std::filesystem::path write_temp_csv(const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / "modal_test.csv";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("csv loading with one-hot categorical expansion") {
  const auto path = write_temp_csv(
      "age,color,charge\n"
      "10,red,100\n"
      "20,green,200\n"
      "30,blue,300\n"
      "40,red,400\n");
  const Dataset data = load_csv(path.string(), "charge", {"color"});
  CHECK(data.n == 4);
  CHECK(data.d == 4);  // age + 3 color levels
  // each categorical row is one-hot
  for (int i = 0; i < data.n; ++i) {
    double sum = 0.0;
    for (int j = 1; j < 4; ++j) sum += data.row(i)[j];
    CHECK(sum == 1.0);
  }
  CHECK(data.y == std::vector<double>{100, 200, 300, 400});
  CHECK(data.feature_index("color=red") >= 0);

  CHECK_THROWS_WITH_AS(load_csv(path.string(), "missing", {}),
                       doctest::Contains("missing column"), std::runtime_error);
  std::filesystem::remove(path);

  const auto bad = write_temp_csv("a,b\n1,x\n");
  CHECK_THROWS_WITH_AS(load_csv(bad.string(), "b", {}),
                       doctest::Contains("non-numeric"), std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("standardize centers and scales the fitting split") {
  Labeled circle = gen_circle(200, 0.1, 31);
  Dataset data = circle.data;
  data.feature_names = {"x"};
  const ColumnStats stats = standardize(data, {"x"});
  REQUIRE(stats.cols.size() == 1);
  double mean = 0.0;
  for (int i = 0; i < data.n; ++i) mean += data.x[i];
  mean /= data.n;
  double var = 0.0;
  for (int i = 0; i < data.n; ++i) var += (data.x[i] - mean) * (data.x[i] - mean);
  CHECK(std::abs(mean) < 1e-10);
  CHECK(std::abs(std::sqrt(var / data.n) - 1.0) < 1e-10);
}

TEST_CASE("zero-variance columns are skipped with a warning") {
  Dataset data;
  data.feature_names = {"flat"};
  data.d = 1;
  for (int i = 0; i < 5; ++i) data.add_row(std::vector<double>{3.0}, 1.0);
  const ColumnStats stats = standardize(data, {"flat"});
  CHECK(stats.cols.empty());
  for (int i = 0; i < 5; ++i) CHECK(data.x[i] == 3.0);
}

TEST_CASE("target scaling round-trips") {
  Labeled circle = gen_circle(100, 0.1, 33);
  Dataset data = circle.data;
  const std::vector<double> original = data.y;
  const TargetScaler scaler = scale_target(data);
  for (double y : data.y) {
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
  }
  for (int i = 0; i < data.n; ++i)
    CHECK(scaler.unscale(data.y[i]) == doctest::Approx(original[i]).epsilon(1e-12));
}

TEST_CASE("splits are disjoint and cover the data exactly once") {
  const SplitIndices split = split_indices(100, 0.2, 77);
  CHECK(split.test.size() == 20);
  CHECK(split.train.size() == 80);
  std::set<int> all(split.train.begin(), split.train.end());
  all.insert(split.test.begin(), split.test.end());
  CHECK(all.size() == 100);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 99);
}

TEST_CASE("csv writing round-trips through load_csv") {
  Labeled circle = gen_circle(50, 0.1, 51);
  const auto path = std::filesystem::temp_directory_path() / "modal_rt.csv";
  write_csv(circle.data, path.string(), {"config=0 seed=51"});
  const Dataset back = load_csv(path.string(), "target", {});
  CHECK(back.n == circle.data.n);
  CHECK(back.d == circle.data.d);
  for (int i = 0; i < back.n; ++i) {
    CHECK(back.x[i] == circle.data.x[i]);
    CHECK(back.y[i] == circle.data.y[i]);
  }
  std::filesystem::remove(path);
}
