#include <cmath>
#include <vector>

#include "doctest.h"
#include "modal/jet.hpp"
#include "modal/rng.hpp"
#include "test_support.hpp"

using modal::Jet2;

TEST_CASE("jet_seed lifts the differentiation variable") {
  for (double y : {0.3, 0.0, -1.7}) {
    const Jet2 j = modal::jet_seed(y);
    CHECK(j.v == y);
    CHECK(j.d1 == 1.0);
    CHECK(j.d2 == 0.0);
  }
}

TEST_CASE("jet_const lifts constants with zero derivatives") {
  for (double c : {5.0, 0.0, -2.5}) {
    const Jet2 j = modal::jet_const(c);
    CHECK(j.v == c);
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
  }
}

TEST_CASE("jet arithmetic follows the stated rules") {
  const Jet2 y2 = modal::jet_seed(2.0) * modal::jet_seed(2.0);  // y^2 at y=2
  CHECK(y2.v == 4.0);
  CHECK(y2.d1 == 4.0);
  CHECK(y2.d2 == 2.0);

  const Jet2 s = Jet2{1, 2, 3} + Jet2{4, 5, 6};
  CHECK(s.v == 5.0);
  CHECK(s.d1 == 7.0);
  CHECK(s.d2 == 9.0);

  const Jet2 sc = 3.0 * Jet2{1, 1, 0};
  CHECK(sc.v == 3.0);
  CHECK(sc.d1 == 3.0);
  CHECK(sc.d2 == 0.0);
}

TEST_CASE("jet multiplication is commutative and bilinear") {
  modal::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Jet2 a{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Jet2 b{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Jet2 c{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Jet2 ab = a * b;
    const Jet2 ba = b * a;
    CHECK(ab.v == ba.v);
    CHECK(ab.d1 == ba.d1);
    // the three d2 terms associate differently, so only rounding differs
    CHECK(ab.d2 == doctest::Approx(ba.d2).epsilon(1e-15));

    const Jet2 lhs = a * (b + c);
    const Jet2 rhs = a * b + a * c;
    CHECK(lhs.v == doctest::Approx(rhs.v).epsilon(1e-12));
    CHECK(lhs.d1 == doctest::Approx(rhs.d1).epsilon(1e-12));
    CHECK(lhs.d2 == doctest::Approx(rhs.d2).epsilon(1e-12));
  }
}

TEST_CASE("jet tanh matches the closed form and finite differences") {
  const Jet2 zero = modal::tanh(modal::jet_seed(0.0));
  CHECK(zero.v == 0.0);
  CHECK(zero.d1 == 1.0);
  CHECK(zero.d2 == 0.0);

  const Jet2 konst = modal::tanh(modal::jet_const(0.0));
  CHECK(konst.v == 0.0);
  CHECK(konst.d1 == 0.0);
  CHECK(konst.d2 == 0.0);

  const Jet2 j = modal::tanh(modal::jet_seed(0.5));
  const double t = std::tanh(0.5);
  CHECK(j.v == doctest::Approx(t).epsilon(1e-15));
  CHECK(j.d1 == doctest::Approx(1.0 - t * t).epsilon(1e-15));
  CHECK(j.d2 == doctest::Approx(-2.0 * t * (1.0 - t * t)).epsilon(1e-15));

  auto f = [](double y) { return std::tanh(y); };
  CHECK(testutil::rel_err(j.d1, testutil::fd1(f, 0.5, 1e-4)) < 1e-4);
  CHECK(testutil::rel_err(j.d2, testutil::fd2(f, 0.5, 1e-4)) < 1e-4);
}

namespace {

// random straight-line programs over the jet ops, evaluated either as jets
// or as plain doubles; the double evaluation feeds the finite-difference
// oracle.
struct Instruction {
  int op;      // 0 add, 1 mul, 2 scale, 3 tanh
  int a, b;    // operand slots
  double c;    // scale factor
};

struct Program {
  std::vector<double> constants;
  std::vector<Instruction> code;

  Jet2 eval_jet(double y) const {
    std::vector<Jet2> slot;
    slot.push_back(modal::jet_seed(y));
    for (double c : constants) slot.push_back(modal::jet_const(c));
    for (const auto& ins : code) {
      switch (ins.op) {
        case 0: slot.push_back(slot[ins.a] + slot[ins.b]); break;
        case 1: slot.push_back(slot[ins.a] * slot[ins.b]); break;
        case 2: slot.push_back(ins.c * slot[ins.a]); break;
        default: slot.push_back(modal::tanh(slot[ins.a])); break;
      }
    }
    return slot.back();
  }

  double eval_plain(double y) const {
    std::vector<double> slot;
    slot.push_back(y);
    for (double c : constants) slot.push_back(c);
    for (const auto& ins : code) {
      switch (ins.op) {
        case 0: slot.push_back(slot[ins.a] + slot[ins.b]); break;
        case 1: slot.push_back(slot[ins.a] * slot[ins.b]); break;
        case 2: slot.push_back(ins.c * slot[ins.a]); break;
        default: slot.push_back(std::tanh(slot[ins.a])); break;
      }
    }
    return slot.back();
  }
};

Program random_program(modal::Rng& rng) {
  Program prog;
  prog.constants = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
  int slots = 3;
  const int len = 3 + static_cast<int>(rng.integer(8));
  for (int i = 0; i < len; ++i) {
    Instruction ins;
    ins.op = static_cast<int>(rng.integer(4));
    ins.a = static_cast<int>(rng.integer(slots));
    ins.b = static_cast<int>(rng.integer(slots));
    ins.c = rng.uniform(-1.5, 1.5);
    prog.code.push_back(ins);
    ++slots;
  }
  return prog;
}

}  // namespace

TEST_CASE("random jet compositions match finite differences") {
  modal::Rng rng(11);
  int checked = 0;
  int attempts = 0;
  while (checked < 100) {
    REQUIRE(++attempts < 10000);
    const Program prog = random_program(rng);
    const double y = rng.uniform(-1.0, 1.0);
    const Jet2 jet = prog.eval_jet(y);
    auto f = [&](double t) { return prog.eval_plain(t); };

    // skip cases where the FD oracle itself is dominated by roundoff
    const double d1 = testutil::fd1(f, y, 1e-3);
    const double d2 = testutil::fd2(f, y, 1e-4);
    const double fmax =
        std::max({std::abs(f(y - 1e-4)), std::abs(f(y)), std::abs(f(y + 1e-4))});
    const double d2_noise = 4.0 * 2.3e-16 * std::max(fmax, 1.0) / 1e-8;
    if (std::abs(d1) < 1e-5 || std::abs(d2) < std::max(1e-3, 1e4 * d2_noise))
      continue;

    CHECK(jet.v == doctest::Approx(f(y)).epsilon(1e-12));
    CHECK(testutil::rel_err(jet.d1, d1) < 1e-4);
    CHECK(testutil::rel_err(jet.d2, d2) < 1e-4);
    CHECK(std::isfinite(jet.v));
    CHECK(std::isfinite(jet.d1));
    CHECK(std::isfinite(jet.d2));
    ++checked;
  }
}

TEST_CASE("lifted constants reproduce plain arithmetic exactly") {
  modal::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    const Jet2 j = modal::tanh(modal::jet_const(a) * modal::jet_const(b) +
                               modal::jet_const(a));
    CHECK(j.v == std::tanh(a * b + a));
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
  }
}
