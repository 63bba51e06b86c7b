#pragma once

#include <cmath>

namespace modal {

// Truncated second-order jet: a scalar together with its first and second
// derivatives with respect to the regression target y. Propagating jets
// through the network forward pass yields f, df/dy and d2f/dy2 in one sweep.
struct Jet2 {
  double v = 0.0;   // value
  double d1 = 0.0;  // d/dy
  double d2 = 0.0;  // d2/dy2
};

// Lifts the differentiation variable itself: (y, 1, 0).
inline Jet2 jet_seed(double y) { return {y, 1.0, 0.0}; }

// Lifts a value that does not depend on y: (c, 0, 0).
inline Jet2 jet_const(double c) { return {c, 0.0, 0.0}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.d1, -a.d2}; }

// Leibniz rule to second order: (ab)'' = a''b + 2a'b' + ab''.
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet2 operator*(double c, const Jet2& a) {
  return {c * a.v, c * a.d1, c * a.d2};
}

inline Jet2 operator*(const Jet2& a, double c) { return c * a; }

inline Jet2& operator+=(Jet2& a, const Jet2& b) {
  a.v += b.v;
  a.d1 += b.d1;
  a.d2 += b.d2;
  return a;
}

// tanh(g(y)): with t = tanh(g), g' and g'' chain as
//   (tanh g)'  = (1 - t^2) g'
//   (tanh g)'' = (1 - t^2) g'' - 2 t (1 - t^2) g'^2
inline Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.v);
  const double s = 1.0 - t * t;
  return {t, s * a.d1, s * a.d2 - 2.0 * t * s * a.d1 * a.d1};
}

// relu as a jet: slope 0 at the kink, curvature 0 everywhere.
inline Jet2 relu(const Jet2& a) {
  const double step = a.v > 0.0 ? 1.0 : 0.0;
  return {step * a.v, step * a.d1, step * a.d2};
}

}  // namespace modal
