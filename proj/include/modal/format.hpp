#pragma once

#include <cstdio>
#include <string>

namespace modal {

// Shortest decimal that round-trips the exact double; keeps CSV output
// byte-stable across runs.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = 0.0;
  for (int prec = 1; prec <= 16; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.*g", prec, v);
    std::sscanf(tmp, "%lf", &parsed);
    if (parsed == v) return tmp;
  }
  return buf;
}

}  // namespace modal
