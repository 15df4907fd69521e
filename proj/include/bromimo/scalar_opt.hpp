#pragma once

#include <cmath>
#include <utility>

namespace bromimo {

struct ScalarOpt {
  double x;
  double value;
};

// Golden-section minimization of a unimodal function on [lo, hi].
// rel_tol is relative on the argument.
template <typename F>
ScalarOpt golden_min(F&& f, double lo, double hi, double rel_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500; ++it) {
    if ((b - a) <= rel_tol * 0.5 * (std::abs(a) + std::abs(b)) + 1e-300) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = f(d);
    }
  }
  return (fc < fd) ? ScalarOpt{c, fc} : ScalarOpt{d, fd};
}

template <typename F>
ScalarOpt golden_max(F&& f, double lo, double hi, double rel_tol) {
  auto r = golden_min([&](double x) { return -f(x); }, lo, hi, rel_tol);
  return {r.x, -r.value};
}

}  // namespace bromimo
