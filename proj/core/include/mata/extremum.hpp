#pragma once

#include <cmath>

namespace mata {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section minimization of a unimodal f on [lo, hi], stopping once the
/// bracket is narrower than `width`.
template <class F>
GoldenResult golden_section_minimize(F&& f, double lo, double hi, double width) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  int evaluations = 2;
  while (hi - lo > width) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++evaluations;
  }
  return fc < fd ? GoldenResult{c, fc, evaluations} : GoldenResult{d, fd, evaluations};
}

}  // namespace mata
