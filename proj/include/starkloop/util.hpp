#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "starkloop/types.hpp"

namespace starkloop {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  auto exps = linspace(std::log10(lo), std::log10(hi), n);
  for (auto& e : exps) e = std::pow(10.0, e);
  return exps;
}

// Wraps an angle to (-pi, pi].
inline double wrap_to_pi(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

// Derivative-free scalar minimization; returns the midpoint of the final
// bracket once its width drops below tol.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
// written by index; the call blocks until all workers finish.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace starkloop
