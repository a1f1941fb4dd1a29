#pragma once

// Discrete Poincare lemma: given (f1, f2) with d1 f2 = d2 f1, recover theta
// with d_i theta = f_i by trapezoidal integration along the sweep tree.

#include "surfrec/gridfield.hpp"
#include "surfrec/sweep.hpp"

namespace surfrec {

/// d1 f2 - d2 f1 with the standard difference operators.
template <typename T>
GridField<T> curl_residual(const GridField<T>& f1, const GridField<T>& f2) {
  require_same_grid(f1.spec(), f2.spec(), "curl_residual");
  return partial(f2, Axis::x) - partial(f1, Axis::y);
}

template <typename T>
struct PotentialResult {
  GridField<T> theta;
  /// Discrete L2 norm of the curl residual over the whole grid. Reported,
  /// never used as a gate.
  double curl_residual_l2 = 0.0;
  GridIndex base;
  T base_value;
};

template <typename T>
PotentialResult<T> integrate_potential(const GridField<T>& f1, const GridField<T>& f2, GridIndex base,
                                       const T& base_value, int threads = 1) {
  require_same_grid(f1.spec(), f2.spec(), "integrate_potential");
  if (!f1.spec().contains(base)) throw ValidationError("integrate_potential: base node outside the grid");
  PotentialResult<T> out{GridField<T>(f1.spec()), norm_l2(curl_residual(f1, f2)), base, base_value};
  out.theta[base] = base_value;
  sweep_tree(out.theta, base, threads, [&](const T& prev, const SweepEdge& e) -> T {
    const GridField<T>& f = e.axis == Axis::x ? f1 : f2;
    return T(prev + (0.5 * e.step) * (f[e.from] + f[e.to]));
  });
  return out;
}

}  // namespace surfrec
