#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "conemcf/errors.hpp"

namespace conemcf {

// Piecewise cubic Hermite interpolation with caller-supplied derivatives.
// Nodes must be strictly increasing. With exact derivative data of a smooth
// function the interpolant is O(h^4) accurate and keeps the monotonicity of
// well-resolved monotone data.

namespace detail {
inline std::size_t bracket_index(std::span<const double> x, double q) {
  assert(x.size() >= 2);
  if (q <= x.front()) return 0;
  if (q >= x[x.size() - 2]) return x.size() - 2;
  auto it = std::upper_bound(x.begin(), x.end(), q);
  return static_cast<std::size_t>(it - x.begin()) - 1;
}
}  // namespace detail

inline double hermite_eval(std::span<const double> x, std::span<const double> y,
                           std::span<const double> yp, double q) {
  const std::size_t i = detail::bracket_index(x, q);
  const double h = x[i + 1] - x[i];
  const double t = (q - x[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y[i] + h10 * h * yp[i] + h01 * y[i + 1] + h11 * h * yp[i + 1];
}

inline double hermite_eval_deriv(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> yp, double q) {
  const std::size_t i = detail::bracket_index(x, q);
  const double h = x[i + 1] - x[i];
  const double t = (q - x[i]) / h;
  const double t2 = t * t;
  const double d00 = (6 * t2 - 6 * t) / h;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h;
  const double d11 = 3 * t2 - 2 * t;
  return d00 * y[i] + d10 * yp[i] + d01 * y[i + 1] + d11 * yp[i + 1];
}

inline double linear_eval(std::span<const double> x, std::span<const double> y, double q) {
  const std::size_t i = detail::bracket_index(x, q);
  const double t = (q - x[i]) / (x[i + 1] - x[i]);
  return (1 - t) * y[i] + t * y[i + 1];
}

}  // namespace conemcf
