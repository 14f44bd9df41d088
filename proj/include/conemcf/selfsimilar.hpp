#pragma once

#include <cmath>

#include "conemcf/compare.hpp"
#include "conemcf/profile.hpp"

namespace conemcf {

// u(r,t) = R(t) * Phi(r/R(t)) with R(t) = sqrt(2P(t + time_shift)): an exact
// solution of the constant-angle flow whose graph meets y = r at r = R(t).
struct SelfSimilarSolution {
  SelfSimilarProfile profile;
  double time_shift = 0;  // t0 in u(r, t + t0)

  double radius(double t) const { return std::sqrt(2.0 * profile.P * (t + time_shift)); }

  // Value via monotone cubic interpolation of the profile grid; r/R must lie
  // within the stored range [0, 1+a].
  double eval(double r, double t) const;
  double slope_r(double r, double t) const;  // u_r = Phi'(z)
  double dt(double r, double t) const;       // u_t = (P/R)(Phi - z Phi')

  // Like eval but linearly continued past the stored extension (flagged by
  // the caller-visible z_max()); used for gap bookkeeping only.
  double eval_extended(double r, double t) const;

  // Sampled graph on [0, R(t)] with m+1 uniform nodes.
  OrderedGraph graph(double t, int m) const;
};

}  // namespace conemcf
