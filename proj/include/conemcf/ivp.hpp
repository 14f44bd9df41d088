#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "conemcf/errors.hpp"

namespace conemcf {

// Adaptive Dormand-Prince RK5(4) with FSAL, cubic-Hermite dense output and
// terminal event location by bisection on the interpolant. Integrates in
// either direction (t1 < t0 allowed). Optional forced nodes are hit exactly,
// which is how profiles get sampled onto uniform grids at integrator accuracy.

template <std::size_t D>
using IvpState = std::array<double, D>;

struct IvpOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 -> span/1000
  std::size_t max_steps = 4000000;
  double event_tol = 1e-12;  // |t| tolerance for event location
  bool store_trajectory = true;
};

template <std::size_t D>
struct IvpEvent {
  std::function<double(double, const IvpState<D>&)> g;
  int direction = 0;  // +1 only -..+ crossings, -1 only +..-, 0 any
};

template <std::size_t D>
struct IvpSolution {
  std::vector<double> t;            // nodes in integration order
  std::vector<IvpState<D>> y;       // states at nodes
  std::vector<IvpState<D>> dy;      // f(t,y) at nodes
  int stopped_event = -1;           // index of the event that terminated, -1 if none
  bool reached_end = false;
  std::size_t steps = 0;

  double t_end() const { return t.back(); }
  const IvpState<D>& y_end() const { return y.back(); }
  const IvpState<D>& dy_end() const { return dy.back(); }
};

namespace detail {

template <std::size_t D>
inline IvpState<D> hermite_state(const IvpState<D>& y0, const IvpState<D>& f0,
                                 const IvpState<D>& y1, const IvpState<D>& f1, double h,
                                 double tau) {
  const double t2 = tau * tau, t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  IvpState<D> out;
  for (std::size_t i = 0; i < D; ++i)
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

}  // namespace detail

template <std::size_t D, class Rhs>
IvpSolution<D> integrate_ivp_system(Rhs&& rhs, double t0, double t1, IvpState<D> y0,
                                    const IvpOptions& opts = {},
                                    std::span<const IvpEvent<D>> events = {},
                                    std::span<const double> forced_nodes = {}) {
  // Dormand-Prince coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const double span = t1 - t0;
  const double dir = span >= 0 ? 1.0 : -1.0;
  IvpSolution<D> sol;
  sol.t.push_back(t0);
  sol.y.push_back(y0);
  IvpState<D> k1 = rhs(t0, y0);
  sol.dy.push_back(k1);
  if (span == 0.0) {
    sol.reached_end = true;
    return sol;
  }

  double t = t0;
  IvpState<D> y = y0;
  double h = opts.h_init != 0.0 ? std::abs(opts.h_init) : std::abs(span) / 1000.0;
  const double h_floor = std::abs(span) * 1e-15 + 1e-300;
  std::size_t next_forced = 0;

  auto eval_events_at = [&](double tq, const IvpState<D>& yq, std::size_t i) {
    return events[i].g(tq, yq);
  };

  std::vector<double> gprev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) gprev[i] = eval_events_at(t, y, i);

  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    if (dir * (t1 - t) <= std::abs(t1) * 1e-16 + 1e-300) {
      sol.reached_end = true;
      return sol;
    }
    // Cap the step at the interval end and at the next forced node.
    double h_cap = dir * (t1 - t);
    while (next_forced < forced_nodes.size() &&
           dir * (forced_nodes[next_forced] - t) <= h_floor)
      ++next_forced;
    if (next_forced < forced_nodes.size())
      h_cap = std::min(h_cap, dir * (forced_nodes[next_forced] - t));
    if (h > h_cap) h = h_cap;

    const double hs = dir * h;  // signed step

    IvpState<D> k2, k3, k4, k5, k6, k7, y1s, yerr;
    auto axpy = [&](const std::array<const IvpState<D>*, 6>& ks,
                    const std::array<double, 6>& cs, int n) {
      IvpState<D> r;
      for (std::size_t i = 0; i < D; ++i) {
        double acc = y[i];
        for (int j = 0; j < n; ++j) acc += hs * cs[j] * (*ks[j])[i];
        r[i] = acc;
      }
      return r;
    };
    k2 = rhs(t + c2 * hs, axpy({&k1}, {a21}, 1));
    k3 = rhs(t + c3 * hs, axpy({&k1, &k2}, {a31, a32}, 2));
    k4 = rhs(t + c4 * hs, axpy({&k1, &k2, &k3}, {a41, a42, a43}, 3));
    k5 = rhs(t + c5 * hs, axpy({&k1, &k2, &k3, &k4}, {a51, a52, a53, a54}, 4));
    k6 = rhs(t + hs, axpy({&k1, &k2, &k3, &k4, &k5}, {a61, a62, a63, a64, a65}, 5));
    for (std::size_t i = 0; i < D; ++i)
      y1s[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(t + hs, y1s);
    for (std::size_t i = 0; i < D; ++i)
      yerr[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < D; ++i) {
      if (!std::isfinite(y1s[i])) finite = false;
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y1s[i]));
      const double e = yerr[i] / sc;
      err += e * e;
    }
    err = std::sqrt(err / D);

    if (!finite || err > 1.0) {
      const double fac = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      if (h < h_floor)
        throw StepFailure("adaptive integrator cannot meet tolerance (step underflow)");
      continue;
    }

    // Accepted. Look for the earliest event crossing inside [t, t+hs].
    int hit = -1;
    double tau_hit = 2.0;
    IvpState<D> y_hit{};
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double g0 = gprev[i];
      const double g1 = eval_events_at(t + hs, y1s, i);
      const bool crosses = (g0 < 0 && g1 >= 0 && events[i].direction >= 0) ||
                           (g0 > 0 && g1 <= 0 && events[i].direction <= 0);
      if (!crosses) {
        gprev[i] = g1;
        continue;
      }
      double lo = 0.0, hi = 1.0;
      IvpState<D> ymid{};
      while ((hi - lo) * std::abs(hs) > opts.event_tol) {
        const double mid = 0.5 * (lo + hi);
        ymid = detail::hermite_state<D>(y, k1, y1s, k7, hs, mid);
        const double gm = eval_events_at(t + mid * hs, ymid, i);
        const bool same_side_as_g0 = (g0 < 0) ? (gm < 0) : (gm > 0);
        if (same_side_as_g0)
          lo = mid;
        else
          hi = mid;
      }
      const double tau = hi;
      if (tau < tau_hit) {
        tau_hit = tau;
        hit = static_cast<int>(i);
        y_hit = detail::hermite_state<D>(y, k1, y1s, k7, hs, tau);
      }
      gprev[i] = g1;
    }

    if (hit >= 0) {
      const double t_ev = t + tau_hit * hs;
      sol.t.push_back(t_ev);
      sol.y.push_back(y_hit);
      sol.dy.push_back(rhs(t_ev, y_hit));
      sol.stopped_event = hit;
      sol.steps = step + 1;
      return sol;
    }

    t += hs;
    y = y1s;
    k1 = k7;  // FSAL
    if (opts.store_trajectory) {
      sol.t.push_back(t);
      sol.y.push_back(y);
      sol.dy.push_back(k1);
    } else {
      sol.t.back() = t;
      sol.y.back() = y;
      sol.dy.back() = k1;
    }
    sol.steps = step + 1;

    const double fac = err > 1e-12 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    h = std::max(h * fac, h_floor);
  }
  throw StepFailure("adaptive integrator exceeded max step count");
}

}  // namespace conemcf
