#include "conemcf/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace conemcf {

double AdmissibleInitial::max_slope() const {
  double m = 0;
  for (double s : up) m = std::max(m, std::abs(s));
  return m;
}

void AdmissibleInitial::validate(const AngleFunction& angle) const {
  if (!(xi0 > 0)) throw SolverError("initial data: xi0 must be positive");
  if (r.size() < 3 || r.size() != u.size() || r.size() != up.size())
    throw SolverError("initial data: inconsistent arrays");
  if (std::abs(r.front()) > 1e-14 || std::abs(r.back() - xi0) > 1e-12 * xi0)
    throw SolverError("initial data: grid must span [0, xi0]");
  for (double v : u)
    if (!(v > 0)) throw SolverError("initial data: u0 must be positive");
  if (std::abs(u.back() - xi0) > 1e-9 * std::max(1.0, xi0))
    throw SolverError("initial data: u0(xi0) != xi0");
  if (std::abs(up.front()) > 1e-9) throw SolverError("initial data: u0'(0) != 0");
  const double k_xi = angle(xi0);
  if (std::abs(up.back() - k_xi) > 1e-7)
    throw SolverError("initial data: u0'(xi0) != k(xi0)");
  for (double s : up) {
    if (!(std::abs(s) < 1.0)) throw SolverError("initial data: |u0'| must be < 1");
    if (s < -1e-12) throw SolverError("initial data: u0' must be >= 0");
  }
}

void SolverConfig::validate() const {
  if (dim < 1) throw SolverError("solver config: dimension must be >= 1");
  if (M < 16) throw SolverError("solver config: M must be >= 16");
  if (!(dt_init >= 0) || !(dt_max > 0) || !(dt_min > 0))
    throw SolverError("solver config: time steps must be positive");
}

void DiagnosticRecord::merge(const DiagnosticRecord& o) {
  max_abs_ur = std::max(max_abs_ur, o.max_abs_ur);
  min_ur = std::min(min_ur, o.min_ur);
  min_diffusion = std::min(min_diffusion, o.min_diffusion);
  min_floor_ratio = std::min(min_floor_ratio, o.min_floor_ratio);
  gradient_bound = std::max(gradient_bound, o.gradient_bound);
  steps += o.steps;
  rejects += o.rejects;
}

std::vector<double> to_transformed(const AdmissibleInitial& init, int M, double tol) {
  if (M < 2) throw SolverError("to_transformed: M too small");
  if (!(init.max_slope() < 1.0))
    throw InversionFailure("to_transformed: |u_r| >= 1, zeta = r/u not invertible");
  std::vector<double> v(M + 1);
  v[0] = init.u.front();
  for (int i = 1; i < M; ++i) {
    const double s = static_cast<double>(i) / M;
    // r - s*u(r) is strictly increasing in r on [0, xi0].
    double lo = 0.0, hi = init.xi0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = mid - s * init.value(mid);
      (f < 0 ? lo : hi) = mid;
      if (hi - lo < tol * std::max(1.0, init.xi0)) break;
    }
    v[i] = init.value(0.5 * (lo + hi));
  }
  v[M] = init.xi0;
  return v;
}

namespace {

// Radial derivative of v on the uniform zeta grid; one-sided second order at
// the contact node, symmetric zero at the axis.
std::vector<double> zeta_derivative(const std::vector<double>& v) {
  const int M = static_cast<int>(v.size()) - 1;
  const double h = 1.0 / M;
  std::vector<double> w(M + 1);
  w[0] = 0.0;
  for (int i = 1; i < M; ++i) w[i] = (v[i + 1] - v[i - 1]) / (2 * h);
  w[M] = (3 * v[M] - 4 * v[M - 1] + v[M - 2]) / (2 * h);
  return w;
}

// u_r reconstructed from the transformed unknown: Du = Dv/(v + zeta Dv).
double slope_from_transformed(double s, double v, double w) {
  return w / (v + s * w);
}

void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                  std::vector<double>& d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

struct StepChecks {
  double max_abs_ur;
  double min_ur;
};

StepChecks transformed_slopes(const std::vector<double>& v) {
  const int M = static_cast<int>(v.size()) - 1;
  const auto w = zeta_derivative(v);
  StepChecks ck{0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= M; ++i) {
    const double s = static_cast<double>(i) / M;
    const double ur = slope_from_transformed(s, v[i], w[i]);
    ck.max_abs_ur = std::max(ck.max_abs_ur, std::abs(ur));
    ck.min_ur = std::min(ck.min_ur, ur);
  }
  return ck;
}

}  // namespace

OrderedGraph from_transformed(const FlowState& state) {
  const int M = state.intervals();
  const auto w = zeta_derivative(state.v);
  OrderedGraph g;
  g.r.reserve(M + 1);
  g.w.reserve(M + 1);
  g.wp.reserve(M + 1);
  for (int i = 0; i <= M; ++i) {
    const double s = static_cast<double>(i) / M;
    g.r.push_back(s * state.v[i]);
    g.w.push_back(state.v[i]);
    g.wp.push_back(slope_from_transformed(s, state.v[i], w[i]));
  }
  return g;
}

RadialCoefficients radial_coefficients(double zeta, double v, double v_zeta, int dim) {
  if (!(v > 0)) throw ParabolicityLoss("radial_coefficients: v must be positive");
  const double q = v + zeta * v_zeta;
  const double denom = q * q + v_zeta * v_zeta;
  RadialCoefficients rc;
  rc.diffusion = 1.0 / denom;
  rc.angular = (dim - 1) / (v * v);
  rc.source = -2.0 * v_zeta * v_zeta * rc.diffusion / v;
  if (!(rc.diffusion > 0))
    throw ParabolicityLoss("radial_coefficients: diffusion coefficient not positive");
  return rc;
}

double boundary_target(double k) {
  if (!(k < 1)) throw SolverError("boundary_target: pole at k = 1");
  return (1 + k) / (1 - k);
}

double boundary_residual(double v1, double v_zeta1, const AngleFunction& angle) {
  const double k = angle(v1);
  return (2 * v_zeta1 + v1) / v1 - boundary_target(k);
}

FlowState step(const FlowState& state, const SolverConfig& cfg, const AngleFunction& angle,
               double dt, DiagnosticRecord* diag) {
  if (dt == 0.0) return state;
  if (!(dt > 0)) throw SolverError("step: dt must be >= 0");
  const int M = state.intervals();
  const int N = cfg.dim;
  const double h = 1.0 / M;
  const auto& v = state.v;
  const auto w = zeta_derivative(v);

  std::vector<double> a(M + 1, 0), b(M + 1, 0), c(M + 1, 0), d(M + 1, 0);
  double min_diff = std::numeric_limits<double>::infinity();
  double min_floor_ratio = std::numeric_limits<double>::infinity();
  const double G = diag ? diag->gradient_bound : 0;

  for (int i = 0; i <= M; ++i) {
    const double s = static_cast<double>(i) / M;
    const auto rc = radial_coefficients(s, v[i], w[i], N);
    min_diff = std::min(min_diff, rc.diffusion);
    if (G > 0 && G < 1) {
      const double floor = (1 - G) * (1 - G) / ((1 + G * G) * v[i] * v[i]);
      min_floor_ratio = std::min(min_floor_ratio, rc.diffusion / floor);
    }
    if (i == 0) {
      // Symmetry closure: the angular term's limit makes the operator
      // N * diffusion * v_ss, with the ghost node v[-1] = v[1].
      const double A = rc.diffusion * N;
      b[0] = 1 + dt * 2 * A / (h * h);
      c[0] = -dt * 2 * A / (h * h);
      d[0] = v[0];
    } else if (i < M) {
      const double A = rc.diffusion;
      const double B = rc.angular / s;  // coefficient of v_s
      a[i] = -dt * (A / (h * h) - B / (2 * h));
      b[i] = 1 + dt * 2 * A / (h * h);
      c[i] = -dt * (A / (h * h) + B / (2 * h));
      d[i] = v[i] + dt * rc.source;
    } else {
      // Contact row: ghost from the discrete oblique condition
      // v_s(1) = beta * v(1), beta = k/(1-k) frozen at the current state.
      const double k = angle(v[M]);
      const double beta = k / (1 - k);
      const double A = rc.diffusion;
      const double B = rc.angular;  // s = 1
      a[M] = -dt * 2 * A / (h * h);
      b[M] = 1 + dt * (2 * A / (h * h) - 2 * A * beta / h - B * beta);
      d[M] = v[M] + dt * rc.source;
    }
  }

  thomas_solve(a, b, c, d);
  FlowState next;
  next.t = state.t + dt;
  next.v = std::move(d);

  char buf[160];
  for (double val : next.v)
    if (!(val > 0) || !std::isfinite(val)) {
      std::snprintf(buf, sizeof buf, "step rejected at t=%.6g: positivity lost", state.t);
      throw StepRejected(buf);
    }
  const auto ck = transformed_slopes(next.v);
  if (G > 0 && ck.max_abs_ur > G + cfg.grad_slack) {
    std::snprintf(buf, sizeof buf, "step rejected at t=%.6g: |u_r|=%.4g exceeds bound %.4g",
                  state.t, ck.max_abs_ur, G + cfg.grad_slack);
    throw StepRejected(buf);
  }
  if (cfg.enforce_monotone && ck.min_ur < -cfg.grad_slack) {
    std::snprintf(buf, sizeof buf, "step rejected at t=%.6g: u_r=%.4g went negative", state.t,
                  ck.min_ur);
    throw StepRejected(buf);
  }

  if (diag) {
    diag->max_abs_ur = std::max(diag->max_abs_ur, ck.max_abs_ur);
    diag->min_ur = std::min(diag->min_ur, ck.min_ur);
    diag->min_diffusion = std::min(diag->min_diffusion, min_diff);
    diag->min_floor_ratio = std::min(diag->min_floor_ratio, min_floor_ratio);
    diag->steps += 1;
  }
  return next;
}

namespace {

struct OutputCursor {
  std::vector<double> times;
  std::size_t next = 0;

  explicit OutputCursor(std::span<const double> ts, double t_end) {
    times.assign(ts.begin(), ts.end());
    if (times.empty()) times.push_back(t_end);
    std::sort(times.begin(), times.end());
    if (times.back() < t_end - 1e-12) times.push_back(t_end);
  }
  bool due(double t) const {
    return next < times.size() && t >= times[next] - 1e-12 * std::max(1.0, times[next]);
  }
  double horizon() const {
    return next < times.size() ? times[next] : std::numeric_limits<double>::infinity();
  }
};

}  // namespace

EvolveResult evolve(const AdmissibleInitial& init, const AngleFunction& angle,
                    const SolverConfig& cfg, double t_end,
                    std::span<const double> output_times) {
  cfg.validate();
  init.validate(angle);
  if (!(t_end >= 0)) throw SolverError("evolve: t_end must be >= 0");

  EvolveResult res;
  res.diag.gradient_bound = std::max(init.max_slope(), angle.ksup());

  FlowState state;
  state.t = 0;
  state.v = to_transformed(init, cfg.M, cfg.inversion_tol);

  const double move_cap = angle.period() > 0
                              ? angle.period() * cfg.boundary_move_frac
                              : std::numeric_limits<double>::infinity();

  OutputCursor out(output_times, t_end);
  auto record = [&](const FlowState& s) {
    res.times.push_back(s.t);
    res.states.push_back(s);
    res.graphs.push_back(from_transformed(s));
  };
  while (out.due(state.t)) {
    record(state);
    ++out.next;
  }

  double dt = cfg.adaptive ? std::min(cfg.dt_init, cfg.dt_max) : cfg.dt_init;
  int streak = 0;
  while (state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double stop = std::min(out.horizon(), t_end);
    const double dt_eff = std::min(dt, stop - state.t);
    FlowState next;
    try {
      next = step(state, cfg, angle, dt_eff, &res.diag);
    } catch (const StepRejected&) {
      if (!cfg.adaptive) throw;
      res.diag.rejects += 1;
      dt = dt_eff / 2;
      streak = 0;
      if (dt < cfg.dt_min) throw;
      continue;
    }
    if (cfg.adaptive && std::abs(next.v.back() - state.v.back()) > move_cap) {
      res.diag.rejects += 1;
      dt = dt_eff / 2;
      streak = 0;
      if (dt < cfg.dt_min)
        throw StepRejected("evolve: boundary movement cap unreachable at dt_min");
      continue;
    }
    state = std::move(next);
    if (cfg.adaptive && ++streak >= cfg.grow_after) {
      dt = std::min(dt * cfg.grow, cfg.dt_max);
      streak = 0;
    }
    while (out.due(state.t)) {
      record(state);
      ++out.next;
    }
  }
  if (res.times.empty() || res.times.back() < state.t - 1e-12) record(state);
  return res;
}

EvolveResult solve_direct(const AdmissibleInitial& init, const AngleFunction& angle,
                          const SolverConfig& cfg, double t_end,
                          std::span<const double> output_times) {
  cfg.validate();
  init.validate(angle);
  if (!(t_end >= 0)) throw SolverError("solve_direct: t_end must be >= 0");

  const int M = cfg.M;
  const int N = cfg.dim;
  const double h = 1.0 / M;

  EvolveResult res;
  res.diag.gradient_bound = std::max(init.max_slope(), angle.ksup());
  const double G = res.diag.gradient_bound;

  // Front-fixing unknowns: y_i = u(s_i * xi(t), t) and the front xi(t).
  std::vector<double> y(M + 1);
  double xi = init.xi0;
  for (int i = 0; i <= M; ++i) y[i] = init.value(static_cast<double>(i) / M * xi);
  y[M] = xi;

  // Front speed bootstrap from xi' = u_t(xi)/(1 - u_r(xi)).
  double xi_rate;
  {
    const double k = angle(xi);
    const std::size_t m = init.r.size() - 1;
    const double hr = init.r[1] - init.r[0];
    const double urr =
        (3 * init.up[m] - 4 * init.up[m - 1] + init.up[m - 2]) / (2 * hr);
    xi_rate = (urr / (1 + k * k) + (N - 1) * k / xi) / (1 - k);
  }

  double t = 0;
  auto make_graph = [&]() {
    OrderedGraph g;
    g.r.reserve(M + 1);
    g.w.reserve(M + 1);
    g.wp.reserve(M + 1);
    std::vector<double> ys(M + 1);
    ys[0] = 0;
    for (int i = 1; i < M; ++i) ys[i] = (y[i + 1] - y[i - 1]) / (2 * h);
    ys[M] = (3 * y[M] - 4 * y[M - 1] + y[M - 2]) / (2 * h);
    for (int i = 0; i <= M; ++i) {
      g.r.push_back(static_cast<double>(i) / M * xi);
      g.w.push_back(y[i]);
      g.wp.push_back(ys[i] / xi);
    }
    return g;
  };
  auto record = [&]() {
    res.times.push_back(t);
    res.graphs.push_back(make_graph());
  };

  OutputCursor out(output_times, t_end);
  while (out.due(t)) {
    record();
    ++out.next;
  }

  double dt = cfg.adaptive ? std::min(cfg.dt_init, cfg.dt_max) : cfg.dt_init;
  const double move_cap = angle.period() > 0
                              ? angle.period() * cfg.boundary_move_frac
                              : std::numeric_limits<double>::infinity();
  int streak = 0;
  std::vector<double> a(M + 1), b(M + 1), c(M + 1), d(M + 1);

  while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double stop = std::min(out.horizon(), t_end);
    const double dt_eff = std::min(dt, stop - t);
    if (dt_eff <= 0) break;

    const double gamma = xi * angle(xi);  // y_s(1) = xi * k(xi), lagged
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(c.begin(), c.end(), 0.0);
    for (int i = 0; i <= M; ++i) {
      if (i == 0) {
        const double alpha = 1.0 / (xi * xi);
        b[0] = 1 + dt_eff * 2 * N * alpha / (h * h);
        c[0] = -dt_eff * 2 * N * alpha / (h * h);
        d[0] = y[0];
      } else {
        const double s = static_cast<double>(i) / M;
        const double ys_i = i < M ? (y[i + 1] - y[i - 1]) / (2 * h)
                                  : (3 * y[M] - 4 * y[M - 1] + y[M - 2]) / (2 * h);
        const double ur = ys_i / xi;
        const double alpha = 1.0 / (xi * xi * (1 + ur * ur));
        const double drift = (N - 1) / (s * xi * xi) + s * xi_rate / xi;
        if (i < M) {
          a[i] = -dt_eff * (alpha / (h * h) - drift / (2 * h));
          b[i] = 1 + dt_eff * 2 * alpha / (h * h);
          c[i] = -dt_eff * (alpha / (h * h) + drift / (2 * h));
          d[i] = y[i];
        } else {
          // Ghost y[M+1] = y[M-1] + 2 h gamma; the known gamma parts land on
          // the right side.
          a[M] = -dt_eff * 2 * alpha / (h * h);
          b[M] = 1 + dt_eff * 2 * alpha / (h * h);
          d[M] = y[M] + dt_eff * (alpha * 2 * gamma / h + drift * gamma);
        }
      }
    }
    thomas_solve(a, b, c, d);

    bool ok = true;
    double max_ur = 0, min_ur = std::numeric_limits<double>::infinity();
    for (double val : d)
      if (!(val > 0) || !std::isfinite(val)) ok = false;
    double xi_new = ok ? d[M] : xi;
    if (ok) {
      for (int i = 0; i <= M; ++i) {
        const double ys_i = i == 0 ? 0.0
                            : i < M ? (d[i + 1] - d[i - 1]) / (2 * h)
                                    : (3 * d[M] - 4 * d[M - 1] + d[M - 2]) / (2 * h);
        const double ur = ys_i / xi_new;
        max_ur = std::max(max_ur, std::abs(ur));
        min_ur = std::min(min_ur, ur);
      }
      if (max_ur > G + cfg.grad_slack) ok = false;
      if (cfg.enforce_monotone && min_ur < -cfg.grad_slack) ok = false;
      if (std::abs(xi_new - xi) > move_cap) ok = false;
    }
    if (!ok) {
      if (!cfg.adaptive) throw StepRejected("solve_direct: step rejected in fixed-dt mode");
      res.diag.rejects += 1;
      dt = dt_eff / 2;
      streak = 0;
      if (dt < cfg.dt_min) throw StepRejected("solve_direct: dt underflow");
      continue;
    }

    xi_rate = (xi_new - xi) / dt_eff;
    xi = xi_new;
    y = d;
    t += dt_eff;
    res.diag.steps += 1;
    res.diag.max_abs_ur = std::max(res.diag.max_abs_ur, max_ur);
    res.diag.min_ur = std::min(res.diag.min_ur, min_ur);
    if (cfg.adaptive && ++streak >= cfg.grow_after) {
      dt = std::min(dt * cfg.grow, cfg.dt_max);
      streak = 0;
    }
    while (out.due(t)) {
      record();
      ++out.next;
    }
  }
  if (res.times.empty() || res.times.back() < t - 1e-12) record();
  return res;
}

AdmissibleInitial make_selfsimilar_initial(const SelfSimilarSolution& lower,
                                           const AngleFunction& angle, int m_nodes,
                                           double collar) {
  if (m_nodes < 8) throw SolverError("make_selfsimilar_initial: too few nodes");
  const double R0 = lower.radius(0);
  if (!(R0 > 0)) throw SolverError("make_selfsimilar_initial: degenerate start radius");
  if (!(collar > 0 && collar < R0))
    collar = 0.25 * R0;  // fall back to a quarter-radius collar

  const double xiL = R0 - collar;
  auto eta = [&](double r) {
    const double x = (r - xiL) / collar;
    return x > 0 ? x * x * x : 0.0;
  };
  auto eta_p = [&](double r) {
    const double x = (r - xiL) / collar;
    return x > 0 ? 3 * x * x / collar : 0.0;
  };

  const double r_max = 0.999 * lower.profile.z_max() * R0;
  auto crossing = [&](double c) {
    // Solve U(r,0) + c eta(r) = r for r >= R0.
    double lo = R0, hi = R0;
    double f_hi = c * eta(R0);  // value of U + c*eta - r at R0
    double width = 0.05 * collar;
    while (f_hi >= 0) {
      hi = std::min(lo + width, r_max);
      f_hi = lower.eval(hi, 0) + c * eta(hi) - hi;
      if (hi >= r_max && f_hi >= 0)
        throw SolverError("make_selfsimilar_initial: contact correction left the profile range");
      if (f_hi >= 0) width *= 2;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = lower.eval(mid, 0) + c * eta(mid) - mid;
      (f >= 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto slope_gap = [&](double c) {
    const double xi_c = crossing(c);
    return lower.slope_r(xi_c, 0) + c * eta_p(xi_c) - angle(xi_c);
  };

  double c_star = 0;
  const double g0 = slope_gap(0);
  if (g0 > 1e-12)
    throw SolverError("make_selfsimilar_initial: angle below the profile slope at contact");
  if (g0 < -1e-14) {
    double c_hi = 0.25 * collar * (angle.ksup() - lower.profile.slope) + 1e-9;
    int guard = 0;
    while (slope_gap(c_hi) < 0) {
      c_hi *= 2;
      if (++guard > 60)
        throw SolverError("make_selfsimilar_initial: could not bracket the collar correction");
    }
    double lo = 0, hi = c_hi;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope_gap(mid) < 0 ? lo : hi) = mid;
    }
    c_star = 0.5 * (lo + hi);
  }

  const double xi0 = crossing(c_star);
  AdmissibleInitial init;
  init.xi0 = xi0;
  init.r.reserve(m_nodes + 1);
  init.u.reserve(m_nodes + 1);
  init.up.reserve(m_nodes + 1);
  for (int i = 0; i <= m_nodes; ++i) {
    const double r = xi0 * i / m_nodes;
    init.r.push_back(r);
    init.u.push_back(lower.eval(r, 0) + c_star * eta(r));
    init.up.push_back(lower.slope_r(r, 0) + c_star * eta_p(r));
  }
  init.u.back() = xi0;  // land exactly on the contact line
  init.up.front() = 0.0;
  return init;
}

}  // namespace conemcf
