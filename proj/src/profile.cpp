#include "conemcf/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace conemcf {

namespace {

constexpr double kWCap = 1e6;  // slope magnitude treated as an imminent floor touch

// Right side of the shooting system y = (phi, phi'). eps = 0 selects the
// limit equation, with the symmetry closure phi''(0) = p phi(0) / N at the
// axis (valid because trajectories started there carry phi'(0) = 0).
struct ShootRhs {
  int N;
  double p;
  double eps;

  IvpState<2> operator()(double z, const IvpState<2>& y) const {
    const double phi = y[0], w = y[1];
    double rhs = p * (phi - z * w);
    if (N > 1) {
      if (eps > 0) {
        rhs -= (N - 1) * w / (z + eps);
      } else if (z > 1e-13) {
        rhs -= (N - 1) * w / z;
      } else {
        return {w, p * phi / N};
      }
    }
    return {w, (1 + w * w) * rhs};
  }
};

void append_samples(ShootingOutcome& out, const IvpSolution<2>& sol, std::size_t from) {
  for (std::size_t i = from; i < sol.t.size(); ++i) {
    out.z.push_back(sol.t[i]);
    out.phi.push_back(sol.y[i][0]);
    out.phi_prime.push_back(sol.y[i][1]);
  }
}

}  // namespace

BracketConstants bracket_constants(const ProfileProblem& problem) {
  problem.validate();
  const double k = problem.slope;
  const double n1 = problem.dim - 1;
  BracketConstants bc;
  bc.P1 = (2.0 * std::atan(k) + (k + 4.0) * n1) / (1.0 - k);
  bc.P2 = n1 * k / 2.0;
  return bc;
}

const char* case_name(CaseLabel c) {
  switch (c) {
    case CaseLabel::Case1: return "Case1";
    case CaseLabel::Case2: return "Case2";
    case CaseLabel::Case3: return "Case3";
    case CaseLabel::Case4: return "Case4";
    case CaseLabel::Undetermined: return "Undetermined";
  }
  return "?";
}

ShootingOutcome integrate_ivp(const ProfileProblem& problem, double p,
                              const ShootingTolerances& tol) {
  problem.validate();
  if (!(p >= 0)) throw SolverError("integrate_ivp: p must be >= 0");

  ShootRhs rhs{problem.dim, p, problem.eps_reg};
  IvpOptions opts;
  opts.rtol = tol.rtol;
  opts.atol = tol.atol;
  opts.event_tol = tol.event_tol;

  ShootingOutcome out;
  out.p = p;

  // Main stage: backward from z=1 until a critical point, the floor, a slope
  // blow-up, or the axis.
  std::array<IvpEvent<2>, 3> main_events = {
      IvpEvent<2>{[](double, const IvpState<2>& y) { return y[1]; }, -1},          // phi' = 0
      IvpEvent<2>{[](double, const IvpState<2>& y) { return y[0]; }, -1},          // phi = 0
      IvpEvent<2>{[](double, const IvpState<2>& y) { return y[1] - kWCap; }, +1},  // blow-up
  };
  auto sol = integrate_ivp_system<2>(rhs, 1.0, 0.0, {1.0, problem.slope}, opts, main_events);
  append_samples(out, sol, 0);

  if (sol.stopped_event == 0) {
    out.critical_z = sol.t_end();
    // Continue a short way past the critical point so the sign change of phi'
    // is on record (and a would-be second critical point gets noticed).
    const double z_star = sol.t_end();
    const double z_cap = std::max(0.0, z_star - 0.25);
    if (z_star > 1e-10 && z_cap < z_star) {
      std::array<IvpEvent<2>, 4> cont_events = {
          IvpEvent<2>{[](double, const IvpState<2>& y) { return y[0]; }, -1},          // floor
          IvpEvent<2>{[](double, const IvpState<2>& y) { return y[0] - 1.0; }, +1},    // top exit
          IvpEvent<2>{[](double, const IvpState<2>& y) { return y[1]; }, +1},          // phi' back to 0
          IvpEvent<2>{[](double, const IvpState<2>& y) { return y[1] + kWCap; }, -1},  // blow-down
      };
      auto cont = integrate_ivp_system<2>(rhs, z_star, z_cap, sol.y_end(), opts, cont_events);
      append_samples(out, cont, 1);
      if (cont.stopped_event == 2) {
        // A returning critical point contradicts uniqueness; mark ambiguous by
        // clearing the located one.
        out.critical_z.reset();
        out.z_end = cont.t_end();
        out.phi_end = cont.y_end()[0];
        out.phi_prime_end = cont.y_end()[1];
        out.case_label = CaseLabel::Undetermined;
        return out;
      }
    }
    out.z_end = out.z.back();
    out.phi_end = out.phi.back();
    out.phi_prime_end = out.phi_prime.back();
  } else if (sol.stopped_event == 1 || sol.stopped_event == 2) {
    out.hit_floor = true;
    out.z_end = sol.t_end();
    out.phi_end = sol.y_end()[0];
    out.phi_prime_end = sol.y_end()[1];
  } else {
    out.reached_axis = sol.reached_end;
    out.z_end = sol.t_end();
    out.phi_end = sol.y_end()[0];
    out.phi_prime_end = sol.y_end()[1];
  }

  out.case_label = classify_case(out, tol);
  return out;
}

CaseLabel classify_case(const ShootingOutcome& out, const ShootingTolerances& tol) {
  const double tc = tol.tol_classify;
  if (out.critical_z) {
    const double z_star = *out.critical_z;
    // Index into the samples at the critical point: the main stage ends there.
    double phi_star = out.phi_end;
    for (std::size_t i = 0; i < out.z.size(); ++i)
      if (std::abs(out.z[i] - z_star) < 1e-11) phi_star = out.phi[i];
    if (z_star <= 1e-10) {
      // Critical point at the axis is the clean Neumann arrival.
      return (phi_star > tc && phi_star < 1 - tc) ? CaseLabel::Case2 : CaseLabel::Undetermined;
    }
    if (phi_star <= tc || phi_star >= 1 - tc) return CaseLabel::Undetermined;
    return CaseLabel::Case1;
  }
  if (out.reached_axis) {
    const double w0 = out.phi_prime_end;
    if (std::abs(w0) <= tc) {
      return (out.phi_end > tc && out.phi_end < 1 - tc) ? CaseLabel::Case2
                                                        : CaseLabel::Undetermined;
    }
    if (w0 > tc) return CaseLabel::Case3;
    return CaseLabel::Undetermined;  // negative slope without a located critical point
  }
  if (out.hit_floor) {
    return out.phi_prime_end > tc ? CaseLabel::Case4 : CaseLabel::Undetermined;
  }
  return CaseLabel::Undetermined;
}

namespace {

// Bisection side of a classified trajectory: -1 keeps the lower endpoint
// (Sigma3/Sigma4), +1 the upper (Sigma1), 0 terminates (Sigma2).
int bisect_side(const ShootingOutcome& out) {
  switch (out.case_label) {
    case CaseLabel::Case1: return +1;
    case CaseLabel::Case2: return 0;
    case CaseLabel::Case3:
    case CaseLabel::Case4: return -1;
    case CaseLabel::Undetermined:
      if (out.hit_floor) return -1;            // floor-corner ambiguity stays on the slow side
      if (out.reached_axis) return +1;         // negative axis slope: critical point just missed
      if (out.critical_z || !out.z.empty()) return +1;
      return -1;
  }
  return -1;
}

}  // namespace

FindPResult find_P(const ProfileProblem& problem, double tol_p, const ShootingTolerances& tol,
                   std::optional<double> bracket_lo, std::optional<double> bracket_hi) {
  problem.validate();
  if (!(tol_p > 0)) throw SolverError("find_P: tol_p must be positive");
  const auto bc = bracket_constants(problem);
  double lo = bracket_lo.value_or(problem.dim == 1 ? 0.0 : bc.P2);
  double hi = bracket_hi.value_or(bc.P1);
  if (!(lo >= 0 && hi > lo)) throw BracketFailure("find_P: invalid bracket");

  FindPResult res;
  auto note_witness = [&](const ShootingOutcome& o) {
    if (o.reached_axis) res.phi0_witness = o.phi_end;
  };

  auto out_lo = integrate_ivp(problem, lo, tol);
  note_witness(out_lo);
  int side_lo = bisect_side(out_lo);
  if (side_lo == 0) {
    res.P_eps = lo;
    res.outcome = std::move(out_lo);
    return res;
  }
  if (side_lo > 0)
    throw BracketFailure(std::string("find_P: lower endpoint classifies as ") +
                         case_name(out_lo.case_label));
  auto out_hi = integrate_ivp(problem, hi, tol);
  note_witness(out_hi);
  int side_hi = bisect_side(out_hi);
  if (side_hi == 0) {
    res.P_eps = hi;
    res.outcome = std::move(out_hi);
    return res;
  }
  if (side_hi < 0)
    throw BracketFailure(std::string("find_P: upper endpoint classifies as ") +
                         case_name(out_hi.case_label));

  while (hi - lo > tol_p) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    auto out = integrate_ivp(problem, mid, tol);
    note_witness(out);
    ++res.iterations;
    const int side = bisect_side(out);
    if (side == 0) {
      res.P_eps = mid;
      res.outcome = std::move(out);
      return res;
    }
    (side < 0 ? lo : hi) = mid;
  }
  res.P_eps = 0.5 * (lo + hi);
  res.outcome = integrate_ivp(problem, res.P_eps, tol);
  note_witness(res.outcome);
  return res;
}

std::vector<double> ProfileSolveConfig::schedule() const {
  if (!eps_schedule.empty()) return eps_schedule;
  std::vector<double> s;
  for (int j = 0; j <= 10; ++j) s.push_back(1e-2 * std::pow(2.0, -j));
  return s;
}

namespace {

struct LimitShot {
  std::array<double, 2> F;  // (phi(1)-1, phi'(1)-k)
};

LimitShot shoot_limit(int dim, double slope, double c, double p) {
  ShootRhs rhs{dim, p, 0.0};
  IvpOptions opts;
  opts.rtol = opts.atol = 1e-13;
  opts.store_trajectory = false;
  auto sol = integrate_ivp_system<2>(rhs, 0.0, 1.0, {c, 0.0}, opts);
  return {{sol.y_end()[0] - 1.0, sol.y_end()[1] - slope}};
}

}  // namespace

SelfSimilarProfile solve_profile(int dim, double slope, const ProfileSolveConfig& cfg) {
  ProfileProblem prob{dim, slope, 1e-2};
  prob.validate();
  const auto bc = bracket_constants(prob);
  const auto sched = cfg.schedule();
  if (sched.empty()) throw SolverError("solve_profile: empty eps schedule");

  std::vector<double> Ps;
  double c_seed = std::numeric_limits<double>::quiet_NaN();
  double accepted = std::numeric_limits<double>::quiet_NaN();
  double eps_used = sched.front();
  bool settled = false;
  for (double eps : sched) {
    prob.eps_reg = eps;
    auto r = find_P(prob, cfg.tol_p_bisect, cfg.shoot, cfg.bracket_lo, cfg.bracket_hi);
    eps_used = eps;
    if (r.phi0_witness) c_seed = *r.phi0_witness;
    if (!Ps.empty() && std::abs(r.P_eps - Ps.back()) < cfg.p_accept) {
      Ps.push_back(r.P_eps);
      accepted = r.P_eps;
      settled = true;
      break;
    }
    Ps.push_back(r.P_eps);
  }
  if (!settled) {
    accepted = Ps.back();
    if (Ps.size() >= 3) {
      // Aitken delta-squared on the tail of the eps sequence.
      const double d1 = Ps[Ps.size() - 2] - Ps[Ps.size() - 3];
      const double d2 = Ps[Ps.size() - 1] - Ps[Ps.size() - 2];
      const double den = d2 - d1;
      if (std::abs(den) > 1e-300) {
        const double ex = Ps.back() - d2 * d2 / den;
        if (std::isfinite(ex) && ex > 0.5 * bc.P2 && ex < 1.5 * bc.P1 + 1.0) accepted = ex;
      }
    }
  }
  if (!std::isfinite(c_seed)) c_seed = 1.0 - 0.5 * slope;

  // Newton polish of (phi(0), P) on the limit equation; the schedule result is
  // the seed, the polished pair satisfies phi(1)=1, phi'(1)=k to ~1e-13.
  double c = c_seed, p = accepted;
  bool converged = false;
  double fnorm = std::numeric_limits<double>::infinity();
  auto norm2 = [](const std::array<double, 2>& f) {
    return std::max(std::abs(f[0]), std::abs(f[1]));
  };
  auto F = shoot_limit(dim, slope, c, p).F;
  fnorm = norm2(F);
  for (int it = 0; it < cfg.newton_max_iter && !converged; ++it) {
    if (fnorm < cfg.newton_tol) {
      converged = true;
      break;
    }
    const double dc = 1e-7 * std::max(0.05, std::abs(c));
    const double dp = 1e-7 * std::max(0.05, std::abs(p));
    auto Fc1 = shoot_limit(dim, slope, c + dc, p).F;
    auto Fc0 = shoot_limit(dim, slope, c - dc, p).F;
    auto Fp1 = shoot_limit(dim, slope, c, p + dp).F;
    auto Fp0 = shoot_limit(dim, slope, c, p - dp).F;
    const double j11 = (Fc1[0] - Fc0[0]) / (2 * dc), j12 = (Fp1[0] - Fp0[0]) / (2 * dp);
    const double j21 = (Fc1[1] - Fc0[1]) / (2 * dc), j22 = (Fp1[1] - Fp0[1]) / (2 * dp);
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) throw NoConvergence("solve_profile: singular Newton system");
    double step_c = -(j22 * F[0] - j12 * F[1]) / det;
    double step_p = -(-j21 * F[0] + j11 * F[1]) / det;
    double lambda = 1.0;
    for (int bt = 0; bt < 10; ++bt) {
      const double cn = c + lambda * step_c, pn = p + lambda * step_p;
      if (cn > 0 && cn < 1.5 && pn > 0) {
        auto Fn = shoot_limit(dim, slope, cn, pn).F;
        if (norm2(Fn) < fnorm || lambda < 1e-3) {
          c = cn;
          p = pn;
          F = Fn;
          fnorm = norm2(Fn);
          break;
        }
      }
      lambda *= 0.5;
      if (bt == 9) throw NoConvergence("solve_profile: Newton line search failed");
    }
    if (fnorm < cfg.newton_tol) converged = true;
  }
  if (!converged && fnorm >= cfg.newton_tol)
    throw NoConvergence("solve_profile: P did not settle (Newton residual " +
                        std::to_string(fnorm) + ")");

  // Final pass: forward integration sampled onto the uniform grid, plus the
  // extension past z=1 used by upper-solution constructions.
  const int m = cfg.grid_m;
  if (m < 16) throw SolverError("solve_profile: grid_m too small");
  const double h = 1.0 / m;
  std::vector<double> nodes;
  nodes.reserve(m);
  for (int i = 1; i <= m; ++i) nodes.push_back(static_cast<double>(i) / m);

  ShootRhs rhs{dim, p, 0.0};
  IvpOptions opts;
  opts.rtol = opts.atol = 1e-13;
  auto sol = integrate_ivp_system<2>(rhs, 0.0, 1.0, {c, 0.0}, opts, {}, nodes);

  SelfSimilarProfile prof;
  prof.dim = dim;
  prof.slope = slope;
  prof.P = p;
  prof.eps_floor = eps_used;
  prof.h = h;
  prof.unit_index = static_cast<std::size_t>(m);
  prof.z.reserve(m + 1);
  prof.Phi.reserve(m + 1);
  prof.Phi_p.reserve(m + 1);
  prof.Phi_pp.reserve(m + 1);

  auto take_nodes = [&](const IvpSolution<2>& s, const std::vector<double>& want,
                        double snap_tol) {
    std::size_t j = 0;
    for (double zn : want) {
      while (j < s.t.size() && s.t[j] < zn - snap_tol) ++j;
      if (j >= s.t.size() || std::abs(s.t[j] - zn) > snap_tol)
        throw SolverError("solve_profile: grid node missing from integration output");
      prof.z.push_back(zn);
      prof.Phi.push_back(s.y[j][0]);
      prof.Phi_p.push_back(s.y[j][1]);
      prof.Phi_pp.push_back(s.dy[j][1]);
    }
  };
  prof.z.push_back(0.0);
  prof.Phi.push_back(sol.y.front()[0]);
  prof.Phi_p.push_back(0.0);
  prof.Phi_pp.push_back(p * sol.y.front()[0] / dim);
  take_nodes(sol, nodes, 1e-9);

  // Extension: continue with the same P until the slope cap (1+k)/2 or the
  // configured z ceiling, whichever is first.
  const double w_cap = 0.5 * (1.0 + slope);
  std::vector<double> ext_nodes;
  for (int i = m + 1; static_cast<double>(i) / m <= cfg.z_extension_max + 1e-12; ++i)
    ext_nodes.push_back(static_cast<double>(i) / m);
  if (!ext_nodes.empty()) {
    std::array<IvpEvent<2>, 1> ev = {
        IvpEvent<2>{[w_cap](double, const IvpState<2>& y) { return y[1] - w_cap; }, +1}};
    auto ext = integrate_ivp_system<2>(rhs, 1.0, ext_nodes.back(),
                                       {sol.y_end()[0], sol.y_end()[1]}, opts, ev);
    std::size_t j = 0;
    for (double zn : ext_nodes) {
      while (j < ext.t.size() && ext.t[j] < zn - 1e-9) ++j;
      if (j >= ext.t.size() || std::abs(ext.t[j] - zn) > 1e-9) break;  // stopped early
      prof.z.push_back(zn);
      prof.Phi.push_back(ext.y[j][0]);
      prof.Phi_p.push_back(ext.y[j][1]);
      prof.Phi_pp.push_back(ext.dy[j][1]);
    }
  }

  prof.validate();
  return prof;
}

void SelfSimilarProfile::validate() const {
  char buf[256];
  auto fail = [&](const char* what, double v) {
    std::snprintf(buf, sizeof buf, "profile invariant violated: %s (value %.3e, N=%d k=%g)",
                  what, v, dim, slope);
    throw SolverError(buf);
  };
  const auto bc = bracket_constants(ProfileProblem{dim, slope, 0.5});
  const double ptol = 1e-7 * (1.0 + bc.P1);
  if (!(P >= bc.P2 - ptol && P <= bc.P1 + ptol)) fail("P outside [P2, P1]", P);
  if (z.size() < 17 || z.size() != Phi.size() || z.size() != Phi_p.size() ||
      z.size() != Phi_pp.size())
    fail("inconsistent grid arrays", static_cast<double>(z.size()));
  if (unit_index >= z.size() || std::abs(z[unit_index] - 1.0) > 1e-12)
    fail("unit node misplaced", z[unit_index]);
  for (std::size_t i = 0; i <= unit_index; ++i) {
    if (!(Phi[i] > 0)) fail("Phi <= 0 on [0,1]", Phi[i]);
    if (!(Phi[i] <= 1.0 + 1e-9)) fail("Phi > 1 on [0,1]", Phi[i]);
    if (!(Phi_p[i] >= -1e-9 && Phi_p[i] <= slope + 1e-9)) fail("Phi' outside [0,k]", Phi_p[i]);
    if (!(Phi_pp[i] >= -1e-9)) fail("Phi'' negative", Phi_pp[i]);
  }
  if (std::abs(Phi_p[0]) > 1e-6) fail("Phi'(0) != 0", Phi_p[0]);
  if (std::abs(Phi[unit_index] - 1.0) > 1e-10) fail("Phi(1) != 1", Phi[unit_index]);
  if (std::abs(Phi_p[unit_index] - slope) > 1e-8) fail("Phi'(1) != k", Phi_p[unit_index]);
}

}  // namespace conemcf
