#include "conemcf/homog.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace conemcf {

namespace {

__int128 ipow(long long base, int e) {
  __int128 r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

Schedule schedule(int n, double eps, double P) {
  if (n < 1) throw SolverError("schedule: n must be >= 1");
  if (n > 29) throw SolverError("schedule: rational terms overflow past n = 29");
  if (!(eps > 0 && eps < 1)) throw SolverError("schedule: eps must be in (0,1)");
  if (!(P > 0)) throw SolverError("schedule: P must be positive");

  Schedule s;
  s.n = n;
  s.eps = eps;
  s.P = P;

  const __int128 p4 = ipow(4, n - 1);
  const __int128 p3 = ipow(3, n - 1);
  const __int128 D = 10 * p4 - 4 * p3;
  s.a = Rational::make(5 * p4 - 4 * p3, D);
  s.b = Rational::make(p3, D);
  s.B = Rational::make(10 * p4 - 3 * p3, 6 * p4);  // (10*4^{n-1} - 3^n)/(6*4^{n-1})
  if (n == 1)
    s.B_prev = Rational::of(1);
  else {
    const __int128 q4 = ipow(4, n - 2), q3 = ipow(3, n - 2);
    s.B_prev = Rational::make(10 * q4 - 3 * q3, 6 * q4);
  }

  s.nu = std::pow(eps, s.B_prev.to_double() - 1.0);
  s.eps_n = std::pow(eps, s.B_prev.to_double());
  s.tau = P * std::pow(s.eps_n, -2.0 * s.b.to_double());
  s.T = P * std::pow(eps, 2.0 - 2.0 * s.B.to_double());
  s.S = std::pow(eps, 0.5 * (std::pow(0.75, n - 1) - 1.0));

  double cT = 0, cS = 0;
  for (int j = 1; j <= n; ++j) {
    const __int128 j4 = ipow(4, j - 1), j3 = ipow(3, j - 1);
    const double Bj = Rational::make(10 * j4 - 3 * j3, 6 * j4).to_double();
    cT += P * std::pow(eps, 2.0 - 2.0 * Bj);
    if (j >= 2) cS += std::pow(eps, 0.5 * (std::pow(0.75, j - 1) - 1.0));
  }
  s.curlyT = cT;
  s.curlyS = cS;
  return s;
}

namespace {

// Gap bookkeeping of one reconstructed graph against the slowest family.
struct GapSample {
  double lower_gap;
  double upper_gap;
  double front_margin;
};

GapSample gaps_at(const OrderedGraph& g, double t, const SelfSimilarSolution& low,
                  const SelfSimilarSolution& upp) {
  const double R_low = low.radius(t);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.r.size(); ++i) {
    const double r = g.r[i];
    if (r <= R_low) lo = std::min(lo, g.w[i] - low.eval(r, t));
    hi = std::max(hi, g.w[i] - upp.eval_extended(r, t));
  }
  GapSample s;
  s.front_margin = g.xi() - R_low;
  s.lower_gap = std::min(lo, s.front_margin);
  s.upper_gap = hi;
  return s;
}

}  // namespace

SandwichReport run_sandwich(const SelfSimilarProfile& slowest, const AngleFunction& angle,
                            double t0, double s0, const SandwichConfig& cfg) {
  if (!(t0 > 0 && s0 > t0)) throw SolverError("run_sandwich: need 0 < t0 < s0");
  const SelfSimilarSolution lower{slowest, t0};
  const SelfSimilarSolution upper{slowest, s0};

  const double eps = angle.period();
  const double c_window =
      cfg.window_coefficient > 0 ? cfg.window_coefficient : slowest.P;
  const double T = eps > 0 ? std::min(c_window * std::pow(eps, -4.0 / 3.0), cfg.cap)
                           : cfg.cap;

  auto init = make_selfsimilar_initial(lower, angle, cfg.init_nodes,
                                       eps > 0 ? eps : 0.25 * lower.radius(0));

  // Hypothesis check: the initial data sits between the two snapshots.
  {
    auto below = preceq(lower.graph(0, cfg.init_nodes), init.graph(), 1e-9);
    if (!below.holds)
      throw SolverError("run_sandwich: initial data not above the lower snapshot");
    auto above = preceq(init.graph(), upper.graph(0, cfg.init_nodes), 1e-9);
    if (!above.holds)
      throw SolverError("run_sandwich: initial data not below the upper snapshot");
  }

  SolverConfig scfg;
  scfg.dim = slowest.dim;
  scfg.M = cfg.M;
  scfg.dt_init = cfg.dt_init;
  scfg.dt_max = cfg.dt_max;

  std::vector<double> outs(cfg.n_outputs + 1);
  for (int i = 0; i <= cfg.n_outputs; ++i) outs[i] = T * i / cfg.n_outputs;

  auto run = evolve(init, angle, scfg, T, outs);

  SandwichReport rep;
  rep.eps = eps;
  rep.T_window = T;
  rep.diag = run.diag;
  {
    double ig = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < init.r.size(); ++i)
      ig = std::max(ig, init.u[i] - lower.eval(std::min(init.r[i], lower.radius(0)), 0));
    rep.initial_gap = ig;
  }

  rep.t.reserve(run.times.size());
  double sup_err = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    const auto gs = gaps_at(run.graphs[i], t, lower, upper);
    rep.t.push_back(t);
    rep.xi.push_back(run.graphs[i].xi());
    rep.lower_gap.push_back(gs.lower_gap);
    rep.upper_gap.push_back(gs.upper_gap);
    rep.front_margin.push_back(gs.front_margin);
    sup_err = std::max(sup_err, gs.upper_gap);
    low_min = std::min(low_min, gs.lower_gap);
  }
  rep.sup_error = sup_err;
  rep.end_error = rep.upper_gap.back();
  rep.lower_gap_min = low_min;
  return rep;
}

SandwichReport run_sandwich(int dim, const AngleFunction& angle, double t0, double s0,
                            const SandwichConfig& cfg) {
  ProfileSolveConfig pcfg = cfg.profile;
  pcfg.grid_m = cfg.profile_grid_m;
  const auto slowest = solve_profile(dim, angle.k0(), pcfg);
  return run_sandwich(slowest, angle, t0, s0, cfg);
}

ExponentFit fit_loglog(std::span<const double> eps, std::span<const double> err) {
  if (eps.size() != err.size()) throw DegenerateFit("fit: eps/err size mismatch");
  if (eps.size() < 3) throw DegenerateFit("fit: need at least 3 points");
  std::set<double> uniq(eps.begin(), eps.end());
  if (uniq.size() != eps.size()) throw DegenerateFit("fit: eps values are not distinct");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw DegenerateFit("fit: eps must be positive");
    if (!(err[i] > 0)) throw DegenerateFit("fit: errors must be positive for a log fit");
  }
  const std::size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw DegenerateFit("fit: degenerate abscissae");
  ExponentFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  f.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    f.residuals[i] = std::log(err[i]) - (f.intercept + f.slope * std::log(eps[i]));
  return f;
}

ExponentFit fit_exponent(std::span<const SandwichReport> reports) {
  std::vector<double> eps, err;
  for (const auto& r : reports) {
    eps.push_back(r.eps);
    err.push_back(r.sup_error);
  }
  return fit_loglog(eps, err);
}

}  // namespace conemcf
