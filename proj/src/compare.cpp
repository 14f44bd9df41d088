#include "conemcf/compare.hpp"

#include <algorithm>
#include <cmath>

#include "conemcf/interp.hpp"
#include "conemcf/ivp.hpp"

namespace conemcf {

double OrderedGraph::value(double rq) const {
  if (wp.empty()) return linear_eval(r, w, rq);
  return hermite_eval(r, w, wp, rq);
}

double OrderedGraph::slope(double rq) const {
  if (wp.empty()) throw SolverError("OrderedGraph: no slope samples");
  return hermite_eval_deriv(r, w, wp, rq);
}

void OrderedGraph::validate() const {
  if (r.size() < 2 || r.size() != w.size())
    throw SolverError("OrderedGraph: inconsistent arrays");
  if (!wp.empty() && wp.size() != r.size())
    throw SolverError("OrderedGraph: slope array size mismatch");
  if (std::abs(r.front()) > 1e-14) throw SolverError("OrderedGraph: grid must start at 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw SolverError("OrderedGraph: r must be increasing");
  for (double v : w)
    if (!(v > 0)) throw SolverError("OrderedGraph: w must be positive");
  if (std::abs(w.back() - r.back()) > 1e-9 * std::max(1.0, r.back()))
    throw SolverError("OrderedGraph: w(xi) != xi");
}

PreceqResult preceq(const OrderedGraph& g1, const OrderedGraph& g2, double tol) {
  PreceqResult res;
  res.xi_gap = g1.xi() - g2.xi();
  const double r_hi = std::min(g1.xi(), g2.xi());
  double worst = -std::numeric_limits<double>::infinity();
  double worst_r = 0;
  // Compare on g1's nodes within the common domain, plus the common endpoint.
  for (std::size_t i = 0; i < g1.r.size(); ++i) {
    const double rq = g1.r[i];
    if (rq > r_hi) break;
    const double gap = g1.w[i] - g2.value(rq);
    if (gap > worst) {
      worst = gap;
      worst_r = rq;
    }
  }
  const double gap_end = g1.value(r_hi) - g2.value(r_hi);
  if (gap_end > worst) {
    worst = gap_end;
    worst_r = r_hi;
  }
  res.worst_gap = worst;
  res.worst_r = worst_r;
  res.holds = (res.xi_gap <= tol) && (res.worst_gap <= tol);
  return res;
}

ResidualReport lower_solution_residual(const GraphSeries& series, const AngleFunction& angle,
                                       int dim) {
  if (series.t.size() != series.g.size() || series.t.size() < 3)
    throw SolverError("lower_solution_residual: need >= 3 snapshots");
  ResidualReport rep;
  rep.interior_max = -std::numeric_limits<double>::infinity();
  rep.interior_min = std::numeric_limits<double>::infinity();
  rep.boundary_max = -std::numeric_limits<double>::infinity();
  rep.boundary_min = std::numeric_limits<double>::infinity();

  for (std::size_t n = 1; n + 1 < series.t.size(); ++n) {
    const OrderedGraph& g = series.g[n];
    const OrderedGraph& gm = series.g[n - 1];
    const OrderedGraph& gp = series.g[n + 1];
    const double dtm = series.t[n] - series.t[n - 1];
    const double dtp = series.t[n + 1] - series.t[n];
    const std::size_t m = g.r.size();
    // Interior residual on the snapshot's own nodes, away from the ends so
    // centered stencils and the time difference stay on-domain.
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double rq = g.r[i];
      if (rq <= 1e-10) continue;
      if (rq >= std::min(gm.xi(), gp.xi())) continue;
      const double hm = g.r[i] - g.r[i - 1];
      const double hp = g.r[i + 1] - g.r[i];
      const double ur = (g.w[i + 1] - g.w[i - 1]) / (hm + hp);
      const double urr =
          2.0 * (hm * g.w[i + 1] - (hm + hp) * g.w[i] + hp * g.w[i - 1]) /
          (hm * hp * (hm + hp));
      const double ut = (gp.value(rq) - gm.value(rq)) / (dtm + dtp);
      const double op = urr / (1 + ur * ur) + (dim - 1) * ur / rq;
      const double resid = ut - op;
      rep.interior_max = std::max(rep.interior_max, resid);
      rep.interior_min = std::min(rep.interior_min, resid);
    }
    // Boundary slope vs the prescribed contact slope at the free end.
    double ur_xi;
    if (!g.wp.empty()) {
      ur_xi = g.wp.back();
    } else {
      const std::size_t l = m - 1;
      ur_xi = (3 * g.w[l] - 4 * g.w[l - 1] + g.w[l - 2]) /
              (g.r[l] - g.r[l - 2]);
    }
    const double slack = ur_xi - angle(g.w.back());
    rep.boundary_max = std::max(rep.boundary_max, slack);
    rep.boundary_min = std::min(rep.boundary_min, slack);
  }
  return rep;
}

namespace {

struct BarrierRhs {
  int N;
  IvpState<2> operator()(double r, const IvpState<2>& y) const {
    const double vr = y[1];
    return {vr, -(1 + vr * vr) * (N - 1) * vr / r};
  }
};

}  // namespace

Barrier barrier_solve(double r_star, double k0, int dim) {
  if (!(r_star > 0)) throw SolverError("barrier_solve: r_star must be positive");
  if (!(k0 > 0 && k0 < 1)) throw SolverError("barrier_solve: k0 must be in (0,1)");
  if (dim < 1) throw SolverError("barrier_solve: dimension must be >= 1");

  Barrier b;
  b.r_star = r_star;
  b.k0 = k0;
  b.dim = dim;

  const double r_floor = r_star / 4.0;
  if (dim == 1) {
    // v_rr = 0: the exact line v = r_star + k0 (r - r_star).
    const int m = 64;
    for (int i = 0; i <= m; ++i) {
      const double r = r_floor + (r_star - r_floor) * i / m;
      b.r.push_back(r);
      b.v.push_back(r_star + k0 * (r - r_star));
      b.v_r.push_back(k0);
    }
    return b;
  }

  BarrierRhs rhs{dim};
  IvpOptions opts;
  opts.rtol = opts.atol = 1e-13;
  std::array<IvpEvent<2>, 1> ev = {
      IvpEvent<2>{[k0](double, const IvpState<2>& y) { return y[1] - 2 * k0; }, +1}};
  auto sol = integrate_ivp_system<2>(rhs, r_star, r_floor, {r_star, k0}, opts, ev);

  // Samples come out in decreasing r; store ascending.
  const std::size_t n = sol.t.size();
  b.r.resize(n);
  b.v.resize(n);
  b.v_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.r[n - 1 - i] = sol.t[i];
    b.v[n - 1 - i] = sol.y[i][0];
    b.v_r[n - 1 - i] = sol.y[i][1];
  }
  return b;
}

double Barrier::value(double rq) const {
  if (rq < r.front() - 1e-12 || rq > r.back() + 1e-12)
    throw OutOfRange("barrier evaluated outside its computed range");
  return hermite_eval(r, v, v_r, rq);
}

OrderedGraph Barrier::graph() const {
  // The barrier covers only a collar; as an ordered graph it is extended
  // leftward at its lowest computed point (constant), which is sound for
  // comparisons against graphs that stay below v on the collar.
  OrderedGraph g;
  g.r.push_back(0.0);
  g.w.push_back(v.front());
  g.wp.push_back(0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) continue;
    g.r.push_back(r[i]);
    g.w.push_back(v[i]);
    g.wp.push_back(v_r[i]);
  }
  return g;
}

}  // namespace conemcf
