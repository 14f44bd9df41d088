#pragma once

#include <cstddef>
#include <vector>

#include "conemcf/angle.hpp"
#include "conemcf/errors.hpp"

namespace conemcf {

// A positive graph on [0, xi] ending on the line y = r: w(xi) = xi. The order
// w1 <= w2 ("preceq") means xi1 <= xi2 and w1 <= w2 on [0, xi1].
struct OrderedGraph {
  std::vector<double> r;   // ascending, r.front() = 0, r.back() = xi
  std::vector<double> w;   // values, w.back() = xi
  std::vector<double> wp;  // slopes at nodes; empty -> linear interpolation

  double xi() const { return r.back(); }
  double value(double rq) const;
  double slope(double rq) const;  // requires wp
  void validate() const;
};

struct PreceqResult {
  bool holds = false;
  double worst_r = 0;    // location of the largest vertical violation
  double worst_gap = 0;  // max over common domain of (w1 - w2); <= tol when ordered
  double xi_gap = 0;     // xi1 - xi2; <= tol when ordered
};

PreceqResult preceq(const OrderedGraph& g1, const OrderedGraph& g2, double tol = 0.0);

// Time-indexed graphs of a candidate solution (each snapshot on its own grid).
struct GraphSeries {
  std::vector<double> t;
  std::vector<OrderedGraph> g;
};

// Interior and boundary residuals of a candidate against the radial flow
//   u_t = u_rr/(1+u_r^2) + (N-1) u_r / r,   u_r(xi) = k(u(xi)).
// Derivatives are taken by centered differences on the candidate's own grids.
// A valid lower solution has interior_max <= tol and boundary_max <= tol;
// a valid upper solution has interior_min >= -tol and boundary_min >= -tol.
struct ResidualReport {
  double interior_max = 0;  // max over samples of (u_t - interior operator)
  double interior_min = 0;
  double boundary_max = 0;  // max over times of (u_r(xi) - k(u(xi)))
  double boundary_min = 0;

  bool valid_lower(double tol) const { return interior_max <= tol && boundary_max <= tol; }
  bool valid_upper(double tol) const { return interior_min >= -tol && boundary_min >= -tol; }
};

ResidualReport lower_solution_residual(const GraphSeries& series, const AngleFunction& angle,
                                       int dim);

// Stationary barrier anchored at (r_star, r_star) with slope k0 there:
//   v_rr/(1+v_r^2) + (N-1) v_r / r = 0,  v(r_star) = r_star, v_r(r_star) = k0,
// integrated backward in r until v_r reaches 2 k0 or r hits the floor r_star/4.
struct Barrier {
  double r_star = 0;
  double k0 = 0;
  int dim = 1;
  std::vector<double> r;    // ascending, r.back() = r_star
  std::vector<double> v;
  std::vector<double> v_r;

  double value(double rq) const;
  OrderedGraph graph() const;  // ends at (r_star, r_star) on the line y = r
};

Barrier barrier_solve(double r_star, double k0, int dim);

}  // namespace conemcf
