#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "conemcf/angle.hpp"
#include "conemcf/compare.hpp"
#include "conemcf/selfsimilar.hpp"

namespace conemcf {

// Free-boundary evolution
//   u_t = u_rr/(1+u_r^2) + (N-1) u_r / r  on 0 < r < xi(t),  u(xi,t) = xi(t),
//   u_r(0,t) = 0,  u_r(xi(t),t) = k(u(xi(t),t)),
// solved on the fixed domain via zeta = r/u (primary path) and by a
// front-fixing scheme in s = r/xi (reference oracle).

struct AdmissibleInitial {
  double xi0 = 0;
  std::vector<double> r;   // uniform on [0, xi0]
  std::vector<double> u;   // u > 0, u(xi0) = xi0
  std::vector<double> up;  // u', with u'(0)=0, u'(xi0)=k(xi0), 0 <= u' < 1

  double value(double rq) const { return hermite_eval(r, u, up, rq); }
  double slope(double rq) const { return hermite_eval_deriv(r, u, up, rq); }
  double max_slope() const;
  void validate(const AngleFunction& angle) const;
  OrderedGraph graph() const { return OrderedGraph{r, u, up}; }
};

enum class Scheme { Transformed, Direct };

struct SolverConfig {
  int dim = 1;           // spatial dimension N >= 1
  int M = 200;           // spatial intervals; M >= 16
  double dt_init = 1e-4;
  double dt_max = 1e-3;
  double dt_min = 1e-12;
  bool adaptive = true;  // false -> fixed dt = dt_init
  double grow = 1.25;    // step growth factor after repeated accepts
  int grow_after = 8;
  double boundary_move_frac = 0.125;  // max |d v(1)| per step, in units of the period
  double grad_slack = 2.5e-3;         // tolerance on the discrete gradient bound
  bool enforce_monotone = true;       // reject steps with u_r < -grad_slack
  double inversion_tol = 1e-13;       // nonlinear solve tolerance for zeta = r/u
  Scheme scheme = Scheme::Transformed;

  void validate() const;
};

// Transformed state: v(zeta, t) on the uniform zeta grid over [0,1];
// xi(t) = v(1,t) because zeta = r/u equals 1 on the contact set.
struct FlowState {
  double t = 0;
  std::vector<double> v;

  int intervals() const { return static_cast<int>(v.size()) - 1; }
  double xi() const { return v.back(); }
};

struct DiagnosticRecord {
  double max_abs_ur = 0;
  double min_ur = std::numeric_limits<double>::infinity();
  double min_diffusion = std::numeric_limits<double>::infinity();
  double min_floor_ratio = std::numeric_limits<double>::infinity();  // diffusion / Q+Q- floor
  double gradient_bound = 0;  // G = max(sup|u0'|, ksup)
  long steps = 0;
  long rejects = 0;

  void merge(const DiagnosticRecord& o);
};

struct EvolveResult {
  std::vector<double> times;
  std::vector<FlowState> states;     // transformed scheme only
  std::vector<OrderedGraph> graphs;  // reconstructed (r, u, u_r) series
  DiagnosticRecord diag;
};

// zeta = r/u transform of admissible data onto M+1 uniform nodes. Solves the
// scalar monotone equation r = zeta * u(r) per node; throws InversionFailure
// if |u_r| >= 1 anywhere (map not invertible).
std::vector<double> to_transformed(const AdmissibleInitial& init, int M, double tol = 1e-13);

// Inverse view: r_i = zeta_i * v_i, u(r_i) = v_i, with u_r = w/(v + zeta w).
OrderedGraph from_transformed(const FlowState& state);

// 1-D coefficients of the transformed equation at one node, specialized to
// radial symmetry:
//   v_t = diffusion * v_ss + angular * v_s / s + source,
// diffusion = 1/((v+s w)^2 + w^2), angular = (N-1)/v^2, source = -2 w^2
// * diffusion / v. At s=0 the angular term's limit turns the operator into
// N * diffusion * v_ss (with w=0 there). Throws ParabolicityLoss if the
// diffusion coefficient is not positive.
struct RadialCoefficients {
  double diffusion;
  double angular;
  double source;
};
RadialCoefficients radial_coefficients(double zeta, double v, double v_zeta, int dim);

// Contact-set residual (2 zeta Dv + v)/v - (1+k(v))/(1-k(v)) at zeta = 1;
// zero at a compatible state.
double boundary_residual(double v1, double v_zeta1, const AngleFunction& angle);
double boundary_target(double k);  // (1+k)/(1-k)

// One semi-implicit step of size dt: coefficients and the boundary
// nonlinearity frozen at the current state, tridiagonal solve for the
// implicit diffusion/drift, Robin-type discrete contact condition, symmetry
// closure at zeta = 0. dt = 0 returns the input unchanged.
FlowState step(const FlowState& state, const SolverConfig& cfg, const AngleFunction& angle,
               double dt, DiagnosticRecord* diag = nullptr);

EvolveResult evolve(const AdmissibleInitial& init, const AngleFunction& angle,
                    const SolverConfig& cfg, double t_end,
                    std::span<const double> output_times = {});

// Front-fixing reference oracle in s = r/xi(t); same contract, independent
// discretization. Used for cross-validation.
EvolveResult solve_direct(const AdmissibleInitial& init, const AngleFunction& angle,
                          const SolverConfig& cfg, double t_end,
                          std::span<const double> output_times = {});

// Default admissible initial data: the self-similar snapshot at flow time 0
// of `lower` (shift t0), with the contact slope corrected in a collar of
// width `collar` so that u0'(xi0) = k(xi0). For constant angles this returns
// the exact snapshot.
AdmissibleInitial make_selfsimilar_initial(const SelfSimilarSolution& lower,
                                           const AngleFunction& angle, int m_nodes,
                                           double collar);

}  // namespace conemcf
