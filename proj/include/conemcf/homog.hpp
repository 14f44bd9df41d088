#pragma once

#include <span>
#include <vector>

#include "conemcf/pde.hpp"
#include "conemcf/rational.hpp"

namespace conemcf {

// Induction schedule behind the homogenization estimate. The exponents
//   a_n = (5*4^{n-1} - 4*3^{n-1}) / (10*4^{n-1} - 4*3^{n-1}),
//   b_n = 3^{n-1} / (10*4^{n-1} - 4*3^{n-1}),
// satisfy a_n + 2 b_n = 1/2 exactly, and the cumulative products
//   B_n = (1+b_1)...(1+b_n) = (10*4^{n-1} - 3^n) / (6*4^{n-1})
// increase to 5/3. Stage windows T_n = P eps^{2-2B_n} approach P eps^{-4/3}.
struct Schedule {
  int n = 1;
  double eps = 0;
  double P = 0;
  Rational a, b, B, B_prev;
  double nu = 0;      // eps^{B_{n-1} - 1}
  double eps_n = 0;   // eps^{B_{n-1}}
  double tau = 0;     // P * eps_n^{-2 b_n}
  double T = 0;       // P * eps^{2 - 2 B_n}
  double S = 0;       // eps^{(1/2)[(3/4)^{n-1} - 1]}
  double curlyT = 0;  // T_1 + ... + T_n
  double curlyS = 0;  // S_2 + ... + S_n (the eps-scaling part)
};

Schedule schedule(int n, double eps, double P);

// One homogenization run: evolve admissible data wedged between the slowest
// self-similar snapshots at t0 < s0, track the gaps to that family.
struct SandwichReport {
  double eps = 0;       // angle period
  double T_window = 0;  // window end actually used
  std::vector<double> t;
  std::vector<double> xi;
  std::vector<double> lower_gap;     // min_r (u - U(., t+t0)), folded with the front margin
  std::vector<double> upper_gap;     // max_r (u - U(., t+s0))
  std::vector<double> front_margin;  // xi(t) - R(t+t0)
  double sup_error = 0;              // max_t upper_gap
  double end_error = 0;              // upper_gap at the window end
  double lower_gap_min = 0;
  double initial_gap = 0;  // max_r (u0 - U(., t0))
  DiagnosticRecord diag;
};

struct SandwichConfig {
  int M = 200;
  double dt_max = 1e-3;
  double dt_init = 1e-4;
  int n_outputs = 256;
  double window_coefficient = 0;  // 0 -> use P; window = min(c * eps^{-4/3}, cap)
  double cap = 200.0;
  int profile_grid_m = 2000;
  int init_nodes = 800;
  ProfileSolveConfig profile;
};

SandwichReport run_sandwich(int dim, const AngleFunction& angle, double t0, double s0,
                            const SandwichConfig& cfg = {});

// Same, reusing an already-solved slowest profile (the sweep solves it once).
SandwichReport run_sandwich(const SelfSimilarProfile& slowest, const AngleFunction& angle,
                            double t0, double s0, const SandwichConfig& cfg = {});

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  std::vector<double> residuals;
};

// Least-squares slope of log(err) against log(eps).
ExponentFit fit_loglog(std::span<const double> eps, std::span<const double> err);
ExponentFit fit_exponent(std::span<const SandwichReport> reports);

}  // namespace conemcf
