#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "conemcf/errors.hpp"
#include "conemcf/interp.hpp"
#include "conemcf/ivp.hpp"

namespace conemcf {

// Self-similar profiles: u = sqrt(2pt) * phi(r / sqrt(2pt)) solves the radial
// flow with constant contact slope k iff phi solves
//
//   phi'' / (1 + phi'^2) = p (phi - z phi') - (N-1) phi' / z,   0 < z < 1,
//   phi'(0) = 0,  phi(1) = 1,  phi'(1) = k.
//
// The eigenvalue p is found by shooting: regularize z -> z+eps in the singular
// term, integrate backward from z=1, classify the trajectory's fate, bisect p
// between the "too slow" set (positive slope at z=0, or floor touch) and the
// "too fast" set (interior critical point), then drive eps -> 0.

struct ProfileProblem {
  int dim = 1;           // N >= 1
  double slope = 0.5;    // k in (0,1)
  double eps_reg = 1e-2; // regularization, 0 < eps < 1

  void validate() const {
    if (dim < 1) throw SolverError("profile: dimension must be >= 1");
    if (!(slope > 0 && slope < 1)) throw SolverError("profile: slope must be in (0,1)");
    if (!(eps_reg > 0 && eps_reg < 1)) throw SolverError("profile: eps_reg must be in (0,1)");
  }
};

struct BracketConstants {
  double P1;  // (2 arctan k + (k+4)(N-1)) / (1-k)
  double P2;  // (N-1) k / 2
};

BracketConstants bracket_constants(const ProfileProblem& problem);

enum class CaseLabel {
  Case1,        // interior critical point z* with phi(z*) in (0,1)
  Case2,        // reached z=0 with phi(0) in (0,1) and phi'(0)=0 (within tol)
  Case3,        // reached z=0 with phi'(0) > 0
  Case4,        // phi hit the floor at some z>0 with positive slope
  Undetermined  // deciding quantity within tolerance of a classification boundary
};

const char* case_name(CaseLabel c);

struct ShootingTolerances {
  double rtol = 1e-12;
  double atol = 1e-12;
  double tol_classify = 1e-8;  // |phi'(0)| below this at z=0 reads as Case2
  double event_tol = 1e-12;    // z-location of exit/critical events
};

struct ShootingOutcome {
  double p = 0;
  CaseLabel case_label = CaseLabel::Undetermined;
  // Samples in integration order (z decreasing from 1).
  std::vector<double> z;
  std::vector<double> phi;
  std::vector<double> phi_prime;
  std::optional<double> critical_z;  // z* when a critical point was located
  double z_end = 0, phi_end = 0, phi_prime_end = 0;
  bool hit_floor = false;    // terminated on phi = 0
  bool reached_axis = false; // terminated on z = 0
};

// Integrate the regularized IVP backward from z=1 until the trajectory exits
// the unit box or reaches z=0. Case-1 trajectories are continued a short way
// past the critical point so the sign change of phi' is recorded.
ShootingOutcome integrate_ivp(const ProfileProblem& problem, double p,
                              const ShootingTolerances& tol = {});

CaseLabel classify_case(const ShootingOutcome& outcome, const ShootingTolerances& tol = {});

struct FindPResult {
  double P_eps = 0;
  ShootingOutcome outcome;  // trajectory at the returned midpoint
  int iterations = 0;
  // phi(0) of the last trajectory that reached the axis; seeds the limit solve.
  std::optional<double> phi0_witness;
};

FindPResult find_P(const ProfileProblem& problem, double tol_p,
                   const ShootingTolerances& tol = {},
                   std::optional<double> bracket_lo = {},
                   std::optional<double> bracket_hi = {});

struct ProfileSolveConfig {
  // Geometric eps schedule 1e-2 * 2^-j, j = 0..10 unless overridden.
  std::vector<double> eps_schedule;
  double tol_p_bisect = 1e-12;
  double p_accept = 1e-7;  // accept P when successive P_eps differ by less
  int grid_m = 2000;       // uniform nodes on [0,1]: grid_m + 1
  double z_extension_max = 1.22;  // profile extended past z=1 up to this
  ShootingTolerances shoot;
  int newton_max_iter = 30;
  double newton_tol = 1e-13;
  std::optional<double> bracket_lo;  // override bisection bracket (tests)
  std::optional<double> bracket_hi;

  std::vector<double> schedule() const;
};

struct SelfSimilarProfile {
  int dim = 1;
  double slope = 0.5;
  double P = 0;         // eigenvalue, within [P2, P1]
  double eps_floor = 0; // smallest regularization used by the schedule
  double h = 0;         // grid spacing
  std::size_t unit_index = 0;  // z[unit_index] == 1
  // Grid spans [0, 1+a], a = z.back()-1 >= 0 (extension for upper solutions).
  std::vector<double> z, Phi, Phi_p, Phi_pp;

  double extension() const { return z.back() - 1.0; }
  double phi(double zq) const { return hermite_eval(z, Phi, Phi_p, zq); }
  double phi_p(double zq) const { return hermite_eval(z, Phi_p, Phi_pp, zq); }
  double phi_pp(double zq) const { return linear_eval(z, Phi_pp, zq); }
  double z_max() const { return z.back(); }

  // Throws SolverError if any profile invariant fails at grid points.
  void validate() const;
};

SelfSimilarProfile solve_profile(int dim, double slope, const ProfileSolveConfig& cfg = {});

}  // namespace conemcf
