#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "conemcf/errors.hpp"
#include "conemcf/interp.hpp"

namespace conemcf {

// Contact-slope function k(u): eps-periodic in the contact position, valued in
// (0,1). Built either from a closed form or from samples over one period.
class AngleFunction {
 public:
  static AngleFunction constant(double k) {
    check_range(k, k);
    AngleFunction a;
    a.kind_ = Kind::Constant;
    a.k0_ = a.ksup_ = k;
    a.period_ = 0.0;  // no oscillation scale
    return a;
  }

  // k(u) = k0 + (ksup-k0) * (1 + sin(2*pi*u/eps)) / 2; attains both extrema.
  static AngleFunction sinusoidal(double k0, double ksup, double period) {
    check_range(k0, ksup);
    if (!(period > 0)) throw SolverError("angle period must be positive");
    AngleFunction a;
    a.kind_ = Kind::Sinusoid;
    a.k0_ = k0;
    a.ksup_ = ksup;
    a.period_ = period;
    return a;
  }

  // Samples of one period, u in [0, period]; interpolated linearly, wrapped
  // periodically. First/last sample values must agree.
  static AngleFunction from_samples(std::vector<double> u, std::vector<double> k,
                                    double period) {
    if (!(period > 0)) throw SolverError("angle period must be positive");
    if (u.size() != k.size() || u.size() < 2)
      throw SolverError("angle samples: need matching u,k arrays with >= 2 rows");
    for (std::size_t i = 1; i < u.size(); ++i)
      if (!(u[i] > u[i - 1])) throw SolverError("angle samples: u must be increasing");
    if (u.front() != 0.0 || std::abs(u.back() - period) > 1e-12 * period)
      throw SolverError("angle samples must span [0, period]");
    if (std::abs(k.front() - k.back()) > 1e-9)
      throw SolverError("angle samples: k(0) != k(period), not periodic");
    double lo = k[0], hi = k[0];
    for (double v : k) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    check_range(lo, hi);
    AngleFunction a;
    a.kind_ = Kind::Samples;
    a.k0_ = lo;
    a.ksup_ = hi;
    a.period_ = period;
    a.us_ = std::move(u);
    a.ks_ = std::move(k);
    return a;
  }

  double operator()(double u) const {
    switch (kind_) {
      case Kind::Constant:
        return k0_;
      case Kind::Sinusoid: {
        if (ksup_ == k0_) return k0_;
        const double s = std::sin(2.0 * M_PI * u / period_);
        return k0_ + (ksup_ - k0_) * 0.5 * (1.0 + s);
      }
      case Kind::Samples: {
        double w = std::fmod(u, period_);
        if (w < 0) w += period_;
        return linear_eval(us_, ks_, w);
      }
    }
    return k0_;
  }

  double k0() const { return k0_; }
  double ksup() const { return ksup_; }
  double period() const { return period_; }  // 0 for constant angles
  bool is_constant() const { return kind_ == Kind::Constant || ksup_ == k0_; }

 private:
  static void check_range(double lo, double hi) {
    if (!(0 < lo && lo <= hi && hi < 1))
      throw SolverError("contact slope must satisfy 0 < k0 <= ksup < 1");
  }

  enum class Kind { Constant, Sinusoid, Samples };
  Kind kind_ = Kind::Constant;
  double k0_ = 0.5, ksup_ = 0.5, period_ = 0.0;
  std::vector<double> us_, ks_;
};

}  // namespace conemcf
