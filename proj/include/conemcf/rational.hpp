#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "conemcf/errors.hpp"

namespace conemcf {

// Exact rational arithmetic on 64-bit reduced terms with 128-bit
// intermediates; wide enough for the induction schedule up to n ~ 29.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw SolverError("rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lim = 0x7fffffffffffffffLL;
    if (n > lim || n < -lim || d > lim)
      throw SolverError("rational: overflow after reduction");
    Rational r;
    r.num = static_cast<long long>(n);
    r.den = static_cast<long long>(d);
    return r;
  }

  static Rational of(long long n, long long d = 1) { return make(n, d); }

  Rational operator+(const Rational& o) const {
    return make(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                static_cast<__int128>(den) * o.den);
  }
  Rational operator-(const Rational& o) const {
    return make(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                static_cast<__int128>(den) * o.den);
  }
  Rational operator*(const Rational& o) const {
    return make(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den);
  }
  Rational operator/(const Rational& o) const {
    if (o.num == 0) throw SolverError("rational: division by zero");
    return make(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num);
  }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
};

}  // namespace conemcf
