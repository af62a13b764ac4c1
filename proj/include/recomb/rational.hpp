#pragma once

// Exact rationals on 128-bit integers. Every operation checks for overflow and
// throws instead of wrapping.

#include <cstdint>
#include <string>

#include "recomb/errors.hpp"

namespace recomb {

class Rational {
 public:
  using Int = __int128;

  constexpr Rational() = default;
  Rational(Int num, Int den = 1);

  Int numerator() const { return num_; }
  Int denominator() const { return den_; }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator<(const Rational& o) const;

  double to_double() const;
  std::string to_string() const;

 private:
  Int num_ = 0;
  Int den_ = 1;
};

/// Binomial coefficient as an exact integer; throws on overflow.
Rational::Int binomial(int n, int k);

}  // namespace recomb
