#include "recomb/rational.hpp"

#include <algorithm>

namespace recomb {

namespace {

using Int = Rational::Int;

Int abs128(Int x) { return x < 0 ? -x : x; }

Int gcd128(Int a, Int b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("rational arithmetic overflowed 128 bits");
  return r;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("rational arithmetic overflowed 128 bits");
  return r;
}

}  // namespace

Rational::Rational(Int num, Int den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const Int g = gcd128(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::operator+(const Rational& o) const {
  // Reduce through the gcd of the denominators before multiplying.
  const Int g = gcd128(den_, o.den_);
  const Int left = checked_mul(num_, o.den_ / g);
  const Int right = checked_mul(o.num_, den_ / g);
  return Rational(checked_add(left, right), checked_mul(den_ / g, o.den_));
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  const Int g1 = std::max<Int>(gcd128(num_, o.den_), 1);
  const Int g2 = std::max<Int>(gcd128(o.num_, den_), 1);
  return Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw InvalidArgument("rational division by zero");
  return *this * Rational(o.den_, o.num_);
}

bool Rational::operator<(const Rational& o) const {
  return (*this - o).num_ < 0;
}

double Rational::to_double() const {
  // Split off the integer part so large numerators keep their precision.
  const Int whole = num_ / den_;
  const Int rest = num_ % den_;
  return static_cast<double>(whole) + static_cast<double>(rest) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
  auto digits = [](Int x) {
    if (x == 0) return std::string("0");
    const bool negative = x < 0;
    std::string s;
    while (x != 0) {
      const int d = static_cast<int>(x % 10);
      s.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
      x /= 10;
    }
    if (negative) s.push_back('-');
    return std::string(s.rbegin(), s.rend());
  };
  return den_ == 1 ? digits(num_) : digits(num_) + "/" + digits(den_);
}

Rational::Int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Int r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    r = checked_mul(r, n - k + i) / i;
  }
  return r;
}

}  // namespace recomb
