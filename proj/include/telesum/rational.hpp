#pragma once

// Arbitrary-precision integers and rationals (GMP) plus the few helpers the
// rest of the library keeps reaching for.

#include <gmpxx.h>

#include <string>
#include <vector>

namespace telesum {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::string to_string(const Integer& z);
std::string to_string(const Rational& q);

Integer factorial(long n);
Integer binomial(const Integer& n, long k);

// Rational power with integer exponent; throws std::domain_error on 0^negative.
Rational power(const Rational& base, long exponent);

// Positive divisors of |n| (n != 0), ascending.
std::vector<Integer> positive_divisors(const Integer& n);

// Prime factorisation of |n| > 0 as (prime, multiplicity) pairs.
std::vector<std::pair<Integer, unsigned>> factor_integer(const Integer& n);

}  // namespace telesum
