#pragma once

// Dense univariate polynomials with exact rational coefficients, and the
// gcd / resultant / root / dispersion kernels built on top of them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "telesum/rational.hpp"

namespace telesum {

class Polynomial {
 public:
  Polynomial() = default;
  // Coefficients from the constant term upwards; trailing zeros are dropped.
  explicit Polynomial(std::vector<Rational> coeffs);
  Polynomial(std::initializer_list<long> coeffs);

  static Polynomial constant(const Rational& c);
  static Polynomial monomial(const Rational& c, int degree);
  static Polynomial x() { return monomial(1, 1); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  Rational coeff(int i) const;
  const Rational& leading() const;

  Rational operator()(const Rational& at) const;
  Polynomial shift(const Rational& h) const;  // p(x + h)
  Polynomial compose_linear(const Rational& a, const Rational& b) const;  // p(a x + b)
  Polynomial derivative() const;
  Polynomial monic() const;

  // Rational content: the positive rational c with p/c integral and primitive.
  Rational content() const;
  Polynomial primitive_part() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  std::string str(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Quotient and remainder of Euclidean division; throws on division by zero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);
// Exact quotient; throws std::domain_error when b does not divide a.
Polynomial exact_div(const Polynomial& a, const Polynomial& b);
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b);

// Monic gcd via a primitive pseudo-remainder sequence. gcd(0, 0) = 0.
Polynomial poly_gcd(const Polynomial& p, const Polynomial& q);
Polynomial poly_lcm(const Polynomial& p, const Polynomial& q);
Polynomial squarefree_part(const Polynomial& p);

// Determinant of the Sylvester matrix. Throws on a zero input.
Rational resultant(const Polynomial& p, const Polynomial& q);

// res_x(p(x), q(x + h)) as a polynomial in h.
Polynomial shifted_resultant(const Polynomial& p, const Polynomial& q);

// Distinct integer roots in ascending order. Throws on the zero polynomial.
std::vector<Integer> integer_roots(const Polynomial& p);
// Distinct rational roots in ascending order. Throws on the zero polynomial.
std::vector<Rational> rational_roots(const Polynomial& p);
// Multiplicity of the root r of p.
int root_multiplicity(const Polynomial& p, const Rational& r);

// All h >= 0 with gcd(p(x), q(x + h)) nonconstant, ascending.
std::vector<Integer> dispersion_set(const Polynomial& p, const Polynomial& q);
// Largest element of dispersion_set, if any.
std::optional<Integer> dispersion(const Polynomial& p, const Polynomial& q);

class RationalFunction {
 public:
  RationalFunction() : den_(Polynomial::constant(1)) {}
  RationalFunction(const Polynomial& p) : num_(p), den_(Polynomial::constant(1)) {}  // NOLINT
  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  Rational operator()(const Rational& at) const;
  RationalFunction shift(const Rational& h) const;

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  std::string str(const std::string& var = "x") const;

 private:
  friend RationalFunction rf_normalize(const Polynomial& num, const Polynomial& den);
  Polynomial num_;
  Polynomial den_;
};

// Reduced form with monic denominator. Throws std::domain_error if den = 0.
RationalFunction rf_normalize(const Polynomial& num, const Polynomial& den);

// Fraction-free determinant (Bareiss) over a ring with exact division.
template <class R, class ExactDiv>
R bareiss_determinant(std::vector<std::vector<R>> m, const R& zero, const R& one, ExactDiv div) {
  const size_t n = m.size();
  if (n == 0) return one;
  R prev = one;
  bool negate = false;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == zero) {
      size_t swap = k + 1;
      while (swap < n && m[swap][k] == zero) ++swap;
      if (swap == n) return zero;
      std::swap(m[k], m[swap]);
      negate = !negate;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        m[i][j] = div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
      }
      m[i][k] = zero;
    }
    prev = m[k][k];
  }
  R det = m[n - 1][n - 1];
  if (negate) det = zero - det;
  return det;
}

}  // namespace telesum
