#pragma once

// Multivariate polynomials over Q in recursive dense form, and reduced
// quotients of them. Variable ids come from symbols.hpp; a larger id is a
// "more main" variable.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "telesum/polynomial.hpp"
#include "telesum/rational.hpp"

namespace telesum {

class MPoly {
 public:
  MPoly() = default;
  MPoly(const Rational& c) : c_(c) {}  // NOLINT
  MPoly(long c) : c_(c) {}             // NOLINT
  static MPoly variable(int v);
  static MPoly var_power(int v, int k);
  // sum_k coeffs[k] * v^k, coefficients may involve any variable.
  static MPoly from_coeffs(int v, const std::vector<MPoly>& coeffs);
  static MPoly from_univariate(const Polynomial& p, int v);

  bool is_zero() const { return var_ < 0 && c_ == 0; }
  bool is_constant() const { return var_ < 0; }
  const Rational& constant_value() const { return c_; }
  int main_var() const { return var_; }
  // Degree in the main variable (0 for constants).
  int degree() const { return var_ < 0 ? 0 : static_cast<int>(co_.size()) - 1; }
  int degree(int v) const;
  int total_degree() const;
  // Coefficient of main_var^k.
  const MPoly& coeff(int k) const;
  // Coefficients with respect to an arbitrary variable, low to high.
  std::vector<MPoly> coeffs_in(int v) const;
  MPoly lead_coeff(int v) const;
  // Leading rational coefficient following the recursive main-variable order.
  Rational base_lead() const;

  bool has_var(int v) const;
  std::set<int> vars() const;
  void collect_vars(std::set<int>& out) const;

  Rational eval(const std::map<int, Rational>& env) const;
  MPoly subs(int v, const Rational& value) const;
  MPoly subs(int v, const MPoly& value) const;
  MPoly subs(const std::map<int, Rational>& env) const;
  MPoly shift(int v, const Rational& h) const { return subs(v, variable(v) + MPoly(h)); }

  // Positive rational c with this/c integral and primitive (1 for zero).
  Rational content_q() const;
  // this/content_q with positive base_lead.
  MPoly unit_normal() const;

  MPoly operator-() const;
  friend MPoly operator+(const MPoly& a, const MPoly& b);
  friend MPoly operator-(const MPoly& a, const MPoly& b);
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  MPoly& operator+=(const MPoly& o) { return *this = *this + o; }
  MPoly& operator-=(const MPoly& o) { return *this = *this - o; }
  MPoly& operator*=(const MPoly& o) { return *this = *this * o; }
  MPoly pow(int k) const;

  friend bool operator==(const MPoly& a, const MPoly& b);
  friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }
  // Total order, only meaningful for canonical containers.
  static int compare(const MPoly& a, const MPoly& b);

  // Univariate view; throws if other variables are present.
  Polynomial to_univariate(int v) const;

  std::string str() const;
  size_t size() const;  // number of nonzero base coefficients

 private:
  MPoly(int v, std::vector<MPoly> co) : var_(v), co_(std::move(co)) { normalize(); }
  void normalize();
  friend MPoly mpoly_scale(const MPoly& a, const Rational& c);
  friend std::optional<MPoly> mpoly_divide(const MPoly& a, const MPoly& b);
  friend MPoly mpoly_prem(const MPoly& a, const MPoly& b, int v);

  int var_ = -1;
  Rational c_;
  std::vector<MPoly> co_;
};

MPoly mpoly_scale(const MPoly& a, const Rational& c);
// Exact quotient over Q when b divides a.
std::optional<MPoly> mpoly_divide(const MPoly& a, const MPoly& b);
MPoly mpoly_exact_div(const MPoly& a, const MPoly& b);
// Pseudo-remainder with respect to v.
MPoly mpoly_prem(const MPoly& a, const MPoly& b, int v);
// Unit-normal gcd (see MPoly::unit_normal). gcd(0,0) = 0.
MPoly mpoly_gcd(const MPoly& a, const MPoly& b);
// gcd of the coefficients with respect to v.
MPoly mpoly_content(const MPoly& a, int v);
MPoly mpoly_derivative(const MPoly& a, int v);
// Nonzero terms as ((var, exponent) list with var descending, coefficient),
// in printing order.
std::vector<std::pair<std::vector<std::pair<int, int>>, Rational>> mpoly_terms(const MPoly& p);

class RatFun {
 public:
  RatFun() : den_(1) {}
  RatFun(const Rational& c) : num_(c), den_(1) {}  // NOLINT
  RatFun(long c) : num_(c), den_(1) {}             // NOLINT
  RatFun(const MPoly& p) : num_(p), den_(1) {}     // NOLINT
  static RatFun make(const MPoly& num, const MPoly& den);
  static RatFun variable(int v) { return RatFun(MPoly::variable(v)); }
  // Caller guarantees gcd(num, den) = 1; only the unit is normalised.
  static RatFun from_coprime(MPoly num, MPoly den);

  const MPoly& num() const { return num_; }
  const MPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
  bool has_var(int v) const { return num_.has_var(v) || den_.has_var(v); }
  std::set<int> vars() const;

  Rational eval(const std::map<int, Rational>& env) const;
  RatFun subs(int v, const Rational& value) const;
  RatFun subs(int v, const MPoly& value) const;
  RatFun subs(const std::map<int, Rational>& env) const;
  RatFun shift(int v, const Rational& h) const { return subs(v, MPoly::variable(v) + MPoly(h)); }

  RatFun operator-() const;
  friend RatFun operator+(const RatFun& a, const RatFun& b);
  friend RatFun operator-(const RatFun& a, const RatFun& b);
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  friend RatFun operator/(const RatFun& a, const RatFun& b);
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
  RatFun& operator/=(const RatFun& o) { return *this = *this / o; }
  RatFun pow(int k) const;
  RatFun inverse() const;

  friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }
  static int compare(const RatFun& a, const RatFun& b);

  std::string str() const;

 private:
  MPoly num_;
  MPoly den_;
};

// A linear factor v - root with root affine-free of v, found together with
// its multiplicity.
struct AffineRoot {
  MPoly root;
  int multiplicity = 0;
};

// Roots of p (as a polynomial in v) that are polynomials of total degree <= 1
// in the other variables. `rest` receives p divided by all found factors.
std::vector<AffineRoot> affine_roots(const MPoly& p, int v, MPoly* rest = nullptr);

// Square-free factors with multiplicities (unit-normal factors, rational
// constant returned separately).
std::vector<std::pair<MPoly, int>> squarefree_factors(const MPoly& p, Rational* unit = nullptr);

// Factorisation into unit-normal factors that are of degree 1 in some variable
// where possible; leftover factors are square-free but otherwise unsplit.
std::vector<std::pair<MPoly, int>> split_factors(const MPoly& p, Rational* unit = nullptr);

// Basis of the right nullspace of a matrix with entries in Q(vars).
std::vector<std::vector<RatFun>> nullspace(std::vector<std::vector<RatFun>> rows, size_t ncols);

}  // namespace telesum
