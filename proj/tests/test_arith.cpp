#include <random>
#include <set>

#include "doctest.h"
#include "telesum/mpoly.hpp"
#include "telesum/polynomial.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;

namespace {

Polynomial random_poly(std::mt19937& g, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg), coef(-5, 5);
  int d = deg(g);
  std::vector<Rational> c;
  for (int i = 0; i <= d; ++i) c.emplace_back(coef(g));
  if (c.back() == 0) c.back() = 1;
  return Polynomial(c);
}

Polynomial from_roots(std::initializer_list<long> roots) {
  Polynomial p = Polynomial::constant(1);
  for (long r : roots) p = p * Polynomial({-r, 1});
  return p;
}

}  // namespace

TEST_CASE("rational helpers") {
  CHECK(to_string(make_rational(22, 7)) == "22/7");
  CHECK(to_string(make_rational(-4, 2)) == "-2");
  CHECK(factorial(5) == 120);
  CHECK(binomial(Integer(4), 2) == 6);
  CHECK(power(make_rational(2, 3), -2) == make_rational(9, 4));
  auto divs = positive_divisors(Integer(12));
  CHECK(divs.size() == 6);
  CHECK(divs.back() == 12);
  auto f = factor_integer(Integer("600851475143"));
  CHECK(f.size() == 4);
}

TEST_CASE("poly_gcd examples") {
  CHECK(poly_gcd(Polynomial({-1, 0, 1}), Polynomial({-1, 1})) == Polynomial({-1, 1}));
  CHECK(poly_gcd(Polynomial({1, 0, 1}), Polynomial({1, 1})) == Polynomial({1}));
  CHECK(poly_gcd(Polynomial({-6, 0, 6}), Polynomial({4, 4})) == Polynomial({1, 1}));
  CHECK(poly_gcd(Polynomial(), Polynomial({2, 4})) == Polynomial(std::vector<Rational>{make_rational(1, 2), 1}));
}

TEST_CASE("resultant examples") {
  CHECK(resultant(Polynomial({-1, 1}), Polynomial({-2, 1})) == -1);
  CHECK(resultant(Polynomial({0, 1}), Polynomial({0, 1})) == 0);
  CHECK(resultant(Polynomial({-1, 0, 1}), Polynomial({-1, 1})) == 0);
  CHECK_THROWS(resultant(Polynomial(), Polynomial({1, 1})));
}

TEST_CASE("integer and rational roots") {
  CHECK(integer_roots(Polynomial({2, -3, 1})) == std::vector<Integer>{1, 2});
  CHECK(integer_roots(Polynomial({1, 0, 1})).empty());
  CHECK(integer_roots(Polynomial({-1, 2})).empty());
  CHECK(rational_roots(Polynomial({-1, 2})) == std::vector<Rational>{make_rational(1, 2)});
  CHECK(integer_roots(from_roots({-7, 0, 0, 12})) == std::vector<Integer>{-7, 0, 12});
  CHECK(root_multiplicity(from_roots({3, 3, 1}), 3) == 2);
  CHECK_THROWS(integer_roots(Polynomial()));
}

TEST_CASE("dispersion examples") {
  Polynomial x({0, 1});
  CHECK(dispersion(x, Polynomial({-3, 1})) == Integer(3));
  CHECK(!dispersion(x, Polynomial({1, 1})).has_value());
  CHECK(dispersion(from_roots({0, 2}), x) == Integer(0));
  CHECK(dispersion_set(from_roots({0, 5}), from_roots({2, 4})) == std::vector<Integer>{2, 4});
}

TEST_CASE("rf_normalize examples") {
  auto r = rf_normalize(Polynomial({-1, 0, 1}), Polynomial({-1, 1}));
  CHECK(r.num() == Polynomial({1, 1}));
  CHECK(r.den() == Polynomial({1}));
  auto h = rf_normalize(Polynomial({0, 2}), Polynomial({4}));
  CHECK(h.num() == Polynomial(std::vector<Rational>{0, make_rational(1, 2)}));
  CHECK(rf_normalize(Polynomial(), Polynomial({5, 1})).is_zero());
  CHECK_THROWS(rf_normalize(Polynomial({1}), Polynomial()));
}

TEST_CASE("gcd divides both inputs; resultant vanishes iff gcd nonconstant") {
  std::mt19937 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    Polynomial common = random_poly(g, 2);
    Polynomial p = random_poly(g, 4), q = random_poly(g, 4);
    if (trial % 2 == 0) {
      p = p * common;
      q = q * common;
    }
    if (p.is_zero() || q.is_zero()) continue;
    Polynomial d = poly_gcd(p, q);
    CHECK(divmod(p, d).second.is_zero());
    CHECK(divmod(q, d).second.is_zero());
    if (p.degree() > 6 || q.degree() > 6) continue;
    CHECK((resultant(p, q) == 0) == (d.degree() > 0));
  }
}

TEST_CASE("dispersion symmetry under (p,q,h) -> (q,p,-h)") {
  std::mt19937 g(5);
  std::uniform_int_distribution<int> r(-6, 6);
  for (int trial = 0; trial < 60; ++trial) {
    Polynomial p = from_roots({r(g), r(g)}), q = from_roots({r(g), r(g), r(g)});
    for (const auto& h : dispersion_set(p, q)) {
      CHECK(poly_gcd(q, p.shift(Rational(-h))).degree() > 0);
    }
  }
}

TEST_CASE("rf_normalize idempotent and evaluation preserving") {
  std::mt19937 g(9);
  std::uniform_int_distribution<int> pt(-40, 40);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial c = random_poly(g, 2);
    Polynomial n = random_poly(g, 3) * c, d = random_poly(g, 3) * c;
    if (d.is_zero()) continue;
    auto r = rf_normalize(n, d);
    auto r2 = rf_normalize(r.num(), r.den());
    CHECK(r2 == r);
    int checked = 0;
    for (int k = 0; k < 200 && checked < 20; ++k) {
      Rational x(pt(g), 1 + (k % 3));
      x.canonicalize();
      if (d(x) == 0) continue;
      CHECK(r(x) == n(x) / d(x));
      ++checked;
    }
  }
}

TEST_CASE("multivariate arithmetic and gcd") {
  int a = intern_symbol("a"), b = intern_symbol("b"), c = intern_symbol("c");
  MPoly A = MPoly::variable(a), B = MPoly::variable(b), C = MPoly::variable(c);
  MPoly f = (A + B * 2 - 1) * (A * C - B + 3);
  MPoly g = (A + B * 2 - 1) * (C * C + A);
  MPoly d = mpoly_gcd(f, g);
  CHECK(d == (A + B * 2 - 1).unit_normal());
  CHECK(mpoly_exact_div(f, d) * d == f);
  CHECK(mpoly_gcd(A * B, C + 1).is_constant());
  CHECK(!mpoly_divide(A + 1, B).has_value());
  MPoly s = (A - B + 3).pow(3) * (A + C);
  CHECK(s.subs(a, B - 3).is_zero());
  CHECK(s.eval({{a, 1}, {b, 2}, {c, 5}}) == 2 * 2 * 2 * 6);
  auto sq = squarefree_factors(s);
  REQUIRE(sq.size() == 2);
  Rational unit;
  auto split = split_factors(mpoly_scale(s, 6), &unit);
  MPoly prod = MPoly(unit);
  for (auto& [fac, m] : split) prod *= fac.pow(m);
  CHECK(prod == mpoly_scale(s, 6));
}

TEST_CASE("RatFun canonical form") {
  int a = intern_symbol("a"), b = intern_symbol("b");
  RatFun A = RatFun::variable(a), B = RatFun::variable(b);
  RatFun x = (A * A - B * B) / (A + B);
  CHECK(x == A - B);
  RatFun y = RatFun(1L) / (A * (A + 1)) + RatFun(1L) / (A + 1);
  CHECK(y == RatFun(1L) / A);
  CHECK((y - RatFun(1L) / A).is_zero());
  RatFun z = (A + B) / (A * 2 - B * 4);
  CHECK(z.den().base_lead() > 0);
  CHECK(z.eval({{a, 3}, {b, 1}}) == make_rational(4, 2));
}

TEST_CASE("affine roots") {
  int n = intern_symbol("n"), k = intern_symbol("k"), m = intern_symbol("m");
  MPoly N = MPoly::variable(n), K = MPoly::variable(k), M = MPoly::variable(m);
  MPoly p = (K - N + M - 2) * (K * 2 + N + 1).pow(2) * (K * K + N + 1);
  MPoly rest;
  auto roots = affine_roots(p, k, &rest);
  REQUIRE(roots.size() == 2);
  int total = 0;
  for (auto& r : roots) total += r.multiplicity;
  CHECK(total == 3);
  CHECK(rest.degree(k) == 2);
}

TEST_CASE("nullspace over rational functions") {
  int t = intern_symbol("t");
  RatFun T = RatFun::variable(t);
  std::vector<std::vector<RatFun>> rows = {{T, RatFun(1L), T + 1}, {T * T, T, T * T + T}};
  auto basis = nullspace(rows, 3);
  REQUIRE(basis.size() == 2);
  for (auto& v : basis)
    for (auto& row : rows) {
      RatFun acc;
      for (size_t i = 0; i < 3; ++i) acc += row[i] * v[i];
      CHECK(acc.is_zero());
    }
}

TEST_CASE("root finding agrees with a brute-force scan") {
  std::mt19937 g(99);
  std::uniform_int_distribution<int> root(-40, 40), den(1, 4), cnt(1, 5);
  for (int t = 0; t < 200; ++t) {
    Polynomial p = Polynomial::constant(make_rational(1 + (t % 7), 1) * (t % 2 ? -1 : 1));
    std::set<Integer> ints;
    std::set<Rational> rats;
    for (int i = 0, m = cnt(g); i < m; ++i) {
      Rational r = make_rational(root(g), den(g));
      p *= Polynomial({-r, Rational(1)});
      rats.insert(r);
      if (is_integer(r)) ints.insert(r.get_num());
    }
    if (t % 3 == 0) p *= Polynomial{3, 0, 1};
    auto ir = integer_roots(p);
    CHECK(std::set<Integer>(ir.begin(), ir.end()) == ints);
    for (long x = -45; x <= 45; ++x) CHECK((p(Rational(x)) == 0) == (ints.count(x) > 0));
    auto rr = rational_roots(p);
    CHECK(std::set<Rational>(rr.begin(), rr.end()) == rats);
  }
}
