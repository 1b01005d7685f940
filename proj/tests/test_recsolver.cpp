#include "doctest.h"
#include "telesum/parser.hpp"
#include "telesum/recsolver.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;

namespace {

int NV() { return intern_symbol("N"); }
int JV() { return intern_symbol("j"); }
int RV() { return intern_symbol("r"); }

Affine A(int v) { return Affine::variable(v); }
RatFun V(int v) { return RatFun::variable(v); }

LinearRecurrence make_rec(int n, std::vector<RatFun> c, Expr rhs = Expr()) {
  LinearRecurrence r;
  r.var = n;
  r.coeffs = std::move(c);
  r.rhs = std::move(rhs);
  return r;
}

// sum_i c_i(n) y(n+i) - rhs(n) at the given point, y evaluated directly.
Rational residual_at(const LinearRecurrence& rec, const Expr& y, Env env) {
  Rational acc = -rec.rhs.eval(env);
  for (size_t i = 0; i < rec.coeffs.size(); ++i) {
    Env e = env;
    e[rec.var] += static_cast<long>(i);
    acc += rec.coeffs[i].eval(to_rational_env(env)) * y.eval(e);
  }
  return acc;
}

bool has_atoms(const Expr& e) {
  for (const auto& t : e.terms)
    if (!t.mono.empty()) return true;
  return false;
}

}  // namespace

TEST_CASE("polynomial solutions") {
  int n = NV();
  RatFun x = V(n);
  auto s = polynomial_solutions(make_rec(n, {RatFun(-1L), RatFun(1L)}, Expr(x * 2 + 1)));
  REQUIRE(s.particular);
  CHECK(s.homogeneous.size() == 1);
  CHECK(!(*s.particular - Expr(x * x)).has_var(n));

  auto s2 = polynomial_solutions(make_rec(n, {RatFun(1L), RatFun(-2L), RatFun(1L)}));
  CHECK(s2.homogeneous.size() == 2);
  CHECK(!s2.particular);

  // (n+1) y(n+1) - n y(n) = 0 has no nonzero polynomial solution.
  auto s3 = polynomial_solutions(make_rec(n, {-x, x + 1}));
  CHECK(s3.homogeneous.empty());
  CHECK(s3.complete);
}

TEST_CASE("rational solutions") {
  int n = NV();
  RatFun x = V(n);
  auto s = rational_solutions(make_rec(n, {-x, x + 1}));
  REQUIRE(s.homogeneous.size() == 1);
  RatFun h = s.homogeneous[0].terms.at(0).coef;
  CHECK((h * x).is_constant());

  auto s2 = rational_solutions(make_rec(n, {RatFun(-1L), RatFun(1L)}, Expr(-(x * (x + 1)).inverse())));
  REQUIRE(s2.particular);
  CHECK(!(*s2.particular - Expr(x.inverse())).has_var(n));

  // y(n+2) - y(n) = -2/(n(n+2)): 1/n is a solution.
  RatFun rhs = RatFun(-2L) / (x * (x + 2));
  auto s3 = rational_solutions(make_rec(n, {RatFun(-1L), RatFun(0L), RatFun(1L)}, Expr(rhs)));
  REQUIRE(s3.particular);
  Domain d;
  d.push(n, 1, std::nullopt);
  for (long v = 1; v <= 12; ++v)
    CHECK(residual_at(make_rec(n, {RatFun(-1L), RatFun(0L), RatFun(1L)}, Expr(rhs)), *s3.particular, {{n, v}}) == 0);
  CHECK(!(*s3.particular - Expr(x.inverse())).has_var(n));
}

TEST_CASE("hypergeometric solutions") {
  int n = NV();
  RatFun x = V(n);
  Domain d;
  d.push(n, 0, std::nullopt);

  bool complete = false;
  auto two = hypergeometric_solutions(make_rec(n, {RatFun(-2L), RatFun(1L)}), d, &complete);
  REQUIRE(two.size() == 1);
  CHECK(complete);
  for (long v = 0; v <= 10; ++v) CHECK(two[0].term.eval({{n, v}}) == Rational(Integer(1) << v));

  auto fact = hypergeometric_solutions(make_rec(n, {-(x + 1), RatFun(1L)}), d, &complete);
  REQUIRE(fact.size() == 1);
  for (long v = 0; v <= 10; ++v) CHECK(fact[0].term.eval({{n, v}}) == Rational(factorial(v)));

  auto fib = hypergeometric_solutions(make_rec(n, {RatFun(-1L), RatFun(-1L), RatFun(1L)}), d, &complete);
  CHECK(fib.empty());
  CHECK(complete);

  auto two_roots = hypergeometric_solutions(make_rec(n, {RatFun(2L), RatFun(-3L), RatFun(1L)}), d, &complete);
  CHECK(two_roots.size() == 2);

  // Solutions n! and 2^n on n >= 2.
  Domain d2;
  d2.push(n, 2, std::nullopt);
  LinearRecurrence mixed = make_rec(n, {x * (x + 1) * 2, -(x * x + x * 3 - 2), x - 1});
  auto sols = hypergeometric_solutions(mixed, d2, &complete);
  CHECK(sols.size() == 2);
  for (const auto& h : sols)
    for (long v = 2; v <= 10; ++v) CHECK(residual_at(mixed, h.term, {{n, v}}) == 0);
}

TEST_CASE("first-order inhomogeneous recurrence gives a harmonic sum") {
  int n = NV();
  RatFun x = V(n);
  Domain d;
  d.push(n, 1, std::nullopt);
  auto s = dalembertian_solutions(make_rec(n, {RatFun(-1L), RatFun(1L)}, Expr((x + 1).inverse())), d);
  CHECK(s.complete);
  REQUIRE(s.particular);
  REQUIRE(s.homogeneous.size() == 1);
  Expr want = from_ast(parse("S[1](N) - 1"), d);
  CHECK(is_zero_nested(*s.particular - want, d));
}

TEST_CASE("stubbed hypergeometric finder leaves the set incomplete") {
  int n = NV();
  Domain d;
  d.push(n, 0, std::nullopt);
  HypergeometricFinder none = [](const LinearRecurrence&, const Domain&, bool* c) {
    if (c) *c = false;
    return std::vector<HypergeometricTerm>{};
  };
  auto s = dalembertian_solutions(make_rec(n, {RatFun(-2L), RatFun(1L)}), d, none);
  CHECK(!s.complete);
  CHECK(s.homogeneous.empty());
}

TEST_CASE("second-order d'Alembertian solutions") {
  int n = NV();
  RatFun x = V(n);
  Domain d;
  d.push(n, 1, std::nullopt);
  LinearRecurrence rec = make_rec(n, {RatFun(1L), RatFun(-2L), RatFun(1L)}, Expr((x + 1).inverse()));
  auto s = dalembertian_solutions(rec, d);
  CHECK(s.complete);
  REQUIRE(s.particular);
  CHECK(s.homogeneous.size() == 2);
  for (long v = 1; v <= 12; ++v) {
    CHECK(residual_at(rec, *s.particular, {{n, v}}) == 0);
    for (const auto& h : s.homogeneous) CHECK(residual_at(make_rec(n, rec.coeffs), h, {{n, v}}) == 0);
  }
  CHECK(recurrence_residual(rec, *s.particular, d).is_zero());
  SolutionSet t = simplify_solution_depth(s, d);
  for (long v = 1; v <= 12; ++v) CHECK(t.particular->eval({{n, v}}) == s.particular->eval({{n, v}}));

  // Product solutions 2^n and a sum over them.
  LinearRecurrence rec2 = make_rec(n, {RatFun(2L), RatFun(-3L), RatFun(1L)}, Expr(x));
  auto s2 = dalembertian_solutions(rec2, d);
  REQUIRE(s2.particular);
  for (long v = 1; v <= 12; ++v) CHECK(residual_at(rec2, *s2.particular, {{n, v}}) == 0);
}

TEST_CASE("innermost recurrence of the triple sum") {
  int N = NV(), j = JV(), r = RV();
  Domain d;
  d.push(N, 2, std::nullopt);
  d.push(j, 0, A(N) - Affine(2L));
  d.push(r, 0, A(j) + Affine(1L));
  RatFun Nn = V(N), J = V(j), R = V(r);
  LinearRecurrence rec = make_rec(r, {-J + Nn + R - 1, J - R + 1}, Expr((-J + Nn + R).inverse()));
  auto s = dalembertian_solutions(rec, d);
  CHECK(s.complete);
  REQUIRE(s.particular);
  REQUIRE(s.homogeneous.size() == 1);
  CHECK(!has_atoms(*s.particular));
  const Expr& H = s.homogeneous[0];

  auto poch = [](const Rational& a, long k) {
    Rational p = 1;
    for (long t = 0; t < k; ++t) p *= a + t;
    return p;
  };
  auto inner = [&](long nn, long jj, long rr) {
    NodePtr f = parse("Sum(s,0,N+r-j-2,(-1)^s*Binomial(N+r-j-2,s)/((N-s)*(s+1)))");
    return evaluate(f, {{N, nn}, {j, jj}, {r, rr}});
  };
  for (auto [nn, jj] : std::vector<std::pair<long, long>>{{4, 0}, {4, 1}, {5, 2}, {6, 3}, {7, 5}}) {
    Rational c0 = inner(nn, jj, 0);
    Rational cref = (nn % 2 == 0 ? 1 : -1) * Rational(factorial(jj + 1)) /
                      (Rational((nn - 1) * nn * (nn + 1)) * poch(Rational(2 - nn), jj));
    for (long rr = 0; rr <= jj + 1; ++rr) {
      Env env{{N, nn}, {j, jj}, {r, rr}};
      Rational pr = poch(Rational(-jj + nn - 1), rr) / poch(Rational(-jj - 1), rr);
      CHECK(H.eval(env) == pr);
      CHECK(s.particular->eval(env) + c0 * pr == inner(nn, jj, rr));
      CHECK(Rational(1) / ((nn + 1) * (nn + rr - jj - 1)) + cref * pr == inner(nn, jj, rr));
    }
  }
}

TEST_CASE("indefinite sums split by kernel class") {
  int N = NV(), j = JV();
  Domain d;
  d.push(N, 3, std::nullopt);
  d.push(j, 0, A(N) - Affine(2L));
  Expr T = from_ast(parse("Binomial(N,j) * (N-2*j)/N + (-1)^j/(Factorial(N-j)*Factorial(j+1)*(N-j-1))"), d);
  Expr s = indefinite_sum(T, j, 0, A(j), d);
  bool generic = false;
  for (const auto& t : s.terms)
    for (const auto& [a, e] : t.mono)
      if (a->kind == SumAtom::Kind::Generic) generic = true;
  CHECK(generic);
  for (long nn = 3; nn <= 9; ++nn)
    for (long jj = 0; jj <= nn - 2; ++jj) {
      Rational want = 0;
      for (long i = 0; i <= jj; ++i) want += T.eval({{N, nn}, {j, i}});
      CHECK(s.eval({{N, nn}, {j, jj}}) == want);
    }
}
