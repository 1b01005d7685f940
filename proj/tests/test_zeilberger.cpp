#include "doctest.h"
#include "telesum/parser.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"
#include "telesum/zeilberger.hpp"

using namespace telesum;

namespace {

int NV() { return intern_symbol("N"); }
int JV() { return intern_symbol("j"); }
int RV() { return intern_symbol("r"); }
int SV() { return intern_symbol("s"); }

Affine A(int v) { return Affine::variable(v); }

// sum_{k=lo}^{hi} f at the point env (k bound inside).
Rational direct(const Expr& f, int k, const Affine& lo, const Affine& hi, Env env) {
  Rational acc = 0;
  Integer a = lo.eval(env), b = hi.eval(env);
  for (Integer x = a; x <= b; ++x) {
    env[k] = x;
    acc += f.eval(env);
  }
  return acc;
}

// Checks sum_i c_i F(n+i) = rhs at the given points.
void check_recurrence(const LinearRecurrence& rec, const Expr& f, int k, const Affine& lo, const Affine& hi,
                      const std::vector<Env>& points) {
  for (Env env : points) {
    Rational lhs = 0;
    for (size_t i = 0; i < rec.coeffs.size(); ++i) {
      Env e = env;
      e[rec.var] += static_cast<long>(i);
      lhs += rec.coeffs[i].eval(to_rational_env(env)) * direct(f, k, lo, hi, e);
    }
    CHECK(lhs == rec.rhs.eval(env));
  }
}

}  // namespace

TEST_CASE("binomial sums") {
  int n = NV(), j = JV();
  Domain d;
  d.push(n, 0, std::nullopt);
  d.push(j, 0, A(n));
  Expr f = from_ast(parse("Binomial(N,j)"), d);
  auto rec = creative_telescoping(f, n, j, d);
  REQUIRE(rec);
  CHECK(rec->order() == 1);
  CHECK(rec->coeffs[0] / rec->coeffs[1] == RatFun(-2L));
  CHECK(rec->lower_orders_fail);
  LinearRecurrence lr = sum_recurrence(0, A(n), *rec, d);
  CHECK(lr.rhs.is_zero());
  std::vector<Env> pts;
  for (long x = 0; x <= 10; ++x) pts.push_back({{n, x}});
  check_recurrence(lr, f, j, 0, A(n), pts);

  Expr f2 = from_ast(parse("Binomial(N,j)^2"), d);
  auto rec2 = creative_telescoping(f2, n, j, d);
  REQUIRE(rec2);
  CHECK(rec2->order() == 1);
  RatFun Nn = RatFun::variable(n);
  CHECK(rec2->coeffs[0] / rec2->coeffs[1] == -(Nn * 4 + 2) / (Nn + 1));
  LinearRecurrence lr2 = sum_recurrence(0, A(n), *rec2, d);
  CHECK(lr2.rhs.is_zero());
  check_recurrence(lr2, f2, j, 0, A(n), pts);
}

TEST_CASE("innermost sum of the triple sum") {
  int N = NV(), j = JV(), r = RV(), s = SV();
  Domain d;
  d.push(N, 2, std::nullopt);
  d.push(j, 0, A(N) - Affine(2L));
  d.push(r, 0, A(j) + Affine(1L));
  Affine hi = A(N) + A(r) - A(j) - Affine(2L);
  d.push(s, 0, hi);
  Expr f = from_ast(parse("(-1)^s*Binomial(N+r-j-2,s)/((N-s)*(s+1))"), d);
  auto rec = creative_telescoping(f, r, s, d);
  REQUIRE(rec);
  CHECK(rec->order() == 1);
  RatFun Nn = RatFun::variable(N), J = RatFun::variable(j), R = RatFun::variable(r);
  RatFun c0 = -J + Nn + R - 1, c1 = J - R + 1;
  CHECK(rec->coeffs[0] / rec->coeffs[1] == c0 / c1);
  LinearRecurrence lr = sum_recurrence(0, hi, *rec, d);
  RatFun unit = rec->coeffs[1] / c1;
  CHECK((lr.rhs - Expr(unit / (-J + Nn + R))).is_zero());
  std::vector<Env> pts;
  for (long nn = 3; nn <= 6; ++nn)
    for (long jj = 0; jj <= nn - 2; ++jj)
      for (long rr = 0; rr <= jj; ++rr) pts.push_back({{N, nn}, {j, jj}, {r, rr}});
  check_recurrence(lr, f, s, 0, hi, pts);
}

TEST_CASE("plain telescoping in the harmonic class") {
  int j = JV();
  Domain d;
  d.push(j, 1, std::nullopt);
  auto delta_is = [&](const Expr& g, const Expr& f) {
    return is_zero_nested(synchronize(shift(g, j, 1), d) - g - f, d);
  };
  Expr f1 = from_ast(parse("S[1](j)"), d);
  auto g1 = plain_telescoping_tower(f1, j, d);
  REQUIRE(g1);
  CHECK(delta_is(*g1, f1));
  Expr want = from_ast(parse("j*S[1](j) - j"), d);
  CHECK(!(*g1 - want).has_var(j));

  Expr f2 = from_ast(parse("1/(j*(j+1))"), d);
  auto g2 = plain_telescoping_tower(f2, j, d);
  REQUIRE(g2);
  CHECK(delta_is(*g2, f2));
  CHECK(!(*g2 - from_ast(parse("-1/j"), d)).has_var(j));

  Expr f3 = from_ast(parse("1/j"), d);
  auto g3 = plain_telescoping_tower(f3, j, d);
  REQUIRE(g3);
  CHECK(delta_is(*g3, f3));
  CHECK((*g3 - from_ast(parse("S[1](j) - 1/j"), d)).is_zero());

  Expr f4 = from_ast(parse("S[1](j)^2 + S[2](j)/(j+1)"), d);
  auto g4 = plain_telescoping_tower(f4, j, d);
  REQUIRE(g4);
  CHECK(delta_is(*g4, f4));
}

TEST_CASE("creative telescoping with a harmonic sum in the summand") {
  int n = NV(), j = JV();
  Domain d;
  d.push(n, 0, std::nullopt);
  d.push(j, 0, A(n));
  Expr f = from_ast(parse("Binomial(N,j)*S[1](j)"), d);
  auto rec = creative_telescoping(f, n, j, d, 3);
  REQUIRE(rec);
  LinearRecurrence lr = sum_recurrence(0, A(n), *rec, d);
  std::vector<Env> pts;
  for (long x = 0; x <= 8; ++x) pts.push_back({{n, x}});
  check_recurrence(lr, f, j, 0, A(n), pts);
}

TEST_CASE("shift of a sum whose body depends on the shifted variable") {
  int N = NV(), j = JV();
  Domain d;
  d.push(N, 3, std::nullopt);
  d.push(j, 0, A(N) - Affine(2L));
  for (const char* s : {"Sum(i,1,j, (-1)^i/(Factorial(N-i)*Factorial(i+1)*(N-i-1)))",
                        "Sum(i,1,N-2, (-1)^i/(Factorial(N-i)*Factorial(i+1)*(N-i-1)))",
                        "Sum(i,0,j, Binomial(N,i))*Factorial(N)"}) {
    Expr e = from_ast(parse(s), d);
    Expr e1 = shift_in(e, N, 1, d);
    Expr e2 = shift_in(e, N, 2, d);
    for (long nn = 3; nn <= 8; ++nn)
      for (long jj = 0; jj <= nn - 2; ++jj) {
        Env env{{N, nn}, {j, jj}};
        CHECK(e1.eval(env) == evaluate(parse(s), {{N, nn + 1}, {j, jj}}));
        CHECK(e2.eval(env) == evaluate(parse(s), {{N, nn + 2}, {j, jj}}));
      }
  }
}

TEST_CASE("two kernel classes share the unknowns") {
  int N = NV(), r = RV();
  Domain d;
  d.push(N, 2, std::nullopt);
  d.push(r, 0, A(N));
  Expr f = from_ast(parse("Binomial(N,r) + 2^r*Binomial(N,r)"), d);
  auto rec = creative_telescoping(f, N, r, d);
  REQUIRE(rec);
  LinearRecurrence lr = sum_recurrence(0, A(N), *rec, d);
  std::vector<Env> pts;
  for (long x = 2; x <= 10; ++x) pts.push_back({{N, x}});
  check_recurrence(lr, f, r, 0, A(N), pts);
}
