#include <random>

#include "doctest.h"
#include "telesum/gosper.hpp"
#include "telesum/parser.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;

namespace {

int J() { return intern_symbol("j"); }
int NV() { return intern_symbol("n"); }

Domain dom_jn() {
  Domain d;
  d.push(NV(), 0, std::nullopt);
  d.push(J(), 0, Affine::variable(NV()));
  return d;
}

HypergeometricTerm hyp(const std::string& s) { return make_hypergeometric(from_ast(parse(s), dom_jn()), J()); }

Rational direct_sum(const HypergeometricTerm& f, long lo, long hi, const Env& base) {
  Rational acc = 0;
  Env env = base;
  for (long j = lo; j <= hi; ++j) {
    env[f.var] = j;
    acc += f.term.eval(env);
  }
  return acc;
}

}  // namespace

TEST_CASE("dispersion with parameters") {
  int k = J(), n = NV();
  MPoly K = MPoly::variable(k), Nn = MPoly::variable(n);
  CHECK(dispersion_set_in(K, K - MPoly(3L), k) == std::vector<Integer>{3});
  CHECK(dispersion_set_in(K, K + MPoly(1L), k).empty());
  CHECK(dispersion_set_in(K * (K - MPoly(2L)), K, k) == std::vector<Integer>{0});
  CHECK(dispersion_set_in(K + Nn, K + Nn - MPoly(4L), k) == std::vector<Integer>{4});
  CHECK(dispersion_set_in(K + Nn, K - Nn, k).empty());
}

TEST_CASE("Gosper form invariants") {
  int k = J(), n = NV();
  RatFun K = RatFun::variable(k), Nn = RatFun::variable(n);
  for (const RatFun& rho : {(K + 3) / K, (Nn - K) / (K + 1), (K + 1) * (K + 1) / ((K + 4) * (K + Nn)),
                            RatFun(2L) * (K + 2) / (K - 5)}) {
    GosperForm g = gosper_form(rho, k);
    RatFun back = RatFun::make(g.a, g.b) * RatFun::make(g.c.shift(k, 1), g.c);
    CHECK(back == rho);
    CHECK(dispersion_set_in(g.a, g.b, k).empty());
  }
}

TEST_CASE("Gosper examples") {
  int k = J();
  RatFun K = RatFun::variable(k);

  auto a = gosper(hyp("j*Factorial(j)"));
  REQUIRE(a);
  CHECK(a->ratio == RatFun(1L) / K);

  auto f2 = hyp("1/(j*(j+1))");
  auto b = gosper(f2);
  REQUIRE(b);
  // g = R f = -1/j
  CHECK(b->ratio * RatFun::make(MPoly(1L), (K * (K + 1)).num()) == RatFun(-1L) / K);

  CHECK(!gosper(hyp("Binomial(n,j)")));
  CHECK(!gosper(hyp("1/j")));
}

TEST_CASE("telescope_definite examples") {
  int a = intern_symbol("a");
  Domain d;
  d.push(a, 0, std::nullopt);
  auto f1 = hyp("j*Factorial(j)");
  auto s1 = telescope_definite(f1, 1, Affine::variable(a), d);
  REQUIRE(s1);
  for (long x = 1; x <= 8; ++x) CHECK(s1->eval({{a, x}}) == direct_sum(f1, 1, x, {}));
  CHECK((*s1 - from_ast(parse("Factorial(a+1) - 1"), d)).is_zero());

  auto f2 = hyp("1/(j*(j+1))");
  auto s2 = telescope_definite(f2, 1, Affine::variable(a), d);
  REQUIRE(s2);
  CHECK((*s2 - from_ast(parse("1 - 1/(a+1)"), d)).is_zero());

  auto s3 = telescope_definite(f2, 5, Affine(4L), d);
  REQUIRE(s3);
  CHECK(s3->is_zero());

  // Partial sums with a parameter, ten consecutive upper bounds.
  auto f3 = hyp("(-1)^j*Binomial(n,j)");
  int n = NV();
  auto s4 = telescope_definite(f3, 0, Affine::variable(a), [&] {
    Domain e;
    e.push(n, 1, std::nullopt);
    e.push(a, 0, Affine::variable(n));
    return e;
  }());
  REQUIRE(s4);
  for (long nn = 3; nn <= 5; ++nn)
    for (long x = 0; x < nn && x < 10; ++x) CHECK(s4->eval({{n, nn}, {a, x}}) == direct_sum(f3, 0, x, {{n, nn}}));
}

TEST_CASE("randomized round trip") {
  std::mt19937 g(2024);
  auto pick = [&](int m) { return std::uniform_int_distribution<int>(0, m - 1)(g); };
  int k = J(), n = NV();
  RatFun K = RatFun::variable(k);
  const char* bases[] = {"Factorial(j)", "2^j", "Binomial(n,j)", "(-1)^j*Factorial(2*j)/Factorial(j)",
                         "Pochhammer(n+1,j)/Factorial(j)", "3^j/Factorial(j+2)"};
  int recovered = 0;
  for (int t = 0; t < 100; ++t) {
    // Random R of degree <= 3.
    auto randpoly = [&](int deg) {
      RatFun p;
      for (int i = 0; i <= deg; ++i) p += RatFun(make_rational(pick(7) - 3, 1 + pick(2))) * K.pow(i);
      if (pick(3) == 0) p += RatFun::variable(n);
      return p;
    };
    RatFun num = randpoly(pick(4)), den = randpoly(pick(3));
    if (num.is_zero() || den.is_zero()) {
      --t;
      continue;
    }
    RatFun R = num / den;
    auto f = hyp(bases[t % 6]);
    RatFun rho = f.shift_quotient();
    RatFun diff = R.shift(k, 1) * rho - R;  // (F(k+1) - F(k)) / f(k)
    if (diff.is_zero()) continue;
    HypergeometricTerm F{f.term.scaled(diff), k};
    auto cert = gosper(F);
    REQUIRE(cert);
    CHECK(certificate_holds(F.shift_quotient(), cert->ratio, k));
    ++recovered;
  }
  CHECK(recovered >= 90);
}

TEST_CASE("parameterized Gosper finds the binomial recurrence") {
  int k = J(), n = NV();
  auto f = hyp("Binomial(n,j)");
  RatFun rho = f.shift_quotient();
  // f(n+1,j)/f(n,j) = (n+1)/(n+1-j)
  RatFun Nn = RatFun::variable(n), K = RatFun::variable(k);
  RatFun q1 = (Nn + 1) / (Nn + 1 - K);
  auto sols = parameterized_gosper(rho, {RatFun(1L), q1}, k);
  REQUIRE(sols.size() == 1);
  RatFun ratio = sols[0].c[1] / sols[0].c[0];
  CHECK(ratio == RatFun(make_rational(-1, 2)));
  // Certificate identity rho R(k+1) - R(k) = c0 + c1 q1.
  CHECK(rho * sols[0].ratio.shift(k, 1) - sols[0].ratio == sols[0].c[0] + sols[0].c[1] * q1);
}
