// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "telesum/gosper.hpp"
#include "telesum/parser.hpp"
#include "telesum/pipeline.hpp"
#include "telesum/render.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;

namespace {

const char* kTriple =
    "Sum(j,0,N-2, Sum(r,0,j+1, Sum(s,0,N+r-j-2, (-1)^(r+s) * Binomial(j+1,r) * Binomial(N+r-j-2,s) * "
    "Factorial(N-j-2) * Factorial(r) / ((N-s)*(s+1)*Factorial(N+r-j)))))";
const char* kCentral = "Sum(j,1,N-2, j*(j+1)*(j+2)*(N-j)*Factorial(j-1)^2*Factorial(N-j-1)^2/(N-j-1))";
const char* kExpected =
    "(-N^2-N-1)/(N^2*(N+1)^3) + (-1)^N*(N^2+N+1)/(N^2*(N+1)^3) + S[1](N)/(N+1)^2 - S[2](N)/(N+1) - "
    "2*S[-2](N)/(N+1)";

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void need(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

int NV() { return intern_symbol("N"); }

// Independent exact helpers on GMP integers.
Integer binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return b;
}

Integer fact(long n) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

Rational frac(const Integer& a, const Integer& b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

Rational poch(const Rational& a, long k) {
  Rational p = 1;
  for (long t = 0; t < k; ++t) p *= a + t;
  return p;
}

Rational sgn(long e) { return e % 2 == 0 ? Rational(1) : Rational(-1); }

// F0(N, j, r) = sum_s (-1)^s binom(N+r-j-2, s)/((N-s)(s+1)).
Rational inner(long N, long j, long r) {
  Rational acc = 0;
  for (long s = 0; s <= N + r - j - 2; ++s) acc += sgn(s) * Rational(binom(N + r - j - 2, s)) / ((N - s) * (s + 1));
  return acc;
}

Rational triple(long N) {
  Rational acc = 0;
  for (long j = 0; j <= N - 2; ++j)
    for (long r = 0; r <= j + 1; ++r)
      acc += sgn(r) * frac(binom(j + 1, r) * fact(N - j - 2) * fact(r), fact(N + r - j)) * inner(N, j, r);
  return acc;
}

Rational central(long N) {
  Rational acc = 0;
  for (long j = 1; j <= N - 2; ++j)
    acc += frac(j * (j + 1) * (j + 2) * (N - j) * fact(j - 1) * fact(j - 1) * fact(N - j - 1) * fact(N - j - 1),
                Integer(N - j - 1));
  return acc;
}

Rational harmonic(long m, long N) {
  Rational acc = 0;
  for (long i = 1; i <= N; ++i) {
    Rational t = Rational(1) / Rational(power(Rational(i), std::abs(m)));
    acc += m < 0 ? sgn(i) * t : t;
  }
  return acc;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RatFun ratfun_of(const std::string& s) {
  auto r = as_ratfun(parse(s));
  if (!r) throw Failure("not a rational function: " + s);
  return *r;
}

// ---------------------------------------------------------------------------

std::string ac1() {
  auto t0 = std::chrono::steady_clock::now();
  NodePtr s = parse(kTriple);
  need(oracle(s, {{NV(), 2}}) == Rational(1, 4), "oracle F(2)");
  need(oracle(s, {{NV(), 3}}) == Rational(23, 144), "oracle F(3)");
  need(triple(2) == Rational(1, 4) && triple(3) == Rational(23, 144), "direct F(2), F(3)");
  auto [cf, tr] = simplify(s);
  VerifyReport rep = verify(cf, s, 2, 30);
  need(rep.ok() && rep.points.size() == 29, "oracle agreement on N = 2..30");
  for (long n = 2; n <= 12; ++n) need(evaluate(cf.ast, {{NV(), n}}) == triple(n), "direct summation");
  NodePtr want = parse(kExpected);
  need(render_plain(cf.ast) == render_plain(want), "structural match: " + render_plain(cf.ast));
  double secs = seconds_since(t0);
  need(secs < 60, "runtime");
  std::ostringstream os;
  os << render_plain(cf.ast) << "; N=2..30 exact; " << secs << " s";
  return os.str();
}

std::string ac2() {
  int N = NV(), j = intern_symbol("j"), r = intern_symbol("r"), s = intern_symbol("s");
  Domain d;
  d.push(N, 2, std::nullopt);
  d.push(j, 0, Affine::variable(N) - Affine(2L));
  d.push(r, 0, Affine::variable(j) + Affine(1L));
  Affine hi = Affine::variable(N) + Affine::variable(r) - Affine::variable(j) - Affine(2L);
  Domain ds = d.with_range(s, 0, hi);
  Expr f = from_ast(parse("(-1)^s*Binomial(N+r-j-2,s)/((N-s)*(s+1))"), ds);
  auto sr = creative_telescoping(f, r, s, ds, 5);
  need(sr.has_value(), "no summand recurrence in r");
  LinearRecurrence lr = sum_recurrence(0, hi, *sr, ds);
  need(lr.order() == 1, "inner order");
  RatFun Nr = RatFun::variable(N), J = RatFun::variable(j), R = RatFun::variable(r);
  RatFun want = (-J + Nr + R - RatFun(1L)) / (J - R + RatFun(1L));
  need(lr.coeffs[0] / lr.coeffs[1] == want, "inner coefficients not proportional");
  int checked = 0;
  for (auto [nn, jj, rr] : std::vector<std::tuple<long, long, long>>{
           {4, 0, 0}, {4, 1, 0}, {4, 1, 1}, {5, 2, 1}, {6, 3, 2}, {7, 4, 3}, {8, 5, 0}, {9, 6, 4}}) {
    Env env{{N, nn}, {j, jj}, {r, rr}};
    auto renv = to_rational_env(env);
    Rational lhs = lr.coeffs[0].eval(renv) * inner(nn, jj, rr) + lr.coeffs[1].eval(renv) * inner(nn, jj, rr + 1);
    need(lhs == lr.rhs.eval(env), "inner recurrence fails numerically");
    ++checked;
  }

  auto [cf, tr] = simplify(parse(kTriple));
  const LayerRecord* outer = nullptr;
  for (const auto& l : tr.layers)
    if (l.var == "j" && l.depth == 0 && l.recurrence_var == "N") outer = &l;
  need(outer && outer->coefficients.size() == 2, "outer recurrence missing");
  RatFun o0 = ratfun_of(outer->coefficients[0]), o1 = ratfun_of(outer->coefficients[1]);
  need(o0 / o1 == (Nr + RatFun(1L)) / (-Nr - RatFun(2L)), "outer coefficients not proportional");
  // The simplified outer right-hand side, checked on direct sums.
  NodePtr rhs = parse(
      "4*(-1)^N/(N^2*(N+2)^2) + (-N^3-4*N^2-8*N-4)/(N^2*(N+1)^2*(N+2)^2) + S[1](N)/((N+1)*(N+2))");
  for (long n = 2; n <= 10; ++n)
    need((n + 1) * triple(n) - (n + 2) * triple(n + 1) == evaluate(rhs, {{N, n}}), "outer recurrence rhs");
  return "inner " + std::to_string(checked) + " points; outer " + outer->recurrence;
}

std::string ac3() {
  int N = NV(), j = intern_symbol("j"), r = intern_symbol("r");
  Domain d;
  d.push(N, 2, std::nullopt);
  d.push(j, 0, Affine::variable(N) - Affine(2L));
  d.push(r, 0, Affine::variable(j) + Affine(1L));
  RatFun Nn = RatFun::variable(N), J = RatFun::variable(j), R = RatFun::variable(r);
  LinearRecurrence rec{r, {-J + Nn + R - RatFun(1L), J - R + RatFun(1L)}, Expr((-J + Nn + R).inverse())};
  SolutionSet sol = dalembertian_solutions(rec, d);
  need(sol.complete && sol.particular && sol.homogeneous.size() == 1, "solution set");
  need(recurrence_residual(rec, *sol.particular, d).is_zero(), "particular solution");
  const Expr& H = sol.homogeneous[0];
  // A particular solution whose constant has the closed form c below.
  Expr p1((Nn + RatFun(1L)).inverse() * (Nn + R - J - RatFun(1L)).inverse());
  need(recurrence_residual(rec, p1, d).is_zero(), "1/((N+1)(N+r-j-1)) is a particular solution");
  int points = 0;
  for (auto [nn, jj] : std::vector<std::pair<long, long>>{{4, 0}, {4, 1}, {5, 2}, {6, 3}}) {
    Rational c = sgn(nn) * Rational(fact(jj + 1)) / (Rational((nn - 1) * nn * (nn + 1)) * poch(Rational(2 - nn), jj));
    Rational c0 = inner(nn, jj, 0);
    for (long rr = 0; rr <= jj + 1; ++rr) {
      Env env{{N, nn}, {j, jj}, {r, rr}};
      Rational pr = poch(Rational(-jj + nn - 1), rr) / poch(Rational(-jj - 1), rr);
      need(H.eval(env) == pr, "Pochhammer ratio");
      need(p1.eval(env) + c * pr == inner(nn, jj, rr), "closed-form constant c");
      need(sol.particular->eval(env) + c0 * pr == inner(nn, jj, rr), "computed general solution");
      ++points;
    }
  }
  return "H = (-j+N-1)_r/(-j-1)_r and c checked at " + std::to_string(points) + " points";
}

std::string ac4() {
  NodePtr s = parse(kCentral);
  auto [cf, tr] = simplify(s);
  VerifyReport rep = verify(cf, s, 3, 20);
  need(rep.ok() && rep.points.size() == 18, "oracle agreement on N = 3..20");
  for (long n = 3; n <= 20; ++n) need(evaluate(cf.ast, {{NV(), n}}) == central(n), "direct summation");
  // A sum from 1 to N whose summand is binomial(2i,i)/i.
  bool found = false;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& e) {
    if (e->kind == NodeKind::Sum && e->a == Affine(1L) && e->b == Affine::variable(NV())) {
      bool same = true;
      for (long i = 1; i <= 12 && same; ++i)
        same = evaluate(e->kids[0], {{e->var, i}}) == frac(binom(2 * i, i), Integer(i));
      found |= same;
    }
    for (const auto& k : e->kids) walk(k);
  };
  walk(cf.ast);
  need(found, "no sum of binomial(2i,i)/i in " + render_plain(cf.ast));
  return render_plain(cf.ast) + "; N=3..20 exact";
}

std::vector<std::vector<long>> indices_of_weight(long w) {
  if (w == 0) return {{}};
  std::vector<std::vector<long>> out;
  for (long first = 1; first <= w; ++first)
    for (const auto& rest : indices_of_weight(w - first))
      for (long sg : {1L, -1L}) {
        std::vector<long> v{sg * first};
        v.insert(v.end(), rest.begin(), rest.end());
        out.push_back(v);
      }
  return out;
}

Rational word_value(const Word& w, long n) {
  std::vector<long> m;
  std::vector<Rational> x;
  for (const auto& [mi, xi] : w) {
    m.push_back(mi);
    x.push_back(xi);
  }
  return ssum_value(m, x, n);
}

std::string ac5() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<long>> all;
  for (long w = 1; w <= 4; ++w)
    for (auto& v : indices_of_weight(w)) all.push_back(v);
  long pairs = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      Word wa = harmonic_word(a), wb = harmonic_word(b);
      if (word_weight(wa) + word_weight(wb) > 5) continue;
      ++pairs;
      auto prod = quasi_shuffle_words(wa, wb);
      for (long n = 1; n <= 30; ++n) {
        Rational acc = 0;
        for (const auto& [w, c] : prod) acc += c * word_value(w, n);
        need(acc == harmonic_value(a, n) * harmonic_value(b, n), "pointwise product");
      }
    }
  Domain dom;
  dom.push(NV(), 1, std::nullopt);
  auto S = [&](std::vector<long> m) { return make_nested(harmonic_word(m), Affine::variable(NV())); };
  auto conv = [&](const char* t) { return from_ast(parse(t), dom); };
  need((quasi_shuffle(S({1}), S({1})) - conv("2*S[1,1](N) - S[2](N)")).is_zero(), "S1^2");
  need((quasi_shuffle(S({1}), S({2})) - conv("S[1,2](N) + S[2,1](N) - S[3](N)")).is_zero(), "S1*S2");
  for (long n = 1; n <= 30; ++n)
    need(harmonic(1, n) * harmonic(1, n) == 2 * harmonic_value({1, 1}, n) - harmonic(2, n), "S1^2 pointwise");
  double secs = seconds_since(t0);
  need(secs < 10, "runtime");
  std::ostringstream os;
  os << pairs << " pairs, N=1..30, " << secs << " s";
  return os.str();
}

std::string ac6() {
  int j = intern_symbol("j"), n = intern_symbol("n");
  Domain d;
  d.push(n, 0, std::nullopt);
  d.push(j, 0, Affine::variable(n));
  auto hyp = [&](const char* t) { return make_hypergeometric(from_ast(parse(t), d), j); };
  RatFun K = RatFun::variable(j);
  auto a = gosper(hyp("j*Factorial(j)"));
  need(a && a->ratio == RatFun(1L) / K, "j*j! certificate");
  auto f2 = hyp("1/(j*(j+1))");
  auto b = gosper(f2);
  need(b && certificate_holds(f2.shift_quotient(), b->ratio, j), "1/(j(j+1)) certificate");
  need(!gosper(hyp("Binomial(n,j)")), "binomial(n,j) has no certificate");
  need(!gosper(hyp("1/j")), "1/j has no certificate");

  std::mt19937 g(2024);
  auto pick = [&](int m) { return std::uniform_int_distribution<int>(0, m - 1)(g); };
  const char* bases[] = {"Factorial(j)", "2^j", "Binomial(n,j)", "(-1)^j*Factorial(2*j)/Factorial(j)",
                         "Pochhammer(n+1,j)/Factorial(j)", "3^j/Factorial(j+2)"};
  int done = 0;
  while (done < 100) {
    auto randpoly = [&](int deg) {
      RatFun p;
      for (int i = 0; i <= deg; ++i) p += RatFun(make_rational(pick(7) - 3, 1 + pick(2))) * K.pow(i);
      if (pick(3) == 0) p += RatFun::variable(n);
      return p;
    };
    RatFun num = randpoly(pick(4)), den = randpoly(pick(3));
    if (num.is_zero() || den.is_zero()) continue;
    RatFun R = num / den;
    auto f = hyp(bases[done % 6]);
    RatFun diff = R.shift(j, 1) * f.shift_quotient() - R;
    if (diff.is_zero()) continue;
    HypergeometricTerm F{f.term.scaled(diff), j};
    auto cert = gosper(F);
    need(cert.has_value(), "round trip lost its certificate");
    need(certificate_holds(F.shift_quotient(), cert->ratio, j), "certificate identity");
    ++done;
  }
  return "4 examples, 100 round trips";
}

std::string ac7() {
  int n = NV();
  RatFun x = RatFun::variable(n);
  Domain d;
  d.push(n, 0, std::nullopt);
  bool complete = false;
  auto two = hypergeometric_solutions(LinearRecurrence{n, {RatFun(-2L), RatFun(1L)}, Expr()}, d, &complete);
  need(two.size() == 1 && complete, "2^N");
  for (long v = 0; v <= 20; ++v) need(two[0].term.eval({{n, v}}) == Rational(Integer(1) << v), "2^N values");
  auto fa = hypergeometric_solutions(LinearRecurrence{n, {-(x + RatFun(1L)), RatFun(1L)}, Expr()}, d, &complete);
  need(fa.size() == 1, "N!");
  for (long v = 0; v <= 20; ++v) need(fa[0].term.eval({{n, v}}) == Rational(fact(v)), "N! values");
  auto fib =
      hypergeometric_solutions(LinearRecurrence{n, {RatFun(-1L), RatFun(-1L), RatFun(1L)}, Expr()}, d, &complete);
  need(fib.empty() && complete, "Fibonacci has no hypergeometric solution");

  LinearRecurrence h{n, {RatFun(-1L), RatFun(1L)}, Expr((x + RatFun(1L)).inverse())};
  SolutionSet sol = dalembertian_solutions(h, d);
  Expr F = match_initial_values(sol, n, {Expr()}, d);
  need(recurrence_residual(h, F, d).is_zero(), "S1 substitution");
  need(render_plain(to_ast(F)) == "S[1](N)", "S1 form");
  for (long v = 0; v <= 20; ++v) need(F.eval({{n, v}}) == harmonic(1, v), "S1 values");
  return "2^N, N!, Fibonacci none, S[1](N)";
}

std::string ac8() {
  Domain dom;
  dom.push(NV(), 1, std::nullopt);
  auto S = [&](const std::vector<long>& m) { return make_nested(harmonic_word(m), Affine::variable(NV())); };
  auto conv = [&](const char* t) { return from_ast(parse(t), dom); };
  auto [zero, rz] = reduce_to_basis(quasi_shuffle(S({1}), S({2})) - conv("S[1,2](N) + S[2,1](N) - S[3](N)"), 4);
  need(zero.is_zero(), "cancellation example");

  std::mt19937 g(77);
  auto pick = [&](int m) { return std::uniform_int_distribution<int>(0, m - 1)(g); };
  std::vector<std::vector<long>> pool;
  for (long w = 1; w <= 4; ++w)
    for (auto& v : indices_of_weight(w)) pool.push_back(v);
  RatFun Nr = RatFun::variable(NV());
  for (int t = 0; t < 50; ++t) {
    Expr e;
    int nterms = 1 + pick(4);
    for (int k = 0; k < nterms; ++k) {
      Expr term(RatFun(make_rational(pick(9) - 4, 1 + pick(3))) / (Nr + RatFun(long(1 + pick(3)))));
      long budget = 4;
      int nf = 1 + pick(2);
      for (int f = 0; f < nf; ++f) {
        const auto& m = pool[pick(static_cast<int>(pool.size()))];
        long w = word_weight(harmonic_word(m));
        if (w > budget) continue;
        budget -= w;
        term *= Expr::atom(S(m));
      }
      if (pick(2)) term *= conv("(-1)^N");
      e += term;
    }
    auto [r1, rep1] = reduce_to_basis(e, 4);
    for (long n = 1; n <= 30; ++n) need(r1.eval({{NV(), n}}) == e.eval({{NV(), n}}), "value preserving");
    auto [r2, rep2] = reduce_to_basis(r1, 4);
    need((r2 - r1).is_zero(), "idempotent");
  }
  return "50 random expressions, cancellation gives 0";
}

std::string ac9() {
  // Every shipped example either verifies exactly or is reported UNSOLVED.
  const char* examples[] = {kTriple,
                            kCentral,
                            "Sum(j,0,N,Binomial(N,j))",
                            "Sum(j,1,N,1/j)",
                            "Sum(k,0,N,Binomial(N,k)^2)",
                            "Sum(k,0,N,(-1)^k*Binomial(N,k)/(k+1))",
                            "Sum(k,1,N,S[1](k)/k)",
                            "Sum(k,0,N,Binomial(N,k)^3)"};
  int solved = 0, unsolved = 0;
  for (const char* text : examples) {
    NodePtr s = parse(text);
    try {
      auto [cf, tr] = simplify(s);
      VerifyReport rep = verify(cf, s, cf.valid_from, cf.valid_from + 28);
      need(rep.ok(), std::string("wrong answer for ") + text);
      ++solved;
    } catch (const Unsolved&) {
      ++unsolved;
    }
  }
  std::ostringstream os;
  os << "the original three-loop inputs (about 1000 sums, 768 multi-sums, the combined S-sum expressions and the "
        "weight-8 tables) are not published and are not reproduced; substitute: property suites AC5-AC8 and "
        "no-wrong-answers on "
     << solved << " solved + " << unsolved << " UNSOLVED examples";
  return os.str();
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    try {
      std::string detail = fn();
      std::cout << name << " PASS " << detail << std::endl;
    } catch (const std::exception& e) {
      ++failed;
      std::cout << name << " FAIL " << e.what() << std::endl;
    }
  }
  return failed == 0 ? 0 : 1;
}
