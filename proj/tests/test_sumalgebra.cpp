#include <random>

#include "doctest.h"
#include "telesum/parser.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;

namespace {

int NV() { return intern_symbol("N"); }
int IV() { return intern_symbol("i"); }

Domain dom_n() {
  Domain d;
  d.push(NV(), 1, std::nullopt);
  return d;
}

Expr conv(const std::string& s) { return from_ast(parse(s), dom_n()); }

AtomPtr S(const std::vector<long>& m, const Affine& arg = Affine::variable(NV())) {
  return make_nested(harmonic_word(m), arg);
}

void check_pointwise(const Expr& a, const Expr& b, long lo = 1, long hi = 30) {
  for (long n = lo; n <= hi; ++n) CHECK(a.eval({{NV(), n}}) == b.eval({{NV(), n}}));
}

// All signed index vectors of the given weight.
std::vector<std::vector<long>> indices_of_weight(long w) {
  std::vector<std::vector<long>> out;
  if (w == 0) return {{}};
  for (long first = 1; first <= w; ++first)
    for (const auto& rest : indices_of_weight(w - first))
      for (long s : {1L, -1L}) {
        std::vector<long> v{s * first};
        v.insert(v.end(), rest.begin(), rest.end());
        out.push_back(v);
      }
  return out;
}

Rational direct(const Expr& body, long lo, long hi, long n) {
  Rational acc = 0;
  for (long i = lo; i <= hi; ++i) acc += body.eval({{NV(), n}, {IV(), i}});
  return acc;
}

}  // namespace

TEST_CASE("quasi-shuffle named cases") {
  CHECK((quasi_shuffle(S({1}), S({1})) - conv("2*S[1,1](N) - S[2](N)")).is_zero());
  CHECK((quasi_shuffle(S({1}), S({2})) - conv("S[1,2](N) + S[2,1](N) - S[3](N)")).is_zero());
  CHECK((quasi_shuffle(S({-1}), S({1})) - conv("S[-1,1](N) + S[1,-1](N) - S[-2](N)")).is_zero());
  auto unit = quasi_shuffle_words(harmonic_word({2, -1}), {});
  REQUIRE(unit.size() == 1);
  CHECK(unit.begin()->first == harmonic_word({2, -1}));
  CHECK((conv("S[1](2)*S[1](2)") - conv("9/4")).is_zero());
  CHECK_THROWS_AS(quasi_shuffle(S({1}), S({1}, Affine::variable(NV()) + Affine(1L))), Unsupported);
}

TEST_CASE("quasi-shuffle agrees with the pointwise product up to weight 5") {
  std::vector<std::vector<long>> all;
  for (long w = 1; w <= 4; ++w)
    for (auto& v : indices_of_weight(w)) all.push_back(v);
  std::vector<std::vector<Rational>> val(all.size());
  for (size_t a = 0; a < all.size(); ++a)
    for (long n = 0; n <= 30; ++n) val[a].push_back(harmonic_value(all[a], n));
  long pairs = 0;
  for (size_t a = 0; a < all.size(); ++a)
    for (size_t b = 0; b < all.size(); ++b) {
      if (word_weight(harmonic_word(all[a])) + word_weight(harmonic_word(all[b])) > 5) continue;
      ++pairs;
      auto prod = quasi_shuffle_words(harmonic_word(all[a]), harmonic_word(all[b]));
      for (long n = 1; n <= 30; ++n) {
        Rational acc = 0;
        for (const auto& [w, c] : prod) {
          std::vector<long> m;
          std::vector<Rational> x;
          for (const auto& [mi, xi] : w) {
            m.push_back(mi);
            x.push_back(xi);
          }
          acc += c * ssum_value(m, x, n);
        }
        CHECK(acc == val[a][n] * val[b][n]);
      }
    }
  CHECK(pairs == 568);
}

TEST_CASE("S-sum letters contract by multiplying x") {
  Word a{{1, Rational(2)}}, b{{2, make_rational(1, 2)}};
  auto prod = quasi_shuffle_words(a, b);
  CHECK(prod.at(Word{{3, Rational(1)}}) == -1);
  for (long n = 1; n <= 12; ++n) {
    Rational acc = 0;
    for (const auto& [w, c] : prod) {
      std::vector<long> m;
      std::vector<Rational> x;
      for (const auto& [mi, xi] : w) {
        m.push_back(mi);
        x.push_back(xi);
      }
      acc += c * ssum_value(m, x, n);
    }
    CHECK(acc == ssum_value({1}, {Rational(2)}, n) * ssum_value({2}, {make_rational(1, 2)}, n));
  }
}

TEST_CASE("Lyndon factorisation") {
  CHECK(is_lyndon(harmonic_word({1, 2})));
  CHECK(!is_lyndon(harmonic_word({2, 1})));
  CHECK(!is_lyndon(harmonic_word({1, 1})));
  CHECK(is_lyndon(harmonic_word({1, 1, 2})));
  auto f = lyndon_factorization(harmonic_word({2, 1, 1, 3}));
  REQUIRE(f.size() == 2);
  CHECK(f[0] == harmonic_word({2}));
  CHECK(f[1] == harmonic_word({1, 1, 3}));
  for (size_t i = 1; i < f.size(); ++i) CHECK(compare_words(f[i - 1], f[i]) >= 0);
}

TEST_CASE("reduce_to_basis examples") {
  auto [r1, rep1] = reduce_to_basis(conv("2*S[1,1](N) - S[2](N)"), 4);
  CHECK((r1 - conv("S[1](N)^2")).is_zero());
  CHECK(rep1.eliminated.count(harmonic_word({1, 1})) == 1);

  Expr expansion = conv("S[1,2](N) + S[2,1](N) - S[3](N)");
  auto [r2, rep2] = reduce_to_basis(quasi_shuffle(S({1}), S({2})) - expansion, 4);
  CHECK(r2.is_zero());

  Expr res = conv(
      "(-N^2-N-1)/(N^2*(N+1)^3) + (-1)^N*(N^2+N+1)/(N^2*(N+1)^3) + S[1](N)/(N+1)^2 - S[2](N)/(N+1)"
      " - 2*S[-2](N)/(N+1)");
  auto [r3, rep3] = reduce_to_basis(res, 4);
  CHECK((r3 - res).is_zero());
  CHECK(rep3.eliminated.empty());
  CHECK(rep3.kept.size() == 3);

  CHECK_THROWS_AS(reduce_to_basis(conv("S[3,2](N)"), 4), Unsupported);
}

TEST_CASE("basis sums are left alone and eliminated entries hold pointwise") {
  for (long w = 1; w <= 4; ++w)
    for (const auto& m : indices_of_weight(w)) {
      Expr e = Expr::atom(S(m));
      auto [r, rep] = reduce_to_basis(e, 4);
      if (is_lyndon(harmonic_word(m))) {
        CHECK((r - e).is_zero());
      } else {
        CHECK(r.terms.size() > 0);
        for (const auto& [word, poly] : rep.eliminated) check_pointwise(poly, Expr::atom(make_nested(word, Affine::variable(NV()))));
        for (const auto& t : r.terms)
          for (const auto& [a, p] : t.mono) CHECK(is_lyndon(a->letters));
      }
    }
}

TEST_CASE("reduce_to_basis on random expressions") {
  std::mt19937 g(77);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(g); };
  std::vector<std::vector<long>> pool;
  for (long w = 1; w <= 4; ++w)
    for (auto& v : indices_of_weight(w)) pool.push_back(v);
  int N = NV();
  RatFun Nr = RatFun::variable(N);
  for (int t = 0; t < 50; ++t) {
    Expr e;
    int nterms = 1 + pick(4);
    for (int k = 0; k < nterms; ++k) {
      RatFun c = RatFun(make_rational(pick(9) - 4, 1 + pick(3))) / (Nr + RatFun(long(1 + pick(3))));
      Expr term(c);
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
    auto [r, rep] = reduce_to_basis(e, 4);
    check_pointwise(r, e);
    auto [r2, rep2] = reduce_to_basis(r, 4);
    CHECK((r2 - r).is_zero());
    CHECK(rep2.eliminated.empty());
  }
}

TEST_CASE("synchronize moves the argument by one step") {
  Affine N = Affine::variable(NV());
  for (long w = 1; w <= 4; ++w)
    for (const auto& m : indices_of_weight(w)) {
      Word word = harmonic_word(m);
      Expr lhs = synchronize_sum(word, N + Affine(1L)) - Expr::atom(make_nested(word, N));
      Term lt{RatFun::make(MPoly(1L), (N + Affine(1L)).to_mpoly().pow(static_cast<int>(word[0].first))), Kernel(), {}};
      if (word[0].second != 1) kernel_mul_power(lt.ker, word[0].second, N + Affine(1L), lt.coef);
      Word rest(word.begin() + 1, word.end());
      Expr summand = Expr::from_term(lt) * synchronize_sum(rest, N + Affine(1L));
      CHECK(is_zero_symbolic(lhs - summand, dom_n()));
    }
  CHECK((synchronize_sum(harmonic_word({1, 1}), N + Affine(1L)) -
         conv("S[1,1](N) + S[1](N)/(N+1) + 1/(N+1)^2"))
            .is_zero());
}

TEST_CASE("rational_to_harmonic examples") {
  int i = IV(), n = NV();
  Affine N = Affine::variable(n);
  RatFun I = RatFun::variable(i);
  Domain d = dom_n();
  CHECK((rational_to_harmonic(RatFun(1L) / (I + 1), 1, i, 1, N, d) - conv("S[1](N) + 1/(N+1) - 1")).is_zero());
  CHECK((rational_to_harmonic(RatFun(1L) / (I * I), 1, i, 1, N, d) - conv("S[2](N)")).is_zero());
  CHECK((rational_to_harmonic(RatFun(1L) / I, -1, i, 1, N, d) - conv("S[-1](N)")).is_zero());
  CHECK((rational_to_harmonic(RatFun(1L) / I, 2, i, 1, N, d) - conv("SS[1][2](N)")).is_zero());
  CHECK_THROWS_AS(rational_to_harmonic(RatFun(1L) / (I * I + 1), 1, i, 1, N, d), Unsupported);
  CHECK_THROWS_AS(rational_to_harmonic(RatFun(1L) / (I * 2 + 1), 1, i, 1, N, d), Unsupported);
  CHECK_THROWS_AS(rational_to_harmonic(RatFun(1L) / (I + RatFun::variable(n)), 1, i, 1, N, d), Unsupported);
}

TEST_CASE("nested sums of harmonic-class bodies") {
  int i = IV();
  Affine N = Affine::variable(NV());
  Domain d = dom_n();
  struct Case {
    const char* body;
    long lo;
  };
  for (const Case& c : {Case{"S[1](i)/(i+1)", 1}, Case{"i*S[1](i)", 1}, Case{"(-1)^i*S[2](i)/i", 1},
                        Case{"2^i*i*S[1](i)", 0}, Case{"1/((i+1)*(i+2))", 0}, Case{"S[1](i)^2/(i+2)^2", 1},
                        Case{"(i^2+N)*S[1,-1](i)/(i+3)", 1}, Case{"S[1](i+1)/i - S[2](i-1)*(-1)^i", 1},
                        Case{"(-1)^(N+i)*S[1](N)*S[1](i)/(i+1)^2", 2}, Case{"(1/2)^i*S[-1](i)*(i+1)", 1}}) {
    Domain inner = d.with_range(i, c.lo, N);
    Expr body = from_ast(parse(c.body), inner);
    auto s = nested_sum(body, i, c.lo, N, d);
    REQUIRE_MESSAGE(s, c.body);
    for (const auto& t : s->terms)
      for (const auto& [a, p] : t.mono) CHECK(a->kind == SumAtom::Kind::Nested);
    for (long n = 1; n <= 14; ++n) CHECK_MESSAGE(s->eval({{NV(), n}}) == direct(body, c.lo, n, n), c.body);
  }
  auto constant = nested_sum(conv("Factorial(N)"), i, 1, N, d);
  REQUIRE(constant);
  CHECK((*constant - conv("N*Factorial(N)")).is_zero());
  Expr fact = from_ast(parse("Factorial(i)"), d.with_range(i, 1, N));
  CHECK(!nested_sum(fact, i, 1, N, d).has_value());
}

TEST_CASE("random harmonic-class sums") {
  std::mt19937 g(5);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(g); };
  int i = IV();
  Affine N = Affine::variable(NV());
  Domain d = dom_n();
  RatFun I = RatFun::variable(i);
  std::vector<std::vector<long>> words{{}, {1}, {-1}, {2}, {1, 1}, {-2, 1}, {1, -1, 1}};
  for (int t = 0; t < 30; ++t) {
    RatFun r(make_rational(pick(7) - 3, 1));
    if (r.is_zero()) r = RatFun(1L);
    for (int k = pick(3); k > 0; --k) r *= I + RatFun(long(pick(4)));
    for (int k = pick(3); k > 0; --k) r /= I + RatFun(long(1 + pick(3)));
    Rational x = std::vector<Rational>{1, -1, 2, make_rational(1, 2)}[pick(4)];
    Term tt{r, Kernel(), {}};
    kernel_mul_power(tt.ker, x, Affine::variable(i), tt.coef);
    Expr body = Expr::from_term(tt);
    const auto& m = words[pick(static_cast<int>(words.size()))];
    if (!m.empty()) body *= Expr::atom(make_nested(harmonic_word(m), Affine::variable(i)));
    long lo = pick(2);
    auto s = nested_sum(body, i, lo, N, d);
    REQUIRE(s);
    for (long n = 1; n <= 10; ++n) CHECK(s->eval({{NV(), n}}) == direct(body, lo, n, n));
  }
}

TEST_CASE("generic sums become nested sums") {
  Expr e = conv("Sum(i,1,N, S[1](i)/(i+2)) + Sum(i,1,N, Binomial(2*i,i)/i)");
  Expr r = generic_to_nested(e, dom_n());
  int generic = 0;
  for (const auto& t : r.terms)
    for (const auto& [a, p] : t.mono) generic += a->kind == SumAtom::Kind::Generic;
  CHECK(generic == 1);
  check_pointwise(r, e, 1, 12);
}
