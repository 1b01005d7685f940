#include "telesum/sumalgebra.hpp"

#include <algorithm>
#include <set>

#include "telesum/gosper.hpp"

namespace telesum {

int compare_letters(const Letter& a, const Letter& b) {
  if (a.first != b.first) return a.first < b.first ? -1 : 1;
  int c = cmp(a.second, b.second);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int compare_words(const Word& a, const Word& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = compare_letters(a[i], b[i])) return c;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

long word_weight(const Word& w) {
  long s = 0;
  for (const auto& l : w) s += l.first;
  return s;
}

std::string word_str(const Word& w) {
  std::string s = "[";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += "(" + std::to_string(w[i].first) + "," + to_string(w[i].second) + ")";
  }
  return s + "]";
}

Word harmonic_word(const std::vector<long>& m) {
  Word w;
  for (long x : m) w.emplace_back(x < 0 ? -x : x, Rational(x < 0 ? -1 : 1));
  return w;
}

// ---------------------------------------------------------------------------
// Quasi-shuffle

namespace {

void add_to(WordCombination& acc, const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = acc.emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) acc.erase(it);
  }
}

WordCombination prepend(const Letter& l, const WordCombination& c) {
  WordCombination out;
  for (const auto& [w, k] : c) {
    Word v;
    v.reserve(w.size() + 1);
    v.push_back(l);
    v.insert(v.end(), w.begin(), w.end());
    out.emplace(std::move(v), k);
  }
  return out;
}

WordCombination mul_combination(const WordCombination& a, const WordCombination& b) {
  WordCombination out;
  for (const auto& [u, cu] : a)
    for (const auto& [v, cv] : b)
      for (const auto& [w, cw] : quasi_shuffle_words(u, v)) add_to(out, w, cu * cv * cw);
  return out;
}

}  // namespace

WordCombination quasi_shuffle_words(const Word& a, const Word& b) {
  if (a.empty()) return {{b, Rational(1)}};
  if (b.empty()) return {{a, Rational(1)}};
  static std::map<std::pair<Word, Word>, WordCombination> memo;
  auto key = compare_words(a, b) <= 0 ? std::make_pair(a, b) : std::make_pair(b, a);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  Word ta(a.begin() + 1, a.end()), tb(b.begin() + 1, b.end());
  WordCombination out;
  for (const auto& [w, c] : prepend(a[0], quasi_shuffle_words(ta, b))) add_to(out, w, c);
  for (const auto& [w, c] : prepend(b[0], quasi_shuffle_words(a, tb))) add_to(out, w, c);
  Letter ab{a[0].first + b[0].first, a[0].second * b[0].second};
  for (const auto& [w, c] : prepend(ab, quasi_shuffle_words(ta, tb))) add_to(out, w, -c);
  memo.emplace(std::move(key), out);
  return out;
}

namespace {

Expr combination_at(const WordCombination& c, const Affine& arg) {
  Expr out;
  for (const auto& [w, k] : c) {
    Expr t = w.empty() ? Expr(RatFun(1L)) : Expr::atom(make_nested(w, arg));
    out += t.scaled(RatFun(k));
  }
  return out;
}

}  // namespace

Expr quasi_shuffle(const AtomPtr& a, const AtomPtr& b) {
  if (a->kind != SumAtom::Kind::Nested || b->kind != SumAtom::Kind::Nested || a->arg != b->arg)
    throw Unsupported("quasi-shuffle needs nested sums with one argument");
  return combination_at(quasi_shuffle_words(a->letters, b->letters), a->arg);
}

Expr linearize_products(const Expr& e) {
  Expr out;
  for (const auto& t : e.terms) {
    // Group nested atoms by argument.
    std::map<Affine, WordCombination> groups;
    Monomial rest;
    bool any = false;
    for (const auto& [a, p] : t.mono) {
      if (a->kind != SumAtom::Kind::Nested || p < 0) {
        rest.emplace_back(a, p);
        continue;
      }
      auto [it, fresh] = groups.emplace(a->arg, WordCombination{{Word{}, Rational(1)}});
      if (!fresh || p > 1) any = true;
      for (int i = 0; i < p; ++i) it->second = mul_combination(it->second, {{a->letters, Rational(1)}});
    }
    if (!any) {
      out.terms.push_back(t);
      continue;
    }
    Term base{t.coef, t.ker, {}};
    Expr te = Expr::from_term(base);
    for (const auto& [a, p] : rest) te *= Expr::atom(a, p);
    for (const auto& [arg, c] : groups) te *= combination_at(c, arg);
    out.terms.insert(out.terms.end(), te.terms.begin(), te.terms.end());
  }
  return out.canon();
}

bool is_zero_nested(const Expr& e, const Domain& dom) {
  return linearize_products(synchronize(e, dom)).is_zero();
}

// ---------------------------------------------------------------------------
// Lyndon words

std::vector<Word> lyndon_factorization(const Word& w) {
  std::vector<Word> out;
  size_t n = w.size(), i = 0;
  while (i < n) {
    size_t j = i + 1, k = i;
    while (j < n && compare_letters(w[k], w[j]) <= 0) {
      k = compare_letters(w[k], w[j]) < 0 ? i : k + 1;
      ++j;
    }
    while (i <= k) {
      out.emplace_back(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i + j - k));
      i += j - k;
    }
  }
  return out;
}

bool is_lyndon(const Word& w) { return !w.empty() && lyndon_factorization(w).size() == 1; }

namespace {

// Polynomial in Lyndon words: sorted multisets of words -> coefficient.
using LyndonPoly = std::map<std::vector<Word>, Rational>;

void add_poly(LyndonPoly& acc, const LyndonPoly& p, const Rational& c) {
  for (const auto& [m, k] : p) {
    Rational v = acc[m] + c * k;
    if (v == 0)
      acc.erase(m);
    else
      acc[m] = v;
  }
}

std::vector<Word> sorted_words(std::vector<Word> ws) {
  std::sort(ws.begin(), ws.end(), WordLess());
  return ws;
}

const LyndonPoly& reduce_word(const Word& w) {
  static std::map<Word, LyndonPoly, WordLess> memo;
  static std::set<Word, WordLess> active;
  if (auto it = memo.find(w); it != memo.end()) return it->second;
  LyndonPoly res;
  auto f = lyndon_factorization(w);
  if (f.size() <= 1) {
    res[{w}] = 1;
  } else {
    if (!active.insert(w).second) throw std::logic_error("Lyndon reduction does not terminate at " + word_str(w));
    WordCombination prod{{f[0], Rational(1)}};
    for (size_t i = 1; i < f.size(); ++i) prod = mul_combination(prod, {{f[i], Rational(1)}});
    auto self = prod.find(w);
    if (self == prod.end()) throw std::logic_error("Lyndon product misses its word " + word_str(w));
    Rational c = self->second;
    res[sorted_words(f)] = 1 / c;
    for (const auto& [u, k] : prod)
      if (compare_words(u, w) != 0) add_poly(res, reduce_word(u), -k / c);
    active.erase(w);
  }
  return memo.emplace(w, std::move(res)).first->second;
}

Expr poly_at(const LyndonPoly& p, const Affine& arg) {
  Expr out;
  for (const auto& [ws, c] : p) {
    Expr t{RatFun(c)};
    for (const auto& w : ws) t *= Expr::atom(make_nested(w, arg));
    out += t;
  }
  return out;
}

}  // namespace

std::pair<Expr, BasisReport> reduce_to_basis(const Expr& e, int weight_cap) {
  BasisReport rep;
  std::set<Word, WordLess> kept;
  Expr out;
  for (const auto& t : e.terms) {
    Expr te = Expr::from_term(Term{t.coef, t.ker, {}});
    for (const auto& [a, p] : t.mono) {
      if (a->kind != SumAtom::Kind::Nested) {
        te *= Expr::atom(a, p);
        continue;
      }
      if (a->weight() > weight_cap)
        throw Unsupported("nested sum of weight " + std::to_string(a->weight()) + " above the cap " +
                          std::to_string(weight_cap));
      if (is_lyndon(a->letters)) {
        te *= Expr::atom(a, p);
        continue;
      }
      if (p < 0) throw Unsupported("negative power of a nested sum");
      Expr r = poly_at(reduce_word(a->letters), a->arg);
      rep.eliminated.emplace(a->letters, r);
      for (int i = 0; i < p; ++i) te *= r;
    }
    out += te;
  }
  for (const auto& t : out.terms)
    for (const auto& [a, p] : t.mono)
      if (a->kind == SumAtom::Kind::Nested) kept.insert(a->letters);
  rep.kept.assign(kept.begin(), kept.end());
  return {out, rep};
}

Expr synchronize_sum(const Word& w, const Affine& arg) {
  if (w.empty()) return Expr(RatFun(1L));
  return synchronize(Expr::atom(make_nested(w, arg)), Domain());
}

// ---------------------------------------------------------------------------
// Indefinite sums into the nested class

namespace {

struct Pole {
  Integer c;  // factor var + c
  int m;
  RatFun a;
};

struct PartialFractions {
  RatFun poly;  // polynomial in var
  std::vector<Pole> poles;
};

std::optional<PartialFractions> partial_fractions(const RatFun& r, int var) {
  PartialFractions out;
  if (!r.den().has_var(var)) {
    out.poly = r;
    return out;
  }
  MPoly rest;
  auto roots = affine_roots(r.den(), var, &rest);
  if (rest.has_var(var)) return std::nullopt;
  RatFun remaining = r;
  MPoly X = MPoly::variable(var);
  for (const auto& root : roots) {
    if (!root.root.is_constant() || !is_integer(root.root.constant_value())) return std::nullopt;
    Rational alpha = root.root.constant_value();
    int m = root.multiplicity;
    RatFun g = r * RatFun((X - MPoly(alpha)).pow(m));
    RatFun h = g.shift(var, alpha);  // expansion point at var = 0
    auto nc = h.num().coeffs_in(var), dc = h.den().coeffs_in(var);
    std::vector<RatFun> s;
    for (int j = 0; j < m; ++j) {
      RatFun v = j < static_cast<int>(nc.size()) ? RatFun(nc[j]) : RatFun();
      for (int l = 1; l <= j; ++l)
        if (l < static_cast<int>(dc.size())) v -= RatFun(dc[l]) * s[j - l];
      s.push_back(v / RatFun(dc[0]));
    }
    for (int j = 0; j < m; ++j) {
      if (s[j].is_zero()) continue;
      int k = m - j;
      out.poles.push_back(Pole{Integer(-alpha.get_num()), k, s[j]});
      remaining -= s[j] / RatFun((X - MPoly(alpha)).pow(k));
    }
  }
  if (remaining.den().has_var(var)) throw std::logic_error("partial fractions left a pole");
  out.poly = remaining;
  return out;
}

Expr x_power(const Rational& x, const Affine& e) {
  Term t{RatFun(1L), Kernel(), {}};
  kernel_mul_power(t.ker, x, e, t.coef);
  return Expr::from_term(t);
}

Expr nested_at_arg(const Word& w, const Affine& arg) {
  if (w.empty()) return Expr(RatFun(1L));
  return Expr::atom(make_nested(w, arg));
}

std::optional<Expr> nested_sum_rec(const Expr& body, int var, const Affine& lo, const Affine& hi, const Domain& dom,
                                   int depth);

// sum_{i=lo}^{hi} r(i) x^i S_w(i).
Expr sum_rxw(const RatFun& r, const Rational& x, const Word& w, int var, const Affine& lo, const Affine& hi,
             const Domain& dom, int depth) {
  auto pf = partial_fractions(r, var);
  if (!pf) throw Unsupported("denominator outside the harmonic class");
  Affine I = Affine::variable(var);
  Expr out;
  for (const auto& pole : pf->poles) {
    Affine first = lo + Affine(pole.c);
    auto mn = dom.min(first);
    if (!mn || *mn < 1) throw Unsupported("pole inside the summation range");
    Expr scale = x_power(x, Affine(Integer(-pole.c))).scaled(pole.a);
    Word head{{static_cast<long>(pole.m), x}};
    Word hw = head;
    hw.insert(hw.end(), w.begin(), w.end());
    Expr main = nested_at_arg(hw, hi + Affine(pole.c)) - nested_at_arg(hw, first - Affine(1L));
    Expr part = main;
    if (!w.empty()) {
      // S_w(l - c) = S_w(l) + B(l)
      Expr B = synchronize_sum(w, I - Affine(pole.c)) - nested_at_arg(w, I);
      if (!B.is_zero()) {
        Expr inner = B * x_power(x, I).scaled(RatFun::make(MPoly(1L), MPoly::variable(var).pow(pole.m)));
        auto s = nested_sum_rec(inner, var, first, hi + Affine(pole.c), dom, depth + 1);
        if (!s) throw Unsupported("boundary terms outside the harmonic class");
        part += *s;
      }
    }
    out += scale * part;
  }
  if (!pf->poly.is_zero()) {
    Term pt{pf->poly, Kernel(), {}};
    kernel_mul_power(pt.ker, x, I, pt.coef);
    Expr u = Expr::from_term(pt);
    auto cert = gosper(make_hypergeometric(u, var));
    if (!cert) throw std::logic_error("polynomial times geometric term not summable");
    Expr U = u.scaled(cert->ratio);
    if (w.empty()) {
      out += substitute(U, var, hi + Affine(1L), dom) - substitute(U, var, lo, dom);
    } else {
      Word tail(w.begin() + 1, w.end());
      out += substitute(U, var, hi + Affine(1L), dom) * nested_at_arg(w, hi);
      out -= substitute(U, var, lo, dom) * nested_at_arg(w, lo);
      Expr letter = x_power(w[0].second, I).scaled(RatFun::make(MPoly(1L), MPoly::variable(var).pow(w[0].first)));
      Expr inner = U * letter * nested_at_arg(tail, I);
      auto s = nested_sum_rec(inner, var, lo + Affine(1L), hi, dom, depth + 1);
      if (!s) throw Unsupported("summation by parts left the harmonic class");
      out -= *s;
    }
  }
  return out;
}

struct Group {
  Kernel ker;
  Monomial outer;
  Rational x;
  Word w;
  RatFun r;
};

std::optional<Expr> nested_sum_rec(const Expr& body0, int var, const Affine& lo, const Affine& hi, const Domain& dom,
                                   int depth) {
  if (depth > 64) throw Unsupported("nested sum conversion too deep");
  Domain inner = dom.with_range(var, lo, hi);
  Expr body = linearize_products(synchronize(body0, inner));
  Affine I = Affine::variable(var);
  std::vector<Group> groups;
  for (const auto& t : body.terms) {
    for (const auto& [a, f] : t.ker.facts)
      if (a.has_var(var)) return std::nullopt;
    Group g;
    g.ker = t.ker;
    g.r = t.coef;
    g.x = 1;
    for (const auto& [p, e] : t.ker.exps) {
      Integer k = e.coeff(var);
      if (k == 0) continue;
      g.x *= power(Rational(p), k.get_si());
      g.ker.mul_exp(p, Affine::variable(var, -k), g.r);
    }
    if (Integer k = t.ker.sign.coeff(var); k != 0) {
      g.x = -g.x;
      g.ker.mul_sign(Affine::variable(var, -k), g.r);
    }
    bool have_w = false;
    for (const auto& [a, p] : t.mono) {
      if (!Expr::atom(a).has_var(var)) {
        g.outer.emplace_back(a, p);
        continue;
      }
      if (a->kind != SumAtom::Kind::Nested || a->arg != I || p != 1 || have_w) return std::nullopt;
      g.w = a->letters;
      have_w = true;
    }
    auto same = std::find_if(groups.begin(), groups.end(), [&](const Group& o) {
      return Kernel::compare(o.ker, g.ker) == 0 && compare_mono(o.outer, g.outer) == 0 && o.x == g.x &&
             compare_words(o.w, g.w) == 0;
    });
    if (same == groups.end())
      groups.push_back(std::move(g));
    else
      same->r += g.r;
  }
  Expr out;
  try {
    for (const auto& g : groups) {
      if (g.r.is_zero()) continue;
      Expr s = sum_rxw(g.r, g.x, g.w, var, lo, hi, dom, depth);
      Expr f = Expr::from_term(Term{RatFun(1L), g.ker, {}});
      for (const auto& [a, p] : g.outer) f *= Expr::atom(a, p);
      out += f * s;
    }
  } catch (const Unsupported&) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

std::optional<Expr> nested_sum(const Expr& body, int var, const Affine& lo, const Affine& hi, const Domain& dom) {
  auto s = nested_sum_rec(body, var, lo, hi, dom, 0);
  if (!s) return std::nullopt;
  try {
    return synchronize(*s, dom);
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

Expr rational_to_harmonic(const RatFun& r, const Rational& x, int var, const Affine& lo, const Affine& hi,
                          const Domain& dom) {
  Term t{r, Kernel(), {}};
  kernel_mul_power(t.ker, x, Affine::variable(var), t.coef);
  auto s = nested_sum(Expr::from_term(t), var, lo, hi, dom);
  if (!s) throw Unsupported("rational function outside the harmonic class");
  return *s;
}

Expr generic_to_nested(const Expr& e, const Domain& dom) {
  Expr out;
  for (const auto& t : e.terms) {
    bool generic = false;
    for (const auto& [a, p] : t.mono) generic |= a->kind == SumAtom::Kind::Generic;
    if (!generic) {
      out.terms.push_back(t);
      continue;
    }
    Expr te = Expr::from_term(Term{t.coef, t.ker, {}});
    for (const auto& [a, p] : t.mono) {
      if (a->kind != SumAtom::Kind::Generic) {
        te *= Expr::atom(a, p);
        continue;
      }
      Domain inner = dom.with_range(a->var, a->lo, a->arg);
      Expr body = generic_to_nested(a->body, inner);
      auto s = p > 0 ? nested_sum(body, a->var, a->lo, a->arg, dom) : std::nullopt;
      if (s) {
        for (int i = 0; i < p; ++i) te *= *s;
      } else {
        te *= Expr::atom(make_generic(a->var, a->lo, a->arg, body), p);
      }
    }
    out.terms.insert(out.terms.end(), te.terms.begin(), te.terms.end());
  }
  return out.canon();
}

}  // namespace telesum
