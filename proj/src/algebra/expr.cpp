#include <algorithm>

#include "telesum/algebra.hpp"
#include "telesum/render.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

namespace {

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_expr(const Expr& a, const Expr& b);

int compare_term(const Term& a, const Term& b) {
  if (int c = Kernel::compare(a.ker, b.ker)) return c;
  if (int c = compare_mono(a.mono, b.mono)) return c;
  return RatFun::compare(a.coef, b.coef);
}

int compare_expr(const Expr& a, const Expr& b) {
  if (a.terms.size() != b.terms.size()) return cmp_int(static_cast<long>(a.terms.size()), static_cast<long>(b.terms.size()));
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (int c = compare_term(a.terms[i], b.terms[i])) return c;
  return 0;
}

// Sort key of a term inside canon(): class, then monomial.
int compare_key(const Term& a, const Term& b) {
  if (int c = Kernel::compare_class(a.ker, b.ker)) return c;
  return compare_mono(a.mono, b.mono);
}

Monomial merge_mono(const Monomial& a, const Monomial& b) {
  Monomial out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = i == a.size() ? 1 : (j == b.size() ? -1 : compare_atoms(a[i].first, b[j].first));
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      out.push_back(b[j++]);
    } else {
      int p = a[i].second + b[j].second;
      if (p != 0) out.emplace_back(a[i].first, p);
      ++i;
      ++j;
    }
  }
  return out;
}

Term mul_terms(const Term& a, const Term& b) {
  Term t;
  t.coef = a.coef * b.coef;
  if (t.coef.is_zero()) return t;
  t.ker = a.ker;
  t.ker.mul(b.ker, t.coef);
  t.mono = merge_mono(a.mono, b.mono);
  return t;
}

int level_of(int var) {
  const std::string& nm = symbol_name(var);
  if (nm.size() > 2 && nm[0] == '%' && nm[1] == 'b') return std::stoi(nm.substr(2));
  return 0;
}

int generic_level(const Expr& e) {
  int lev = 0;
  for (const auto& t : e.terms)
    for (const auto& [a, p] : t.mono)
      if (a->kind == SumAtom::Kind::Generic) lev = std::max(lev, level_of(a->var));
  return lev;
}

Expr expr_pow(const Expr& e, int p) {
  if (p < 0) throw Unsupported("negative power of a sum");
  Expr acc(RatFun(1L));
  for (int i = 0; i < p; ++i) acc = acc * e;
  return acc;
}

bool term_has_var(const Term& t, int v) {
  if (t.coef.has_var(v) || t.ker.has_var(v)) return true;
  for (const auto& [a, p] : t.mono) {
    if (a->arg.has_var(v)) return true;
    if (a->kind == SumAtom::Kind::Generic && (a->lo.has_var(v) || a->body.has_var(v))) return true;
  }
  return false;
}

// Renaming / plain affine substitution without limits.
Expr subst_plain(const Expr& e, int v, const Affine& value);

AtomPtr subst_plain_atom(const AtomPtr& a, int v, const Affine& value) {
  if (a->kind == SumAtom::Kind::Nested) {
    if (!a->arg.has_var(v)) return a;
    return make_nested(a->letters, a->arg.subs(v, value));
  }
  auto out = std::make_shared<SumAtom>(*a);
  out->arg = a->arg.subs(v, value);
  out->lo = a->lo.subs(v, value);
  out->body = subst_plain(a->body, v, value);
  return out;
}

Expr subst_plain(const Expr& e, int v, const Affine& value) {
  Expr out;
  MPoly val = value.to_mpoly();
  for (const auto& t : e.terms) {
    if (!term_has_var(t, v)) {
      out.terms.push_back(t);
      continue;
    }
    Term n;
    n.coef = t.coef.subs(v, val);
    for (const auto& [a, f] : t.ker.facts) n.ker.mul_fact(a.subs(v, value) + Affine(f.offset), f.exp, n.coef);
    for (const auto& [p, x] : t.ker.exps) n.ker.mul_exp(p, x.subs(v, value), n.coef);
    n.ker.mul_sign(t.ker.sign.subs(v, value), n.coef);
    Expr te = Expr::from_term(n);
    for (const auto& [a, p] : t.mono) te = te * Expr::atom(subst_plain_atom(a, v, value), p);
    out += te;
  }
  return out.canon();
}

int eps_symbol() {
  static const int eps = fresh_symbol("eps");
  return eps;
}

// Lowest-order coefficient of r in eps: (order, coefficient).
std::pair<int, RatFun> laurent_lead(const RatFun& r, int eps) {
  auto nc = r.num().coeffs_in(eps);
  auto dc = r.den().coeffs_in(eps);
  int kn = 0, kd = 0;
  while (nc[kn].is_zero()) ++kn;
  while (dc[kd].is_zero()) ++kd;
  return {kn - kd, RatFun::make(nc[kn], dc[kd])};
}

Expr subst_atom(const AtomPtr& a, int v, const Affine& value, const Domain& dom, Assumptions* as) {
  if (a->kind == SumAtom::Kind::Nested) {
    if (!a->arg.has_var(v)) return Expr::atom(a);
    Affine arg = a->arg.subs(v, value);
    if (arg.is_constant()) return Expr(RatFun(eval_atom(*make_nested(a->letters, arg), {})));
    return Expr::atom(make_nested(a->letters, arg));
  }
  if (!a->arg.has_var(v) && !a->lo.has_var(v) && !a->body.has_var(v)) return Expr::atom(a);
  Affine lo = a->lo.subs(v, value), hi = a->arg.subs(v, value);
  Expr body = a->body.has_var(v) ? substitute(a->body, v, value, dom.with_range(a->var, lo, hi), as) : a->body;
  if (lo.is_constant() && hi.is_constant()) {
    if (hi.constant() - lo.constant() > 100000) throw Unsupported("explicit range too long");
    Expr acc;
    for (Integer i = lo.constant(); i <= hi.constant(); ++i) acc += substitute(body, a->var, Affine(i), dom, as);
    return acc;
  }
  return Expr::atom(make_generic(a->var, lo, hi, body));
}

Expr subst_term(const Term& t, int v, const Affine& value, const Domain& dom, Assumptions* as) {
  if (!term_has_var(t, v)) return Expr::from_term(t);
  Kernel k;
  RatFun c(1L);
  int pole_order = 0;
  for (const auto& [A, f] : t.ker.facts) {
    Integer a = A.coeff(v);
    if (a == 0) {
      k.mul_fact(A + Affine(f.offset), f.exp, c);
      continue;
    }
    Affine arg = A.subs(v, value) + Affine(f.offset);
    bool pole;
    if (arg.is_constant()) {
      pole = arg.constant() < 0;
    } else if (dom.nonneg(arg)) {
      pole = false;
    } else if (dom.negative(arg)) {
      pole = true;
    } else {
      pole = false;
      if (as) as->add(arg);
    }
    if (!pole) {
      k.mul_fact(arg, f.exp, c);
      continue;
    }
    // Gamma(-n + a*eps) = (-1)^n / (n! * a * eps) + O(1)
    Affine n = -arg - Affine(1L);
    k.mul_sign(n * Integer(f.exp), c);
    k.mul_fact(n, -f.exp, c);
    c *= RatFun(Rational(1) / Rational(a)).pow(f.exp);
    pole_order += f.exp;
  }
  for (const auto& [p, x] : t.ker.exps) k.mul_exp(p, x.subs(v, value), c);
  k.mul_sign(t.ker.sign.subs(v, value), c);

  RatFun cf;
  int ord = 0;
  bool direct = pole_order == 0;
  if (direct) {
    try {
      cf = t.coef.subs(v, value.to_mpoly());
    } catch (const std::domain_error&) {
      direct = false;
    }
  }
  if (!direct) {
    int eps = eps_symbol();
    RatFun r = t.coef.subs(v, value.to_mpoly() + MPoly::variable(eps));
    std::tie(ord, cf) = laurent_lead(r, eps);
  }
  int total = ord - pole_order;
  if (total > 0) return Expr();
  if (total < 0) throw Unsupported("divergent limit while substituting " + symbol_name(v) + " = " + value.str());
  c *= cf;
  Expr res = Expr::from_term(Term{c, k, {}});
  for (const auto& [a, p] : t.mono) res = res * expr_pow(subst_atom(a, v, value, dom, as), p);
  return res;
}

AtomPtr shift_atom(const AtomPtr& a, int v, long k) {
  if (a->kind == SumAtom::Kind::Nested) {
    if (!a->arg.has_var(v)) return a;
    return make_nested(a->letters, a->arg.shift(v, k));
  }
  if (!a->arg.has_var(v) && !a->lo.has_var(v) && !a->body.has_var(v)) return a;
  auto out = std::make_shared<SumAtom>(*a);
  out->arg = a->arg.shift(v, k);
  out->lo = a->lo.shift(v, k);
  out->body = shift(a->body, v, k);
  return out;
}

// x^n / n^m for the affine point n.
Expr letter_term(const std::pair<long, Rational>& l, const Affine& n) {
  Term t;
  t.coef = RatFun::make(MPoly(1L), n.to_mpoly().pow(static_cast<int>(l.first)));
  if (l.second != 1) kernel_mul_power(t.ker, l.second, n, t.coef);
  return Expr::from_term(t);
}

Expr sync_atom(const AtomPtr& a, const Domain& dom, Assumptions* as);

// S_letters(n) for an affine n, synchronised.
Expr nested_at(const std::vector<std::pair<long, Rational>>& letters, const Affine& n, const Domain& dom, Assumptions* as) {
  if (letters.empty()) return Expr(RatFun(1L));
  return sync_atom(make_nested(letters, n), dom, as);
}

Expr sync_atom(const AtomPtr& a, const Domain& dom, Assumptions* as) {
  Affine P = a->arg.var_part();
  Integer c = a->arg.constant();
  if (a->kind == SumAtom::Kind::Nested) {
    if (P.is_constant()) {
      if (c < 0) throw Unsupported("nested sum at a negative argument");
      return Expr(RatFun(eval_atom(*a, {})));
    }
    if (c == 0) return Expr::atom(a);
    if (abs(c) > 64) throw Unsupported("synchronisation offset too large");
    std::vector<std::pair<long, Rational>> rest(a->letters.begin() + 1, a->letters.end());
    Expr acc = Expr::atom(make_nested(a->letters, P));
    if (c > 0) {
      for (long t = 1; t <= c.get_si(); ++t) {
        Affine n = P + Affine(t);
        acc += letter_term(a->letters[0], n) * nested_at(rest, n, dom, as);
      }
    } else {
      for (long t = 0; t < -c.get_si(); ++t) {
        Affine n = P - Affine(t);
        acc -= letter_term(a->letters[0], n) * nested_at(rest, n, dom, as);
      }
    }
    return acc;
  }
  // Generic sums: first normalise the body, then the upper bound.
  Domain inner = dom.with_range(a->var, a->lo, a->arg);
  Expr body = synchronize(a->body, inner, as);
  bool indefinite = true;
  for (int v : body.vars())
    if (P.has_var(v)) indefinite = false;
  if (P.is_constant()) {
    if (!a->lo.is_constant()) return Expr::atom(make_generic(a->var, a->lo, a->arg, body));
    Expr acc;
    for (Integer i = a->lo.constant(); i <= c; ++i) acc += substitute(body, a->var, Affine(i), dom, as);
    return synchronize(acc, dom, as);
  }
  AtomPtr base = make_generic(a->var, a->lo, indefinite ? P : a->arg, body);
  if (!indefinite || c == 0) return Expr::atom(base);
  if (abs(c) > 64) throw Unsupported("synchronisation offset too large");
  if (c < 0) {
    for (long t = 0; t < -c.get_si(); ++t)
      if (!regular_on(substitute(body, base->var, P - Affine(t), dom, as), dom))
        return Expr::atom(make_generic(a->var, a->lo, a->arg, body));
  }
  Expr acc = Expr::atom(base);
  if (c > 0) {
    for (long t = 1; t <= c.get_si(); ++t) acc += substitute(body, base->var, P + Affine(t), dom, as);
  } else {
    for (long t = 0; t < -c.get_si(); ++t) acc -= substitute(body, base->var, P - Affine(t), dom, as);
  }
  return synchronize(acc, dom, as);
}

}  // namespace

// ---------------------------------------------------------------------------

Expr::Expr(const RatFun& r) {
  if (!r.is_zero()) terms.push_back(Term{r, Kernel(), {}});
}

Expr Expr::from_term(Term t) {
  Expr e;
  if (!t.coef.is_zero()) e.terms.push_back(std::move(t));
  return e;
}

Expr Expr::atom(const AtomPtr& a, int power) {
  Term t{RatFun(1L), Kernel(), {}};
  if (power != 0) t.mono.emplace_back(a, power);
  return from_term(std::move(t));
}

bool Expr::has_var(int v) const {
  for (const auto& t : terms)
    if (term_has_var(t, v)) return true;
  return false;
}

std::set<int> Expr::vars() const {
  std::set<int> out;
  for (const auto& t : terms) {
    for (int v : t.coef.vars()) out.insert(v);
    t.ker.collect_vars(out);
    for (const auto& [a, p] : t.mono) {
      for (const auto& [v, c] : a->arg.terms()) out.insert(v);
      if (a->kind == SumAtom::Kind::Generic) {
        for (const auto& [v, c] : a->lo.terms()) out.insert(v);
        auto inner = a->body.vars();
        inner.erase(a->var);
        out.insert(inner.begin(), inner.end());
      }
    }
  }
  return out;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms) t.coef = -t.coef;
  return r;
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr r = a;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return r.canon();
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  for (const auto& x : a.terms)
    for (const auto& y : b.terms) {
      Term t = mul_terms(x, y);
      if (!t.coef.is_zero()) r.terms.push_back(std::move(t));
    }
  return r.canon();
}

Expr Expr::scaled(const RatFun& r) const {
  if (r.is_zero()) return Expr();
  Expr e = *this;
  for (auto& t : e.terms) t.coef *= r;
  return e;
}

Expr Expr::canon() const {
  std::vector<Term> ts;
  for (const auto& t : terms)
    if (!t.coef.is_zero()) ts.push_back(t);
  std::stable_sort(ts.begin(), ts.end(), [](const Term& x, const Term& y) { return compare_key(x, y) < 0; });
  Expr out;
  for (size_t i = 0; i < ts.size();) {
    size_t j = i + 1;
    while (j < ts.size() && compare_key(ts[i], ts[j]) == 0) ++j;
    if (j == i + 1) {
      out.terms.push_back(ts[i]);
    } else {
      Kernel ref = ts[i].ker;
      for (size_t k = i + 1; k < j; ++k)
        for (auto& [a, f] : ref.facts) f.offset = std::max(f.offset, ts[k].ker.facts.at(a).offset);
      RatFun sum;
      for (size_t k = i; k < j; ++k) sum += ts[k].coef * ts[k].ker.ratio_to(ref);
      if (!sum.is_zero()) out.terms.push_back(Term{sum, ref, ts[i].mono});
    }
    i = j;
  }
  return out;
}

Rational Expr::eval(const Env& env) const {
  auto renv = to_rational_env(env);
  Rational acc = 0;
  for (const auto& t : terms) {
    Rational d;
    try {
      d = t.coef.den().eval(renv);
    } catch (const std::exception& e) {
      throw DomainError(e.what());
    }
    if (d == 0) throw DomainError("pole of " + render_ratfun(t.coef));
    Rational v = t.coef.num().eval(renv) / d;
    v *= t.ker.eval(env);
    for (const auto& [a, p] : t.mono) v *= power(eval_atom(*a, env), p);
    acc += v;
  }
  return acc;
}

// ---------------------------------------------------------------------------

int SumAtom::depth() const {
  if (kind == Kind::Nested) return static_cast<int>(letters.size());
  int d = 0;
  for (const auto& t : body.terms)
    for (const auto& [a, p] : t.mono) d = std::max(d, a->depth());
  return d + 1;
}

long SumAtom::weight() const {
  long w = 0;
  for (const auto& [m, x] : letters) w += m;
  return w;
}

AtomPtr make_nested(std::vector<std::pair<long, Rational>> letters, const Affine& arg) {
  auto a = std::make_shared<SumAtom>();
  a->kind = SumAtom::Kind::Nested;
  a->letters = std::move(letters);
  a->arg = arg;
  return a;
}

AtomPtr make_generic(int var, const Affine& lo, const Affine& hi, const Expr& body) {
  int lev = generic_level(body) + 1;
  int cv = intern_symbol("%b" + std::to_string(lev));
  auto a = std::make_shared<SumAtom>();
  a->kind = SumAtom::Kind::Generic;
  a->var = cv;
  a->lo = lo;
  a->arg = hi;
  a->body = var == cv ? body.canon() : subst_plain(body, var, Affine::variable(cv));
  return a;
}

int compare_atoms(const AtomPtr& x, const AtomPtr& y) {
  if (x.get() == y.get()) return 0;
  const SumAtom &a = *x, &b = *y;
  if (a.kind != b.kind) return a.kind == SumAtom::Kind::Nested ? -1 : 1;
  if (a.kind == SumAtom::Kind::Nested) {
    if (a.letters.size() != b.letters.size()) return cmp_int(static_cast<long>(a.letters.size()), static_cast<long>(b.letters.size()));
    for (size_t i = 0; i < a.letters.size(); ++i) {
      if (a.letters[i].first != b.letters[i].first) return cmp_int(a.letters[i].first, b.letters[i].first);
      int c = cmp(a.letters[i].second, b.letters[i].second);
      if (c != 0) return c < 0 ? -1 : 1;
    }
    return Affine::compare(a.arg, b.arg);
  }
  if (a.var != b.var) return cmp_int(a.var, b.var);
  if (int c = Affine::compare(a.lo, b.lo)) return c;
  if (int c = Affine::compare(a.arg, b.arg)) return c;
  return compare_expr(a.body, b.body);
}

int compare_mono(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (int c = compare_atoms(a[i].first, b[i].first)) return c;
    if (a[i].second != b[i].second) return cmp_int(a[i].second, b[i].second);
  }
  return cmp_int(static_cast<long>(a.size()), static_cast<long>(b.size()));
}

Rational eval_atom(const SumAtom& a, const Env& env) {
  Integer hi;
  try {
    hi = a.arg.eval(env);
  } catch (const std::domain_error& e) {
    throw DomainError(e.what());
  }
  if (a.kind == SumAtom::Kind::Nested) {
    std::vector<long> m;
    std::vector<Rational> x;
    for (const auto& [mi, xi] : a.letters) {
      m.push_back(mi);
      x.push_back(xi);
    }
    return ssum_value(m, x, hi);
  }
  Integer lo = a.lo.eval(env);
  Env inner = env;
  Rational acc = 0;
  for (Integer i = lo; i <= hi; ++i) {
    inner[a.var] = i;
    acc += a.body.eval(inner);
  }
  return acc;
}

Expr substitute(const Expr& e, int v, const Affine& value, const Domain& dom, Assumptions* as) {
  Expr out;
  for (const auto& t : e.terms) {
    Expr s = subst_term(t, v, value, dom, as);
    out.terms.insert(out.terms.end(), s.terms.begin(), s.terms.end());
  }
  return out.canon();
}

Expr shift(const Expr& e, int v, long k) {
  if (k == 0) return e;
  Expr out;
  for (const auto& t : e.terms) {
    if (!term_has_var(t, v)) {
      out.terms.push_back(t);
      continue;
    }
    Term n;
    n.coef = t.coef.shift(v, k) * t.ker.shift_ratio(v, k);
    n.ker = t.ker;
    Expr te = Expr::from_term(n);
    for (const auto& [a, p] : t.mono) te = te * Expr::atom(shift_atom(a, v, k), p);
    out.terms.insert(out.terms.end(), te.terms.begin(), te.terms.end());
  }
  return out.canon();
}

Expr synchronize(const Expr& e, const Domain& dom, Assumptions* as) {
  Expr out;
  for (const auto& t : e.terms) {
    if (t.mono.empty()) {
      out.terms.push_back(t);
      continue;
    }
    Expr te = Expr::from_term(Term{t.coef, t.ker, {}});
    for (const auto& [a, p] : t.mono) te = te * expr_pow(sync_atom(a, dom, as), p);
    out.terms.insert(out.terms.end(), te.terms.begin(), te.terms.end());
  }
  return out.canon();
}

bool is_zero_symbolic(const Expr& e, const Domain& dom) { return synchronize(e, dom).is_zero(); }

bool regular_on(const Expr& e, const Domain& dom) {
  auto nonzero = [&](const MPoly& den) {
    for (const auto& [f, m] : split_factors(den)) {
      if (f.total_degree() != 1) continue;
      auto a = Affine::from_mpoly(f);
      if (!a) continue;
      auto lo = dom.min(*a), hi = dom.max(*a);
      if (!((lo && *lo >= 1) || (hi && *hi <= -1))) return false;
    }
    return true;
  };
  for (const Term& t : e.terms) {
    if (!nonzero(t.coef.den())) return false;
    for (const auto& [key, f] : t.ker.facts) {
      auto lo = dom.min(key + Affine(f.offset));
      if (!lo || *lo < 0) return false;
    }
    for (const auto& [a, p] : t.mono)
      if (a->kind == SumAtom::Kind::Generic && !regular_on(a->body, dom.with_range(a->var, a->lo, a->arg)))
        return false;
  }
  return true;
}

std::string str(const Expr& e) { return render_plain(to_ast(e)); }

}  // namespace telesum
