#include "telesum/ast.hpp"

#include <algorithm>

#include "telesum/render.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

namespace {

std::shared_ptr<Node> make(NodeKind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

}  // namespace

namespace ast {

NodePtr number(const Rational& q) {
  auto n = make(NodeKind::Number);
  n->value = q;
  return n;
}

NodePtr variable(int v) {
  auto n = make(NodeKind::Var);
  n->var = v;
  return n;
}

NodePtr add(std::vector<NodePtr> kids) {
  auto n = make(NodeKind::Add);
  n->kids = std::move(kids);
  return n;
}

NodePtr mul(std::vector<NodePtr> kids) {
  auto n = make(NodeKind::Mul);
  n->kids = std::move(kids);
  return n;
}

NodePtr pow(NodePtr base, long e) {
  auto n = make(NodeKind::Pow);
  n->kids = {std::move(base)};
  n->exponent = e;
  return n;
}

NodePtr rational(const RatFun& r) {
  auto n = make(NodeKind::RationalOf);
  n->rf = r;
  return n;
}

NodePtr exponential(const Rational& base, const Affine& e) {
  auto n = make(NodeKind::Exponential);
  n->value = base;
  n->a = e;
  return n;
}

NodePtr factorial(const Affine& a) {
  auto n = make(NodeKind::Factorial);
  n->a = a;
  return n;
}

NodePtr binomial(const Affine& top, const Affine& bottom) {
  auto n = make(NodeKind::Binomial);
  n->a = top;
  n->b = bottom;
  return n;
}

NodePtr pochhammer(const Affine& a, const Affine& k) {
  auto n = make(NodeKind::Pochhammer);
  n->a = a;
  n->b = k;
  return n;
}

NodePtr harmonic(std::vector<long> m, const Affine& arg) {
  auto n = make(NodeKind::HarmonicSum);
  n->indices = std::move(m);
  n->a = arg;
  return n;
}

NodePtr ssum(std::vector<long> m, std::vector<Rational> x, const Affine& arg) {
  auto n = make(NodeKind::SSum);
  n->indices = std::move(m);
  n->weights = std::move(x);
  n->a = arg;
  return n;
}

NodePtr sum(int var, const Affine& lo, const Affine& hi, NodePtr body) {
  auto n = make(NodeKind::Sum);
  n->var = var;
  n->a = lo;
  n->b = hi;
  n->kids = {std::move(body)};
  return n;
}

}  // namespace ast

// ---------------------------------------------------------------------------
// Values

namespace {

// Nested sum sum_{n>=i1>=...>=ik>=1} prod x_l^{i_l} / i_l^{m_l}.
Rational nested_value(const std::vector<long>& m, const std::vector<Rational>& x, const Integer& n) {
  if (n < 0) throw DomainError("nested sum at negative argument " + n.get_str());
  long len = n.get_si();
  std::vector<Rational> inner(len + 1, Rational(1));
  for (size_t l = m.size(); l-- > 0;) {
    std::vector<Rational> outer(len + 1);
    Rational xp = 1;
    for (long i = 1; i <= len; ++i) {
      xp *= x[l];
      Rational t = xp;
      Integer ip;
      mpz_pow_ui(ip.get_mpz_t(), Integer(i).get_mpz_t(), static_cast<unsigned long>(m[l]));
      t /= Rational(ip);
      outer[i] = outer[i - 1] + t * inner[i];
    }
    inner = std::move(outer);
  }
  return inner[len];
}

}  // namespace

Rational harmonic_value(const std::vector<long>& m, const Integer& n) {
  std::vector<long> a;
  std::vector<Rational> x;
  for (long mi : m) {
    a.push_back(mi < 0 ? -mi : mi);
    x.emplace_back(mi < 0 ? -1 : 1);
  }
  return nested_value(a, x, n);
}

Rational ssum_value(const std::vector<long>& m, const std::vector<Rational>& x, const Integer& n) {
  return nested_value(m, x, n);
}

Rational binomial_value(const Integer& n, const Integer& k) {
  if (k < 0) return 0;
  if (n >= 0) {
    if (k > n) return 0;
    return Rational(binomial(n, k.get_ui()));
  }
  Rational acc = 1;
  for (Integer i = 0; i < k; ++i) acc *= Rational(n - i) / Rational(i + 1);
  return acc;
}

Rational pochhammer_value(const Rational& a, const Integer& k) {
  if (k < 0) throw DomainError("Pochhammer symbol with negative count");
  Rational acc = 1;
  for (Integer i = 0; i < k; ++i) acc *= a + Rational(i);
  return acc;
}

Rational evaluate(const NodePtr& e, const Env& env) {
  const Node& n = *e;
  auto aff = [&](const Affine& a) {
    try {
      return a.eval(env);
    } catch (const std::domain_error& err) {
      throw DomainError(err.what());
    }
  };
  switch (n.kind) {
    case NodeKind::Number:
      return n.value;
    case NodeKind::Var: {
      auto it = env.find(n.var);
      if (it == env.end()) throw DomainError("unbound variable " + symbol_name(n.var));
      return Rational(it->second);
    }
    case NodeKind::Add: {
      Rational acc = 0;
      for (const auto& k : n.kids) acc += evaluate(k, env);
      return acc;
    }
    case NodeKind::Mul: {
      Rational acc = 1;
      for (const auto& k : n.kids) acc *= evaluate(k, env);
      return acc;
    }
    case NodeKind::Pow: {
      Rational b = evaluate(n.kids[0], env);
      if (b == 0 && n.exponent < 0) throw DomainError("division by zero in " + render_plain(e));
      return power(b, n.exponent);
    }
    case NodeKind::RationalOf: {
      auto renv = to_rational_env(env);
      for (int v : n.rf.vars())
        if (!renv.count(v)) throw DomainError("unbound variable " + symbol_name(v));
      Rational d = n.rf.den().eval(renv);
      if (d == 0) throw DomainError("pole of " + render_plain(e));
      return n.rf.num().eval(renv) / d;
    }
    case NodeKind::Exponential: {
      Integer k = aff(n.a);
      if (n.value == 0 && k < 0) throw DomainError("division by zero in " + render_plain(e));
      if (abs(k) > Integer(1) << 20) throw DomainError("exponent too large in " + render_plain(e));
      return power(n.value, k.get_si());
    }
    case NodeKind::Factorial: {
      Integer k = aff(n.a);
      if (k < 0) throw DomainError("negative factorial argument in " + render_plain(e));
      return Rational(factorial(k.get_ui()));
    }
    case NodeKind::Binomial:
      return binomial_value(aff(n.a), aff(n.b));
    case NodeKind::Pochhammer: {
      Integer k = aff(n.b);
      if (k < 0) throw DomainError("negative Pochhammer count in " + render_plain(e));
      return pochhammer_value(Rational(aff(n.a)), k);
    }
    case NodeKind::HarmonicSum: {
      Integer k = aff(n.a);
      if (k < 0) throw DomainError("negative argument in " + render_plain(e));
      return harmonic_value(n.indices, k);
    }
    case NodeKind::SSum: {
      Integer k = aff(n.a);
      if (k < 0) throw DomainError("negative argument in " + render_plain(e));
      return ssum_value(n.indices, n.weights, k);
    }
    case NodeKind::Sum: {
      Integer lo = aff(n.a), hi = aff(n.b);
      Rational acc = 0;
      Env inner = env;
      for (Integer i = lo; i <= hi; ++i) {
        inner[n.var] = i;
        acc += evaluate(n.kids[0], inner);
      }
      return acc;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Structural order

namespace {

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int cmp_q(const Rational& a, const Rational& b) { return cmp(a, b) < 0 ? -1 : (cmp(a, b) > 0 ? 1 : 0); }

template <class T, class F>
int cmp_vec(const std::vector<T>& a, const std::vector<T>& b, F f) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (int c = f(a[i], b[i])) return c;
  return cmp_int(static_cast<long>(a.size()), static_cast<long>(b.size()));
}

}  // namespace

int compare(const NodePtr& x, const NodePtr& y) {
  if (x.get() == y.get()) return 0;
  const Node &a = *x, &b = *y;
  if (a.kind != b.kind) return cmp_int(static_cast<long>(a.kind), static_cast<long>(b.kind));
  switch (a.kind) {
    case NodeKind::Number:
      return cmp_q(a.value, b.value);
    case NodeKind::Var:
      return cmp_int(a.var, b.var);
    case NodeKind::Add:
    case NodeKind::Mul:
      return cmp_vec(a.kids, b.kids, [](const NodePtr& p, const NodePtr& q) { return compare(p, q); });
    case NodeKind::Pow:
      if (int c = compare(a.kids[0], b.kids[0])) return c;
      return cmp_int(a.exponent, b.exponent);
    case NodeKind::RationalOf:
      return RatFun::compare(a.rf, b.rf);
    case NodeKind::Exponential:
      if (int c = cmp_q(a.value, b.value)) return c;
      return Affine::compare(a.a, b.a);
    case NodeKind::Factorial:
      return Affine::compare(a.a, b.a);
    case NodeKind::Binomial:
    case NodeKind::Pochhammer:
      if (int c = Affine::compare(a.a, b.a)) return c;
      return Affine::compare(a.b, b.b);
    case NodeKind::HarmonicSum:
    case NodeKind::SSum:
      if (int c = cmp_vec(a.indices, b.indices, cmp_int)) return c;
      if (int c = cmp_vec(a.weights, b.weights, cmp_q)) return c;
      return Affine::compare(a.a, b.a);
    case NodeKind::Sum:
      if (int c = cmp_int(a.var, b.var)) return c;
      if (int c = Affine::compare(a.a, b.a)) return c;
      if (int c = Affine::compare(a.b, b.b)) return c;
      return compare(a.kids[0], b.kids[0]);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

struct Split {
  RatFun coef;
  std::vector<NodePtr> factors;
};

Split split(const NodePtr& n) {
  if (n->kind == NodeKind::RationalOf) return {n->rf, {}};
  if (n->kind == NodeKind::Mul) {
    Split s{RatFun(1L), {}};
    for (const auto& k : n->kids) {
      if (k->kind == NodeKind::RationalOf)
        s.coef *= k->rf;
      else
        s.factors.push_back(k);
    }
    return s;
  }
  return {RatFun(1L), {n}};
}

bool same_factors(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (compare(a[i], b[i]) != 0) return false;
  return true;
}

NodePtr build_product(const RatFun& coef, std::vector<NodePtr> factors) {
  if (coef.is_zero()) return ast::rational(RatFun());
  if (factors.empty()) return ast::rational(coef);
  std::sort(factors.begin(), factors.end(), [](const NodePtr& p, const NodePtr& q) { return compare(p, q) < 0; });
  if (coef == RatFun(1L) && factors.size() == 1) return factors[0];
  std::vector<NodePtr> kids;
  if (coef != RatFun(1L)) kids.push_back(ast::rational(coef));
  for (auto& f : factors) kids.push_back(std::move(f));
  return ast::mul(std::move(kids));
}

Integer mod2(const Integer& x) {
  Integer r = x % 2;
  if (r < 0) r += 2;
  return r;
}

NodePtr make_exp(const Rational& base, const Affine& e);

NodePtr make_pow(const NodePtr& base, long e) {
  if (e == 0) return ast::rational(RatFun(1L));
  if (e == 1) return base;
  switch (base->kind) {
    case NodeKind::RationalOf:
      if (base->rf.is_zero() && e < 0) break;
      return ast::rational(base->rf.pow(static_cast<int>(e)));
    case NodeKind::Mul: {
      std::vector<NodePtr> parts;
      for (const auto& k : base->kids) parts.push_back(make_pow(k, e));
      return normalize(ast::mul(std::move(parts)));
    }
    case NodeKind::Pow:
      return make_pow(base->kids[0], base->exponent * e);
    case NodeKind::Exponential:
      return make_exp(base->value, base->a * Integer(e));
    default:
      break;
  }
  return ast::pow(base, e);
}

NodePtr make_exp(const Rational& base, const Affine& e) {
  if (base == 1 || e == Affine(0L)) return ast::rational(RatFun(1L));
  if (base == 0) {
    if (e.is_constant() && e.constant() > 0) return ast::rational(RatFun());
    return ast::exponential(base, e);
  }
  if (base == -1) {
    Affine r;
    for (const auto& [v, c] : e.terms()) r += Affine::variable(v, mod2(c));
    bool neg = mod2(e.constant()) == 1;
    if (r.is_constant()) return ast::rational(RatFun(neg ? -1L : 1L));
    auto node = ast::exponential(base, r);
    if (!neg) return node;
    return ast::mul({ast::rational(RatFun(-1L)), node});
  }
  if (e.is_constant()) return ast::rational(RatFun(power(base, e.constant().get_si())));
  auto node = ast::exponential(base, e.var_part());
  if (e.constant() == 0) return node;
  return ast::mul({ast::rational(RatFun(power(base, e.constant().get_si()))), node});
}

std::optional<NodePtr> try_constant(const NodePtr& n) {
  try {
    return ast::rational(RatFun(evaluate(n, Env{})));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

NodePtr normalize_mul(const std::vector<NodePtr>& raw) {
  RatFun coef(1L);
  std::vector<NodePtr> plain;
  std::vector<std::pair<Rational, Affine>> exps;
  for (const auto& k0 : raw) {
    Split s = split(normalize(k0));
    coef *= s.coef;
    for (auto& f : s.factors) {
      if (f->kind == NodeKind::Exponential) {
        auto it = std::find_if(exps.begin(), exps.end(), [&](auto& p) { return p.first == f->value; });
        if (it == exps.end())
          exps.emplace_back(f->value, f->a);
        else
          it->second += f->a;
      } else {
        plain.push_back(f);
      }
    }
  }
  if (coef.is_zero()) return ast::rational(RatFun());
  // Collect equal bases into powers.
  std::vector<std::pair<NodePtr, long>> powers;
  for (const auto& f : plain) {
    NodePtr base = f;
    long e = 1;
    if (f->kind == NodeKind::Pow) {
      base = f->kids[0];
      e = f->exponent;
    }
    auto it = std::find_if(powers.begin(), powers.end(), [&](auto& p) { return compare(p.first, base) == 0; });
    if (it == powers.end())
      powers.emplace_back(base, e);
    else
      it->second += e;
  }
  std::vector<NodePtr> factors;
  auto absorb = [&](const NodePtr& n) {
    Split s = split(n);
    coef *= s.coef;
    for (auto& f : s.factors) factors.push_back(f);
  };
  for (auto& [base, e] : powers) absorb(make_pow(base, e));
  for (auto& [b, e] : exps) absorb(make_exp(b, e));
  return build_product(coef, std::move(factors));
}

NodePtr normalize_add(const std::vector<NodePtr>& raw) {
  std::vector<Split> groups;
  auto push = [&](const NodePtr& t) {
    Split s = split(t);
    if (s.coef.is_zero()) return;
    std::sort(s.factors.begin(), s.factors.end(), [](const NodePtr& p, const NodePtr& q) { return compare(p, q) < 0; });
    for (auto& g : groups)
      if (same_factors(g.factors, s.factors)) {
        g.coef += s.coef;
        return;
      }
    groups.push_back(std::move(s));
  };
  for (const auto& k0 : raw) {
    NodePtr k = normalize(k0);
    if (k->kind == NodeKind::Add)
      for (const auto& t : k->kids) push(t);
    else
      push(k);
  }
  std::vector<NodePtr> terms;
  for (auto& g : groups)
    if (!g.coef.is_zero()) terms.push_back(build_product(g.coef, g.factors));
  if (terms.empty()) return ast::rational(RatFun());
  if (terms.size() == 1) return terms[0];
  std::sort(terms.begin(), terms.end(), [](const NodePtr& p, const NodePtr& q) {
    bool rp = p->kind == NodeKind::RationalOf, rq = q->kind == NodeKind::RationalOf;
    if (rp != rq) return rp;
    return compare(p, q) < 0;
  });
  return ast::add(std::move(terms));
}

}  // namespace

NodePtr normalize(const NodePtr& e) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Number:
      return ast::rational(RatFun(n.value));
    case NodeKind::Var:
      return ast::rational(RatFun::variable(n.var));
    case NodeKind::RationalOf:
      return e;
    case NodeKind::Add:
      return normalize_add(n.kids);
    case NodeKind::Mul:
      return normalize_mul(n.kids);
    case NodeKind::Pow:
      return make_pow(normalize(n.kids[0]), n.exponent);
    case NodeKind::Exponential:
      return make_exp(n.value, n.a);
    case NodeKind::Factorial:
      if (n.a.is_constant())
        if (auto c = try_constant(e)) return *c;
      return e;
    case NodeKind::Binomial:
      if (n.b.is_constant()) {
        Integer k = n.b.constant();
        if (k < 0) return ast::rational(RatFun());
        if (k <= 64) {
          MPoly top = n.a.to_mpoly();
          MPoly acc(1L);
          for (long i = 0; i < k.get_si(); ++i) acc *= top - MPoly(i);
          return ast::rational(RatFun(mpoly_scale(acc, Rational(1) / Rational(factorial(k.get_ui())))));
        }
      }
      return e;
    case NodeKind::Pochhammer:
      if (n.b.is_constant() && n.b.constant() >= 0 && n.b.constant() <= 64) {
        MPoly base = n.a.to_mpoly();
        MPoly acc(1L);
        for (long i = 0; i < n.b.constant().get_si(); ++i) acc *= base + MPoly(i);
        return ast::rational(RatFun(acc));
      }
      return e;
    case NodeKind::HarmonicSum:
    case NodeKind::SSum:
      return e;
    case NodeKind::Sum: {
      NodePtr body = normalize(n.kids[0]);
      if (body->kind == NodeKind::RationalOf && body->rf.is_zero()) return body;
      return ast::sum(n.var, n.a, n.b, body);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------

namespace {

void collect_free(const NodePtr& e, std::set<int>& out) {
  const Node& n = *e;
  auto add_aff = [&](const Affine& a) {
    for (const auto& [v, c] : a.terms()) out.insert(v);
  };
  switch (n.kind) {
    case NodeKind::Number:
      return;
    case NodeKind::Var:
      out.insert(n.var);
      return;
    case NodeKind::RationalOf:
      for (int v : n.rf.vars()) out.insert(v);
      return;
    case NodeKind::Add:
    case NodeKind::Mul:
    case NodeKind::Pow:
      for (const auto& k : n.kids) collect_free(k, out);
      return;
    case NodeKind::Exponential:
    case NodeKind::Factorial:
    case NodeKind::HarmonicSum:
    case NodeKind::SSum:
      add_aff(n.a);
      return;
    case NodeKind::Binomial:
    case NodeKind::Pochhammer:
      add_aff(n.a);
      add_aff(n.b);
      return;
    case NodeKind::Sum: {
      std::set<int> inner;
      collect_free(n.kids[0], inner);
      inner.erase(n.var);
      out.insert(inner.begin(), inner.end());
      add_aff(n.a);
      add_aff(n.b);
      return;
    }
  }
}

// Gamma(x + c) / Gamma(x).
RatFun gamma_shift(const Affine& x, const Integer& c) {
  MPoly p = x.to_mpoly();
  RatFun acc(1L);
  if (c >= 0) {
    for (long i = 0; i < c.get_si(); ++i) acc *= RatFun(p + MPoly(i));
  } else {
    for (long i = 1; i <= -c.get_si(); ++i) acc /= RatFun(p - MPoly(i));
  }
  return acc;
}

std::optional<RatFun> quotient(const NodePtr& e, int v) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Number:
      return RatFun(1L);
    case NodeKind::Var:
    case NodeKind::RationalOf: {
      RatFun r = n.kind == NodeKind::Var ? RatFun::variable(n.var) : n.rf;
      if (r.is_zero()) return std::nullopt;
      if (!r.has_var(v)) return RatFun(1L);
      return r.shift(v, 1) / r;
    }
    case NodeKind::Add: {
      std::optional<RatFun> q;
      for (const auto& k : n.kids) {
        auto qk = quotient(k, v);
        if (!qk || (q && *q != *qk)) return std::nullopt;
        q = qk;
      }
      return q;
    }
    case NodeKind::Mul: {
      RatFun acc(1L);
      for (const auto& k : n.kids) {
        auto qk = quotient(k, v);
        if (!qk) return std::nullopt;
        acc *= *qk;
      }
      return acc;
    }
    case NodeKind::Pow: {
      auto q = quotient(n.kids[0], v);
      if (!q) return std::nullopt;
      return q->pow(static_cast<int>(n.exponent));
    }
    case NodeKind::Exponential: {
      Integer c = n.a.coeff(v);
      if (n.value == 0) return c == 0 ? std::optional<RatFun>(RatFun(1L)) : std::nullopt;
      return RatFun(power(n.value, c.get_si()));
    }
    case NodeKind::Factorial:
      return gamma_shift(n.a + Affine(1L), n.a.coeff(v));
    case NodeKind::Binomial: {
      Affine d = n.a - n.b;
      return gamma_shift(n.a + Affine(1L), n.a.coeff(v)) / gamma_shift(n.b + Affine(1L), n.b.coeff(v)) /
             gamma_shift(d + Affine(1L), d.coeff(v));
    }
    case NodeKind::Pochhammer: {
      Affine top = n.a + n.b;
      return gamma_shift(top, top.coeff(v)) / gamma_shift(n.a, n.a.coeff(v));
    }
    case NodeKind::HarmonicSum:
    case NodeKind::SSum:
    case NodeKind::Sum:
      if (depends_on(e, v)) return std::nullopt;
      return RatFun(1L);
  }
  return std::nullopt;
}

}  // namespace

std::set<int> free_vars(const NodePtr& e) {
  std::set<int> out;
  collect_free(e, out);
  return out;
}

bool depends_on(const NodePtr& e, int v) { return free_vars(e).count(v) > 0; }

std::optional<RatFun> shift_quotient(const NodePtr& e, int v) { return quotient(normalize(e), v); }

std::optional<RatFun> as_ratfun(const NodePtr& e) {
  NodePtr n = normalize(e);
  if (n->kind == NodeKind::RationalOf) return n->rf;
  return std::nullopt;
}

}  // namespace telesum
