#include <cstdlib>

#include "telesum/algebra.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

namespace {

Expr kernel_expr(const Kernel& k, const RatFun& c) { return Expr::from_term(Term{c, k, {}}); }

// Sign settled on the domain, otherwise assumed and recorded.
bool assume_nonneg(const Affine& a, const Domain& dom, Assumptions* as) {
  if (a.is_constant()) return a.constant() >= 0;
  if (dom.nonneg(a)) return true;
  if (dom.negative(a)) return false;
  if (as) as->add(a);
  return true;
}

Expr power_of(const Expr& e, long p) {
  if (p >= 0) {
    Expr acc(RatFun(1L));
    for (long i = 0; i < p; ++i) acc = acc * e;
    return acc;
  }
  if (e.terms.size() != 1 || !e.terms[0].mono.empty())
    throw Unsupported("negative power of a sum");
  const Term& t = e.terms[0];
  RatFun c = t.coef.inverse();
  Kernel k = t.ker.inverse();
  Term inv{c, k, {}};
  return power_of(Expr::from_term(inv), -p);
}

// n (n-1) ... (n-k+1) / k! for a constant k >= 0.
RatFun falling_over_factorial(const Affine& n, long k) {
  MPoly p = n.to_mpoly();
  RatFun acc(1L);
  for (long i = 0; i < k; ++i) acc *= RatFun(p - MPoly(Rational(i)));
  return acc / RatFun(Rational(factorial(k)));
}

Expr binomial_expr(const Affine& n, const Affine& k, const Domain& dom, Assumptions* as) {
  if (k.is_constant()) {
    if (k.constant() < 0) return Expr();
    return Expr(falling_over_factorial(n, k.constant().get_si()));
  }
  if (dom.negative(k)) return Expr();
  Kernel ker;
  RatFun c(1L);
  if (dom.nonneg(n) || (n.is_constant() && n.constant() >= 0)) {
    if (dom.negative(n - k)) return Expr();
    assume_nonneg(k, dom, as);
    assume_nonneg(n - k, dom, as);
    ker.mul_fact(n, 1, c);
    ker.mul_fact(k, -1, c);
    ker.mul_fact(n - k, -1, c);
    return kernel_expr(ker, c);
  }
  if (dom.negative(n) || (n.is_constant() && n.constant() < 0)) {
    // binomial(n, k) = (-1)^k binomial(k - n - 1, k)
    assume_nonneg(k, dom, as);
    ker.mul_sign(k, c);
    ker.mul_fact(k - n - Affine(1L), 1, c);
    ker.mul_fact(k, -1, c);
    ker.mul_fact(-n - Affine(1L), -1, c);
    return kernel_expr(ker, c);
  }
  assume_nonneg(n, dom, as);
  assume_nonneg(k, dom, as);
  assume_nonneg(n - k, dom, as);
  ker.mul_fact(n, 1, c);
  ker.mul_fact(k, -1, c);
  ker.mul_fact(n - k, -1, c);
  return kernel_expr(ker, c);
}

Expr pochhammer_expr(const Affine& a, const Affine& k, const Domain& dom, Assumptions* as) {
  if (k.is_constant()) {
    if (k.constant() < 0) throw Unsupported("Pochhammer symbol with negative length");
    MPoly p = a.to_mpoly();
    RatFun acc(1L);
    for (long i = 0; i < k.constant().get_si(); ++i) acc *= RatFun(p + MPoly(Rational(i)));
    return Expr(acc);
  }
  assume_nonneg(k, dom, as);
  Kernel ker;
  RatFun c(1L);
  Affine am1 = a - Affine(1L);
  bool pos = am1.is_constant() ? am1.constant() >= 0 : dom.nonneg(am1);
  bool nonpos = a.is_constant() ? a.constant() <= 0 : dom.nonneg(-a);
  if (!pos && nonpos) {
    Affine ak = -a - k;
    if (dom.nonneg(ak)) {
      // (a)_k = (-1)^k (-a)! / (-a-k)!
      ker.mul_sign(k, c);
      ker.mul_fact(-a, 1, c);
      ker.mul_fact(ak, -1, c);
      return kernel_expr(ker, c);
    }
    if (dom.nonneg(a + k - Affine(1L))) return Expr();
  }
  if (!pos && as) as->add(am1);
  ker.mul_fact(a + k - Affine(1L), 1, c);
  ker.mul_fact(am1, -1, c);
  return kernel_expr(ker, c);
}

std::vector<std::pair<long, Rational>> harmonic_letters(const std::vector<long>& m) {
  std::vector<std::pair<long, Rational>> out;
  for (long x : m) out.emplace_back(std::labs(x), Rational(x < 0 ? -1 : 1));
  return out;
}

Expr nested_expr(std::vector<std::pair<long, Rational>> letters, const Affine& arg) {
  AtomPtr a = make_nested(std::move(letters), arg);
  if (arg.is_constant()) {
    if (arg.constant() < 0) throw Unsupported("nested sum at a negative argument");
    return Expr(RatFun(eval_atom(*a, {})));
  }
  return Expr::atom(a);
}

std::string bound_name(int level, const std::set<int>& taken) {
  std::string base = level == 1 ? "i" : "i" + std::to_string(level);
  std::string nm = base;
  auto clash = [&](const std::string& s) {
    for (int v : taken)
      if (symbol_name(v) == s) return true;
    return false;
  };
  while (clash(nm)) nm += "_";
  return nm;
}

NodePtr atom_to_ast(const SumAtom& a, const std::set<int>& taken) {
  if (a.kind == SumAtom::Kind::Nested) {
    bool harmonic = true;
    for (const auto& [m, x] : a.letters)
      if (x != 1 && x != -1) harmonic = false;
    std::vector<long> m;
    std::vector<Rational> x;
    for (const auto& [mi, xi] : a.letters) {
      m.push_back(harmonic && xi == -1 ? -mi : mi);
      x.push_back(xi);
    }
    if (harmonic) return ast::harmonic(m, a.arg);
    return ast::ssum(m, x, a.arg);
  }
  const std::string& vn = symbol_name(a.var);
  int level = vn.size() > 2 && vn[0] == '%' && vn[1] == 'b' ? std::stoi(vn.substr(2)) : 1;
  int nv = intern_symbol(bound_name(level, taken));
  Expr body = substitute(a.body, a.var, Affine::variable(nv), Domain());
  return ast::sum(nv, a.lo, a.arg, to_ast(body));
}

NodePtr term_node(const Term& t, const std::set<int>& taken) {
  std::vector<NodePtr> f;
  f.push_back(ast::rational(t.coef));
  for (const auto& [A, e] : t.ker.facts) f.push_back(ast::pow(ast::factorial(A + Affine(e.offset)), e.exp));
  // Group prime powers p^(g*E) by their primitive exponent E.
  std::map<Affine, Rational> groups;
  for (const auto& [p, x] : t.ker.exps) {
    Integer g = 0;
    for (const auto& [v, c] : x.terms()) g = gcd(g, c);
    if (x.terms().begin()->second < 0) g = -g;
    Affine prim;
    for (const auto& [v, c] : x.terms()) prim += Affine::variable(v, c / g);
    Rational& base = groups.try_emplace(prim, Rational(1)).first->second;
    base *= power(Rational(p), g.get_si());
  }
  for (const auto& [E, b] : groups) f.push_back(ast::exponential(b, E));
  if (!t.ker.sign.is_constant()) f.push_back(ast::exponential(-1, t.ker.sign));
  for (const auto& [a, p] : t.mono) f.push_back(ast::pow(atom_to_ast(*a, taken), p));
  return ast::mul(std::move(f));
}

}  // namespace

Expr from_ast(const NodePtr& n, const Domain& dom, Assumptions* as) {
  switch (n->kind) {
    case NodeKind::Number: return Expr(RatFun(n->value));
    case NodeKind::Var: return Expr(RatFun::variable(n->var));
    case NodeKind::RationalOf: return Expr(n->rf);
    case NodeKind::Add: {
      Expr acc;
      for (const auto& k : n->kids) acc += from_ast(k, dom, as);
      return acc;
    }
    case NodeKind::Mul: {
      Expr acc(RatFun(1L));
      for (const auto& k : n->kids) {
        acc = acc * from_ast(k, dom, as);
        if (acc.is_zero()) break;
      }
      return acc;
    }
    case NodeKind::Pow: return power_of(from_ast(n->kids[0], dom, as), n->exponent);
    case NodeKind::Exponential: {
      if (n->a.is_constant()) return Expr(RatFun(power(n->value, n->a.constant().get_si())));
      Kernel k;
      RatFun c(1L);
      kernel_mul_power(k, n->value, n->a, c);
      return kernel_expr(k, c);
    }
    case NodeKind::Factorial: {
      if (n->a.is_constant()) {
        if (n->a.constant() < 0) throw Unsupported("factorial of a negative integer");
        return Expr(RatFun(Rational(factorial(n->a.constant().get_si()))));
      }
      if (!assume_nonneg(n->a, dom, as)) throw Unsupported("factorial of " + n->a.str() + " is negative on the domain");
      Kernel k;
      RatFun c(1L);
      k.mul_fact(n->a, 1, c);
      return kernel_expr(k, c);
    }
    case NodeKind::Binomial: return binomial_expr(n->a, n->b, dom, as);
    case NodeKind::Pochhammer: return pochhammer_expr(n->a, n->b, dom, as);
    case NodeKind::HarmonicSum: return nested_expr(harmonic_letters(n->indices), n->a);
    case NodeKind::SSum: {
      std::vector<std::pair<long, Rational>> letters;
      for (size_t i = 0; i < n->indices.size(); ++i) letters.emplace_back(n->indices[i], n->weights[i]);
      return nested_expr(std::move(letters), n->a);
    }
    case NodeKind::Sum: {
      Expr body = from_ast(n->kids[0], dom.with_range(n->var, n->a, n->b), as);
      if (n->a.is_constant() && n->b.is_constant()) {
        Expr acc;
        for (Integer i = n->a.constant(); i <= n->b.constant(); ++i) acc += substitute(body, n->var, Affine(i), dom, as);
        return acc;
      }
      if (body.is_zero()) return Expr();
      return Expr::atom(make_generic(n->var, n->a, n->b, body));
    }
  }
  throw Unsupported("unknown node");
}

NodePtr term_to_ast(const Term& t) {
  Expr e = Expr::from_term(t);
  return normalize(term_node(t, e.vars()));
}

NodePtr to_ast(const Expr& e) {
  std::set<int> taken = e.vars();
  std::vector<NodePtr> parts;
  for (const auto& t : e.terms) parts.push_back(term_node(t, taken));
  if (parts.empty()) return ast::number(0);
  return normalize(ast::add(std::move(parts)));
}

}  // namespace telesum
