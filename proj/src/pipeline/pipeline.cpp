#include "telesum/pipeline.hpp"

#include <cstdlib>
#include <functional>

#include "telesum/render.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

SimplifyOptions SimplifyOptions::from_env() {
  SimplifyOptions o;
  if (const char* b = std::getenv("TELESUM_ORACLE_BUDGET")) {
    char* end = nullptr;
    long v = std::strtol(b, &end, 10);
    if (end != b && v > 0) o.oracle_budget = v;
  }
  return o;
}

Unsolved::Unsolved(std::string l, std::string r, SimplificationTrace t)
    : std::runtime_error("UNSOLVED(" + l + "): " + r), layer(std::move(l)), reason(std::move(r)), trace(std::move(t)) {}

bool VerifyReport::ok() const {
  for (const auto& p : points)
    if (!p.ok) return false;
  return true;
}

namespace {

std::string expr_str(const Expr& e) { return render_plain(to_ast(e)); }

std::string env_str(const Env& env) {
  std::string s;
  for (const auto& [v, x] : env) {
    if (!s.empty()) s += ",";
    s += symbol_name(v) + "=" + x.get_str();
  }
  return s;
}

bool contains_sum(const NodePtr& n) {
  if (n->kind == NodeKind::Sum) return true;
  for (const auto& k : n->kids)
    if (contains_sum(k)) return true;
  return false;
}

// Summand evaluations needed for s at env, stopping once over the budget.
long oracle_cost(const NodePtr& n, Env& env, long budget) {
  long cost = 0;
  if (n->kind == NodeKind::Sum) {
    Integer lo = n->a.eval(env), hi = n->b.eval(env);
    bool inner = contains_sum(n->kids[0]);
    if (!inner) {
      Integer cnt = hi - lo + 1;
      return cnt > 0 ? (cnt > budget ? budget + 1 : cnt.get_si()) : 0;
    }
    for (Integer i = lo; i <= hi && cost <= budget; ++i) {
      env[n->var] = i;
      cost += oracle_cost(n->kids[0], env, budget - cost) + 1;
    }
    env.erase(n->var);
    return cost;
  }
  for (const auto& k : n->kids) {
    cost += oracle_cost(k, env, budget - cost);
    if (cost > budget) break;
  }
  return cost;
}

Rational direct_sum(const Expr& F, int v, const Affine& lo, const Affine& hi, Env env) {
  Rational acc = 0;
  Integer a = lo.eval(env), b = hi.eval(env);
  for (Integer x = a; x <= b; ++x) {
    env[v] = x;
    acc += F.eval(env);
  }
  return acc;
}

void enumerate_points(const Domain& dom, size_t idx, Env& env, std::vector<Env>& out, long span, size_t cap) {
  if (out.size() >= cap) return;
  if (idx == dom.ranges().size()) {
    out.push_back(env);
    return;
  }
  const Range& r = dom.ranges()[idx];
  Integer lo = r.lo.eval(env);
  Integer hi = r.hi ? r.hi->eval(env) : lo + span;
  for (Integer x = lo; x <= hi && out.size() < cap; ++x) {
    env[r.var] = x;
    enumerate_points(dom, idx + 1, env, out, span, cap);
  }
  env.erase(r.var);
}

// Up to `want` points of dom spread over the first few values of the
// outermost variable.
std::vector<Env> sample_points(const Domain& dom, size_t want, long span) {
  std::vector<Env> all;
  Env env;
  enumerate_points(dom, 0, env, all, span, 5000);
  if (all.size() <= want) return all;
  std::vector<Env> out;
  for (size_t t = 0; t < want; ++t) out.push_back(all[t * all.size() / want]);
  return out;
}

Domain prefix_before(const Domain& dom, int n) {
  Domain out;
  for (const Range& r : dom.ranges()) {
    if (r.var == n) break;
    out.push(r.var, r.lo, r.hi);
  }
  return out;
}

Expr atom_power(const Expr& x, int p) {
  Expr out{RatFun(1L)};
  for (int t = 0; t < p; ++t) out = out * x;
  return out;
}

// Factors of a product body that do not depend on v, and the rest. Powers
// c^(A + B) with only A involving v are split.
std::pair<std::vector<NodePtr>, std::vector<NodePtr>> split_body(const NodePtr& body, int v) {
  std::vector<NodePtr> kids = body->kind == NodeKind::Mul ? body->kids : std::vector<NodePtr>{body};
  std::vector<NodePtr> out, in;
  for (const auto& k : kids) {
    if (!depends_on(k, v)) {
      out.push_back(k);
    } else if (k->kind == NodeKind::Exponential && !(k->a - Affine::variable(v, k->a.coeff(v))).is_constant()) {
      Affine mine = Affine::variable(v, k->a.coeff(v));
      in.push_back(ast::exponential(k->value, mine));
      out.push_back(ast::exponential(k->value, k->a - mine));
    } else {
      in.push_back(k);
    }
  }
  return {out, in};
}

class Engine {
 public:
  explicit Engine(const SimplifyOptions& o) : opt_(o) {}

  SimplificationTrace trace;

  Expr simplify_node(const NodePtr& node, const Domain& dom) {
    if (!contains_sum(node)) return from_ast(node, dom);
    switch (node->kind) {
      case NodeKind::Sum: {
        Domain inner = dom.with_range(node->var, node->a, node->b);
        auto [out, in] = split_body(node->kids[0], node->var);
        Expr body = simplify_node(in.size() == 1 ? in[0] : ast::mul(in), inner);
        Expr s = sum_layer(body, node->var, node->a, node->b, dom, symbol_name(node->var));
        if (out.empty()) return s;
        return (simplify_node(ast::mul(out), dom) * s).canon();
      }
      case NodeKind::Add: {
        Expr acc;
        for (const auto& k : node->kids) acc += simplify_node(k, dom);
        return acc;
      }
      case NodeKind::Mul: {
        Expr acc{RatFun(1L)};
        for (const auto& k : node->kids) acc = acc * simplify_node(k, dom);
        return acc;
      }
      case NodeKind::Pow:
        if (node->exponent >= 0) return atom_power(simplify_node(node->kids[0], dom), static_cast<int>(node->exponent));
        throw Unsupported("negative power of a sum");
      default:
        throw Unsupported("unexpected node around a sum");
    }
  }

  // sum_{v=lo}^{hi} F over the outer domain dom.
  Expr sum_layer(const Expr& F, int v, const Affine& lo, const Affine& hi, const Domain& dom, const std::string& name) {
    size_t idx = trace.layers.size();
    trace.layers.push_back(LayerRecord{});
    {
      LayerRecord& rec = trace.layers[idx];
      rec.var = name;
      rec.bounds = lo.str() + ".." + hi.str();
      rec.summand = expr_str(F);
      rec.depth = level_;
    }
    ++level_;
    try {
      Expr out = sum_layer_inner(F, v, lo, hi, dom, idx);
      --level_;
      trace.layers[idx].result = expr_str(out);
      trace.layers[idx].status = "solved";
      return out;
    } catch (const Unsolved& u) {
      --level_;
      if (trace.layers[idx].status.empty()) {
        trace.layers[idx].status = "unsolved";
        trace.layers[idx].reason = u.reason;
      }
      throw;
    } catch (const Unsupported& u) {
      --level_;
      trace.layers[idx].status = "unsolved";
      trace.layers[idx].reason = u.what();
      throw Unsolved(name, u.what());
    }
  }

 private:
  SimplifyOptions opt_;
  int level_ = 0;
  int rhs_depth_ = 0;

  LayerRecord& rec(size_t idx) { return trace.layers[idx]; }

  Expr sum_layer_inner(const Expr& F0, int v, const Affine& lo, const Affine& hi, const Domain& dom, size_t idx) {
    Expr F = F0.canon();
    Domain dv = dom.with_range(v, lo, hi);
    if (F.is_zero()) {
      rec(idx).method = "constant";
      return Expr();
    }
    Affine width = hi - lo;
    if (width.is_constant()) {
      rec(idx).method = "finite";
      if (width.constant() < 0) return Expr();
      if (width.constant() > 64) throw Unsupported("constant range too long to expand");
      Expr acc;
      for (long t = 0; t <= width.constant().get_si(); ++t) acc += substitute(F, v, lo + Affine(t), dv);
      return finish(synchronize(acc, dom).canon(), F, v, lo, hi, dom, idx);
    }
    if (!F.has_var(v)) {
      rec(idx).method = "constant";
      Expr out = F.scaled(RatFun(width.to_mpoly() + MPoly(1L)));
      return finish(out, F, v, lo, hi, dom, idx);
    }
    try {
      for (const auto& s : solve_telescoping({F}, v, dv)) {
        if (s.c[0].is_zero()) continue;
        Expr g = s.g.scaled(s.c[0].inverse());
        Expr out = telescoped_sum(g, F, v, lo, hi, dv);
        rec(idx).method = "telescoping";
        return finish(synchronize(out, dom).canon(), F, v, lo, hi, dom, idx);
      }
    } catch (const Unsupported&) {
    }
    try {
      if (auto ns = nested_sum(F, v, lo, hi, dom)) {
        rec(idx).method = "nested-sum";
        return finish(synchronize(*ns, dom).canon(), F, v, lo, hi, dom, idx);
      }
    } catch (const Unsupported&) {
    }

    int n = -1;
    for (auto it = dom.ranges().rbegin(); it != dom.ranges().rend(); ++it)
      if (F.has_var(it->var) || lo.has_var(it->var) || hi.has_var(it->var)) {
        n = it->var;
        break;
      }
    if (n < 0) {
      std::set<int> fv = F.vars();
      fv.erase(v);
      if (!fv.empty()) throw Unsupported("summand depends on variables outside the domain");
      rec(idx).method = "direct";
      return Expr(RatFun(direct_sum(F, v, lo, hi, {})));
    }

    rec(idx).method = "creative-telescoping";
    rec(idx).recurrence_var = symbol_name(n);
    auto ct = creative_telescoping(F, n, v, dv, opt_.max_order);
    if (!ct) throw Unsolved(rec(idx).var, "no recurrence up to order " + std::to_string(opt_.max_order));
    LinearRecurrence lr = sum_recurrence(lo, hi, *ct, dv);
    lr.rhs = resolve_definite(lr.rhs, dom);
    rec(idx).recurrence = recurrence_str(lr);
    for (const auto& c : lr.coeffs) rec(idx).coefficients.push_back(render_ratfun(c));
    check_recurrence(lr, F, v, lo, hi, dom, idx);

    SolutionSet sols = dalembertian_solutions(lr, dom);
    if (!sols.complete || !sols.particular)
      throw Unsolved(rec(idx).var, "recurrence in " + symbol_name(n) + " has no complete d'Alembertian solution");
    for (const auto& h : sols.homogeneous) rec(idx).solutions.push_back(expr_str(h));
    rec(idx).solutions.push_back("particular: " + expr_str(*sols.particular));

    const long d = lr.order();
    Domain dp = prefix_before(dom, n);
    std::vector<Expr> values;
    for (long t = 0; t < d; ++t) {
      Affine p = sols.anchor + Affine(t);
      Expr Fp = substitute(F, n, p, dv);
      Expr val = sum_layer(Fp, v, lo.subs(n, p), hi.subs(n, p), dp, rec(idx).var + "|" + symbol_name(n) + "=" + p.str());
      rec(idx).initial_values.push_back(symbol_name(n) + "=" + p.str() + ": " + expr_str(val));
      values.push_back(val);
    }
    Expr out = match_initial_values(sols, n, values, dom);
    return finish(out, F, v, lo, hi, dom, idx);
  }

  std::string recurrence_str(const LinearRecurrence& lr) {
    std::string s;
    for (size_t i = 0; i < lr.coeffs.size(); ++i) {
      if (i) s += " + ";
      s += "(" + render_ratfun(lr.coeffs[i]) + ")*F(" + symbol_name(lr.var) + (i ? "+" + std::to_string(i) : "") + ")";
    }
    return s + " = " + expr_str(lr.rhs);
  }

  // Generic sums in e whose body depends on outer variables are definite
  // sums themselves and go through the pipeline.
  Expr resolve_definite(const Expr& e, const Domain& dom) {
    bool any = false;
    for (const Term& t : e.terms)
      for (const auto& [a, p] : t.mono)
        if (a->kind == SumAtom::Kind::Generic) {
          auto vs = a->body.vars();
          vs.erase(a->var);
          if (!vs.empty()) any = true;
        }
    if (!any) return e;
    if (rhs_depth_ >= opt_.depth_limit) throw Unsupported("depth limit for right-hand-side sums reached");
    ++rhs_depth_;
    std::map<const SumAtom*, Expr> done;
    Expr out;
    for (const Term& t : e.terms) {
      Expr x = Expr::from_term(Term{t.coef, t.ker, {}});
      for (const auto& [a, p] : t.mono) {
        auto vs = a->body.vars();
        vs.erase(a->var);
        if (a->kind != SumAtom::Kind::Generic || vs.empty()) {
          x = x * Expr::atom(a, p);
          continue;
        }
        auto it = done.find(a.get());
        if (it == done.end())
          it = done.emplace(a.get(), sum_layer(a->body, a->var, a->lo, a->arg, dom, "rhs:" + symbol_name(a->var))).first;
        x = x * atom_power(it->second, p);
      }
      out += x;
    }
    --rhs_depth_;
    return synchronize(out, dom).canon();
  }

  void check_recurrence(const LinearRecurrence& lr, const Expr& F, int v, const Affine& lo, const Affine& hi,
                        const Domain& dom, size_t idx) {
    int good = 0;
    for (long span = 6; span <= 14 && good < opt_.check_points; span += 4) {
      good = 0;
      for (Env env : sample_points(dom, static_cast<size_t>(opt_.check_points) * 3, span)) {
        try {
          Rational acc = -lr.rhs.eval(env);
          for (size_t i = 0; i < lr.coeffs.size(); ++i) {
            Env e = env;
            e[lr.var] += static_cast<long>(i);
            acc += lr.coeffs[i].eval(to_rational_env(env)) * direct_sum(F, v, lo, hi, e);
          }
          if (acc != 0)
            throw VerificationFailure("recurrence for the sum over " + rec(idx).var + " fails at " + env_str(env));
          ++good;
        } catch (const DomainError&) {
        } catch (const Unsupported&) {
        } catch (const std::domain_error&) {
        }
        if (good >= opt_.check_points) break;
      }
    }
  }

  Expr finish(const Expr& out, const Expr& F, int v, const Affine& lo, const Affine& hi, const Domain& dom,
              size_t idx) {
    int good = 0;
    for (long span = 6; span <= 14 && good < opt_.check_points; span += 4) {
      good = 0;
      rec(idx).checked_points.clear();
      for (const Env& env : sample_points(dom, static_cast<size_t>(opt_.check_points) * 3, span)) {
        Rational want, got;
        try {
          want = direct_sum(F, v, lo, hi, env);
          got = out.eval(env);
        } catch (const DomainError&) {
          continue;
        } catch (const Unsupported&) {
          continue;
        } catch (const std::domain_error&) {
          continue;
        }
        if (want != got)
          throw VerificationFailure("sum over " + rec(idx).var + " disagrees at " + env_str(env) + ": " +
                                    want.get_str() + " vs " + got.get_str());
        rec(idx).checked_points.push_back(env_str(env));
        if (++good >= opt_.check_points) break;
      }
      if (dom.ranges().empty()) break;
    }
    return out;
  }
};

}  // namespace

int parameter_of(const NodePtr& s) {
  auto fv = free_vars(s);
  if (fv.size() > 1) throw Unsupported("more than one free variable");
  return fv.empty() ? -1 : *fv.begin();
}

namespace {

// Every range nonempty for var >= n0 (as far as the domain can tell).
bool ranges_nonempty(const NodePtr& n, const Domain& dom) {
  if (n->kind == NodeKind::Sum) {
    auto m = dom.min(n->b - n->a);
    if (!m || *m < 0) return false;
    return ranges_nonempty(n->kids[0], dom.with_range(n->var, n->a, n->b));
  }
  for (const auto& k : n->kids)
    if (!ranges_nonempty(k, dom)) return false;
  return true;
}

// Generic sums with a constant lower bound above 1 and a body in the
// summation variable alone start at 1 instead, when the body is defined there.
Expr lower_to_one(const Expr& e) {
  Expr out;
  for (const auto& t : e.terms) {
    Expr te = Expr::from_term(Term{t.coef, t.ker, {}});
    for (const auto& [a, p] : t.mono) {
      Expr f = Expr::atom(a);
      if (a->kind == SumAtom::Kind::Generic && a->lo.is_constant() && a->lo.constant() > 1 && p > 0) {
        auto vars = a->body.vars();
        if (vars.size() == 1 && *vars.begin() == a->var) {
          try {
            Rational head = 0;
            for (Integer i = 1; i < a->lo.constant(); ++i) head += a->body.eval({{a->var, i}});
            f = Expr::atom(make_generic(a->var, Affine(1L), a->arg, a->body)) - Expr(RatFun(head));
          } catch (const std::exception&) {
          }
        }
      }
      if (p < 0) {
        te *= Expr::atom(a, p);
        continue;
      }
      for (int q = 0; q < p; ++q) te *= f;
    }
    out += te;
  }
  return out.canon();
}

}  // namespace

Integer validity_threshold(const NodePtr& s, int var) {
  if (var < 0) return 0;
  for (long n0 = 0; n0 <= 50; ++n0) {
    Domain dom;
    dom.push(var, n0, std::nullopt);
    if (!ranges_nonempty(s, dom)) continue;
    bool ok = true;
    for (long t = 0; t < 3 && ok; ++t) {
      try {
        oracle(s, {{var, n0 + t}}, 1000000);
      } catch (const DomainError&) {
        ok = false;
      } catch (const std::domain_error&) {
        ok = false;
      } catch (const OracleBudgetExceeded&) {
      }
    }
    if (ok) return n0;
  }
  throw Unsupported("no validity threshold up to 50");
}

Rational oracle(const NodePtr& s, const Env& env, long budget) {
  Env e = env;
  if (oracle_cost(s, e, budget) > budget) throw OracleBudgetExceeded("oracle budget exceeded at " + env_str(env));
  return evaluate(s, env);
}

VerifyReport verify(const ClosedForm& cf, const NodePtr& s, const Integer& from, const Integer& to, long budget) {
  VerifyReport rep;
  for (Integer n = from; n <= to; ++n) {
    Env env;
    if (cf.var >= 0) env[cf.var] = n;
    VerifyPoint p;
    p.n = n;
    try {
      p.expected = oracle(s, env, budget);
    } catch (const OracleBudgetExceeded&) {
      rep.skipped.push_back(n);
      continue;
    }
    p.got = evaluate(cf.ast, env);
    p.ok = p.got == p.expected;
    rep.points.push_back(p);
  }
  return rep;
}

Expr match_initial_values(const SolutionSet& sols, int n, const std::vector<Expr>& values, const Domain& dom) {
  const size_t d = sols.homogeneous.size();
  if (values.size() != d) throw Unsupported("initial values do not match the order");
  Expr out = *sols.particular;
  if (d == 0) return out;
  if (d == 1) return (out + sols.homogeneous[0] * values[0]).canon();
  // d x d system over rational functions of the outer variables.
  std::vector<std::vector<RatFun>> M(d, std::vector<RatFun>(d));
  std::vector<Expr> b(d);
  for (size_t t = 0; t < d; ++t) {
    Affine p = sols.anchor + Affine(static_cast<long>(t));
    for (size_t l = 0; l < d; ++l) {
      Expr h = synchronize(substitute(sols.homogeneous[l], n, p, dom), dom).canon();
      RatFun r;
      for (const Term& term : h.terms) {
        if (!term.ker.is_one() || !term.mono.empty()) throw Unsupported("initial-value system is not rational");
        r += term.coef;
      }
      M[t][l] = r;
    }
    b[t] = values[t] - synchronize(substitute(*sols.particular, n, p, dom), dom);
  }
  for (size_t c = 0; c < d; ++c) {
    size_t piv = c;
    while (piv < d && M[piv][c].is_zero()) ++piv;
    if (piv == d) throw Unsupported("singular initial-value system");
    std::swap(M[piv], M[c]);
    std::swap(b[piv], b[c]);
    RatFun inv = M[c][c].inverse();
    for (auto& x : M[c]) x *= inv;
    b[c] = b[c].scaled(inv);
    for (size_t r = 0; r < d; ++r) {
      if (r == c || M[r][c].is_zero()) continue;
      RatFun f = M[r][c];
      for (size_t k = 0; k < d; ++k) M[r][k] -= f * M[c][k];
      b[r] -= b[c].scaled(f);
    }
  }
  for (size_t l = 0; l < d; ++l) out += sols.homogeneous[l] * b[l];
  return out.canon();
}

std::pair<ClosedForm, SimplificationTrace> simplify(const NodePtr& s, const SimplifyOptions& opt) {
  ClosedForm cf;
  cf.var = parameter_of(s);
  cf.valid_from = validity_threshold(s, cf.var);
  Domain dom;
  if (cf.var >= 0) dom.push(cf.var, Affine(cf.valid_from), std::nullopt);
  Engine eng(opt);
  Expr e;
  try {
    e = eng.simplify_node(s, dom);
    e = lower_to_one(generic_to_nested(e, dom));
    try {
      e = reduce_to_basis(e, opt.weight_cap).first;
    } catch (const Unsupported&) {
    }
    e = synchronize(e, dom).canon();
  } catch (Unsolved& u) {
    u.trace = eng.trace;
    throw;
  } catch (const Unsupported& u) {
    throw Unsolved("top", u.what(), eng.trace);
  }
  cf.expr = e;
  cf.ast = to_ast(e);
  LayerRecord fin;
  fin.var = cf.var >= 0 ? symbol_name(cf.var) : "";
  fin.method = "basis-reduction";
  fin.result = render_plain(cf.ast);
  fin.status = "solved";
  Integer n0 = cf.valid_from;
  for (Integer n = n0; n < n0 + opt.check_points; ++n) {
    Env env;
    if (cf.var >= 0) env[cf.var] = n;
    Rational want;
    try {
      want = oracle(s, env, opt.oracle_budget);
    } catch (const OracleBudgetExceeded&) {
      continue;
    }
    if (evaluate(cf.ast, env) != want)
      throw VerificationFailure("closed form disagrees with the oracle at " + env_str(env));
    fin.checked_points.push_back(env_str(env));
    if (cf.var < 0) break;
  }
  eng.trace.layers.push_back(fin);
  return {cf, eng.trace};
}

}  // namespace telesum
