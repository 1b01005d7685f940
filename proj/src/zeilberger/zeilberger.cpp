#include "telesum/zeilberger.hpp"

#include <algorithm>

#include "telesum/gosper.hpp"
#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

namespace {

bool atom_has(const AtomPtr& a, int v) { return Expr::atom(a).has_var(v); }

Expr kernel_expr(const Kernel& k) { return Expr::from_term(Term{RatFun(1L), k, {}}); }

Expr mono_expr(const Monomial& m) {
  Term t{RatFun(1L), Kernel(), m};
  return Expr::from_term(t);
}

// Multiset of depths of the k-dependent atoms, largest first.
std::vector<int> profile(const Monomial& m, int k) {
  std::vector<int> out;
  for (const auto& [a, p] : m)
    if (atom_has(a, k))
      for (int i = 0; i < std::abs(p); ++i) out.push_back(a->depth());
  std::sort(out.rbegin(), out.rend());
  return out;
}

int compare_profiles(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

// Bookkeeping of kernel classes, monomials and atom differences in k.
// a(k+1). A generic sum whose body is free of k gets its boundary summands
// directly: synchronisation may refuse them where they are singular, but the
// identity is only used formally and the final sums are checked at the ends.
Expr atom_step(const AtomPtr& a, int k, const Domain& dom) {
  if (a->kind != SumAtom::Kind::Generic || a->body.has_var(k)) return synchronize(shift(Expr::atom(a), k, 1), dom);
  long da = a->arg.coeff(k).get_si(), dl = a->lo.coeff(k).get_si();
  if (da < 0 || dl < 0) throw Unsupported("sum range shrinks in " + symbol_name(k));
  Expr d = Expr::atom(a);
  for (long t = 1; t <= da; ++t) d += substitute(a->body, a->var, a->arg + Affine(t), dom);
  for (long t = 0; t < dl; ++t) d -= substitute(a->body, a->var, a->lo + Affine(t), dom);
  return synchronize(d, dom);
}

class Ansatz {
 public:
  Ansatz(int k, const Domain& dom) : k_(k), dom_(dom) {}

  struct Key {
    int cls;
    Monomial mono;
    std::vector<int> prof;
    Expr diff;  // ref * (mono(k+1) - mono(k))
  };

  int class_of(const Kernel& ker) {
    for (size_t i = 0; i < refs_.size(); ++i)
      if (Kernel::same_class(refs_[i], ker)) return static_cast<int>(i);
    refs_.push_back(ker);
    rho_.push_back(ker.shift_ratio(k_, 1));
    return static_cast<int>(refs_.size()) - 1;
  }

  int key_of(int cls, const Monomial& m) {
    for (size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i].cls == cls && compare_mono(keys_[i].mono, m) == 0) return static_cast<int>(i);
    keys_.push_back(Key{cls, m, profile(m, k_), Expr()});
    pending_.push_back(keys_.size() - 1);
    return static_cast<int>(keys_.size()) - 1;
  }

  // Coefficients relative to the class references, per key.
  std::map<int, RatFun> decompose(const Expr& e) {
    std::map<int, RatFun> out;
    for (const auto& t : e.terms) {
      int c = class_of(t.ker);
      int key = key_of(c, t.mono);
      out[key] += t.coef * t.ker.ratio_to(refs_[c]);
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
  }

  // Adds every key reachable through monomial differences.
  void close() {
    while (!pending_.empty()) {
      size_t i = pending_.back();
      pending_.pop_back();
      Expr d = kernel_expr(refs_[keys_[i].cls]) * mono_diff(keys_[i].mono);
      keys_[i].diff = d;
      decompose(d);
    }
  }

  const std::vector<Key>& keys() const { return keys_; }
  const Kernel& ref(int cls) const { return refs_[cls]; }
  const RatFun& rho(int cls) const { return rho_[cls]; }

 private:
  Expr delta(const AtomPtr& a) {
    for (const auto& [b, d] : deltas_)
      if (compare_atoms(a, b) == 0) return d;
    Expr d = atom_step(a, k_, dom_) - Expr::atom(a);
    for (const auto& t : d.terms)
      for (const auto& [b, p] : t.mono)
        if (atom_has(b, k_) && b->depth() >= a->depth())
          throw Unsupported("sum does not shift into itself in " + symbol_name(k_));
    deltas_.emplace_back(a, d);
    return d;
  }

  Expr mono_diff(const Monomial& m) {
    Expr prod(RatFun(1L));
    bool moves = false;
    for (const auto& [a, p] : m) {
      if (!atom_has(a, k_)) {
        prod *= Expr::atom(a, p);
        continue;
      }
      if (p < 0) throw Unsupported("negative power of a sum in the summation variable");
      moves = true;
      Expr base = Expr::atom(a) + delta(a);
      for (int i = 0; i < p; ++i) prod *= base;
    }
    if (!moves) return Expr();
    return prod - mono_expr(m);
  }

  int k_;
  const Domain& dom_;
  std::vector<Kernel> refs_;
  std::vector<RatFun> rho_;
  std::vector<Key> keys_;
  std::vector<size_t> pending_;
  std::vector<std::pair<AtomPtr, Expr>> deltas_;
};

// One free parameter of the solution space built so far.
struct Param {
  std::vector<RatFun> c;
  std::map<int, RatFun> R;
  Expr pending;  // cross terms not yet absorbed by a lower level
};

Expr delta_k(const Expr& g, int k, const Domain& dom) {
  Expr out;
  for (const auto& t : g.terms) {
    Expr te = shift(Expr::from_term(Term{t.coef, t.ker, {}}), k, 1);
    for (const auto& [a, p] : t.mono) {
      if (!atom_has(a, k)) {
        te *= Expr::atom(a, p);
        continue;
      }
      if (p < 0) throw Unsupported("negative power of a sum in the summation variable");
      Expr s = atom_step(a, k, dom);
      for (int q = 0; q < p; ++q) te *= s;
    }
    out += te;
  }
  return synchronize(out, dom) - g;
}

}  // namespace

std::vector<TelescopingSolution> solve_telescoping(const std::vector<Expr>& F0, int k, const Domain& dom,
                                                   int extra_degree) {
  const size_t m = F0.size();
  std::vector<Expr> F;
  for (const auto& f : F0) F.push_back(synchronize(f, dom));
  Ansatz az(k, dom);
  std::vector<std::map<int, RatFun>> fparts;
  for (const auto& f : F) fparts.push_back(az.decompose(f));
  az.close();
  const auto& keys = az.keys();

  // Levels, highest profile first.
  std::vector<std::vector<int>> levels;
  {
    std::vector<int> order(keys.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return compare_profiles(keys[a].prof, keys[b].prof) > 0; });
    for (int i : order) {
      if (levels.empty() || compare_profiles(keys[levels.back().front()].prof, keys[i].prof) != 0) levels.emplace_back();
      levels.back().push_back(i);
    }
  }

  std::vector<Param> params(m);
  for (size_t s = 0; s < m; ++s) {
    params[s].c.assign(m, RatFun());
    params[s].c[s] = RatFun(1L);
  }

  for (const auto& level : levels) {
    std::vector<std::map<int, RatFun>> pend;
    for (const auto& p : params) pend.push_back(az.decompose(p.pending));
    std::vector<GosperBlock> blocks;
    for (int key : level) {
      GosperBlock b;
      b.rho = az.rho(keys[key].cls);
      for (size_t s = 0; s < params.size(); ++s) {
        RatFun q;
        for (size_t i = 0; i < m; ++i) {
          auto it = fparts[i].find(key);
          if (it != fparts[i].end() && !params[s].c[i].is_zero()) q += params[s].c[i] * it->second;
        }
        if (auto it = pend[s].find(key); it != pend[s].end()) q -= it->second;
        b.q.push_back(q);
      }
      blocks.push_back(std::move(b));
    }
    auto sols = parameterized_gosper_blocks(blocks, params.size(), k, extra_degree);
    if (sols.empty()) return {};
    std::vector<Param> next;
    for (const auto& sol : sols) {
      Param np;
      np.c.assign(m, RatFun());
      for (size_t s = 0; s < params.size(); ++s) {
        const RatFun& w = sol.c[s];
        if (w.is_zero()) continue;
        for (size_t i = 0; i < m; ++i) np.c[i] += w * params[s].c[i];
        for (const auto& [key, r] : params[s].R) np.R[key] += w * r;
        np.pending += params[s].pending.scaled(w);
      }
      for (size_t b = 0; b < level.size(); ++b) {
        const RatFun& r = sol.ratio[b];
        if (r.is_zero()) continue;
        int key = level[b];
        np.R[key] = r;
        np.pending += keys[key].diff.scaled(r.shift(k, 1) * az.rho(keys[key].cls));
      }
      next.push_back(std::move(np));
    }
    params = std::move(next);
  }

  std::vector<TelescopingSolution> out;
  for (const auto& p : params) {
    bool any = false;
    for (const auto& c : p.c) any |= !c.is_zero();
    if (!any) continue;
    Expr g;
    for (const auto& [key, r] : p.R)
      if (!r.is_zero()) g += (kernel_expr(az.ref(keys[key].cls)) * mono_expr(keys[key].mono)).scaled(r);
    Expr check = delta_k(g, k, dom);
    for (size_t i = 0; i < m; ++i) check -= F[i].scaled(p.c[i]);
    if (!is_zero_nested(check, dom)) throw std::logic_error("telescoping solution failed its check");
    out.push_back(TelescopingSolution{p.c, g});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shifts in a parameter

namespace {

Expr shift_step(const Expr& e, int n, const Domain& dom);

struct RelationCache {
  std::vector<std::tuple<AtomPtr, int, Expr>> entries;
};

RelationCache& relation_cache() {
  static RelationCache c;
  return c;
}

Expr slices(const Expr& body, int var, const Affine& from, long count, const Domain& dom) {
  Expr acc;
  for (long t = 0; t < count; ++t) acc += substitute(body, var, from + Affine(t), dom);
  return acc;
}

// The sum atom a at n + 1 in terms of a at n.
Expr shifted_sum(const AtomPtr& a, int n, const Domain& dom) {
  for (const auto& [b, v, e] : relation_cache().entries)
    if (v == n && compare_atoms(a, b) == 0) return e;
  int i = a->var;
  Domain inner = dom.with_range(i, a->lo, a->arg);
  Expr b0 = synchronize(a->body, inner);
  Expr b1 = shift_step(b0, n, inner);
  std::optional<TelescopingSolution> rel;
  for (auto& s : solve_telescoping({b0, b1}, i, inner))
    if (!s.c[1].is_zero()) {
      rel = std::move(s);
      break;
    }
  if (!rel) throw Unsupported("no shift relation in " + symbol_name(n) + " for a sum");
  const Affine &P = a->arg, &lo = a->lo;
  Expr core = substitute(rel->g, i, P + Affine(1L), dom) - substitute(rel->g, i, lo, dom) -
              Expr::atom(a).scaled(rel->c[0]);
  core = core.scaled(rel->c[1].inverse());
  long dP = P.coeff(n).get_si(), dl = lo.coeff(n).get_si();
  if (dP > 0) core += slices(b1, i, P + Affine(1L), dP, dom);
  if (dP < 0) core -= slices(b1, i, P + Affine(dP + 1), -dP, dom);
  if (dl > 0) core -= slices(b1, i, lo, dl, dom);
  if (dl < 0) core += slices(b1, i, lo + Affine(dl), -dl, dom);
  core = synchronize(core, dom);
  relation_cache().entries.emplace_back(a, n, core);
  return core;
}

Expr shift_step(const Expr& e, int n, const Domain& dom) {
  Expr out;
  for (const auto& t : e.terms) {
    Expr te = shift(Expr::from_term(Term{t.coef, t.ker, {}}), n, 1);
    for (const auto& [a, p] : t.mono) {
      if (a->kind == SumAtom::Kind::Generic && a->body.has_var(n)) {
        if (p < 0) throw Unsupported("negative power of a sum");
        Expr s = shifted_sum(a, n, dom);
        for (int q = 0; q < p; ++q) te *= s;
      } else {
        te *= shift(Expr::atom(a, p), n, 1);
      }
    }
    out += te;
  }
  return synchronize(out, dom);
}

}  // namespace

Expr shift_in(const Expr& e, int n, long i, const Domain& dom) {
  if (i < 0) throw std::invalid_argument("shift_in needs a nonnegative shift");
  Expr out = synchronize(e, dom);
  for (long s = 0; s < i; ++s) out = shift_step(out, n, dom);
  return out;
}

// ---------------------------------------------------------------------------

RatFun normalize_recurrence(std::vector<RatFun>& coeffs) {
  MPoly L(1L);
  for (const auto& c : coeffs)
    if (!c.is_zero()) L = mpoly_exact_div(L * c.den(), mpoly_gcd(L, c.den()));
  MPoly G;
  for (const auto& c : coeffs)
    if (!c.is_zero()) G = mpoly_gcd(G, (c * RatFun(L)).num());
  RatFun factor = RatFun::make(L, G.is_zero() ? MPoly(1L) : G);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    if (!it->is_zero()) {
      if ((*it * factor).num().base_lead() < 0) factor = -factor;
      break;
    }
  for (auto& c : coeffs) c *= factor;
  return factor;
}

bool summand_recurrence_holds(const SummandRecurrence& rec, const Domain& dom) {
  Expr check = delta_k(rec.certificate, rec.k, dom);
  for (size_t i = 0; i < rec.coeffs.size(); ++i) check -= rec.shifted[i].scaled(rec.coeffs[i]);
  return is_zero_nested(check, dom);
}

std::optional<SummandRecurrence> creative_telescoping(const Expr& f, int n, int k, const Domain& dom, int d_max) {
  std::vector<Expr> F{synchronize(f, dom)};
  for (int d = 1; d <= d_max; ++d) {
    F.push_back(shift_step(F.back(), n, dom));
    std::vector<TelescopingSolution> sols;
    for (int extra : {0, 4}) {
      sols = solve_telescoping(F, k, dom, extra);
      if (!sols.empty()) break;
    }
    if (sols.empty()) continue;
    SummandRecurrence rec;
    rec.n = n;
    rec.k = k;
    rec.coeffs = sols[0].c;
    RatFun factor = normalize_recurrence(rec.coeffs);
    rec.certificate = sols[0].g.scaled(factor);
    rec.shifted = F;
    rec.lower_orders_fail = true;
    if (!summand_recurrence_holds(rec, dom)) throw std::logic_error("summand recurrence failed its check");
    return rec;
  }
  return std::nullopt;
}

std::optional<Expr> plain_telescoping_tower(const Expr& f, int k, const Domain& dom) {
  for (const auto& s : solve_telescoping({f}, k, dom))
    if (!s.c[0].is_zero()) return s.g.scaled(s.c[0].inverse());
  const Range* r = dom.find(k);
  Affine lo = r ? r->lo : Affine(1L);
  int i = fresh_symbol("i");
  Expr body = substitute(f, k, Affine::variable(i), Domain());
  auto g = nested_sum(body, i, lo, Affine::variable(k) - Affine(1L), dom);
  if (!g) return std::nullopt;
  if (!is_zero_nested(delta_k(*g, k, dom) - f, dom)) return std::nullopt;
  return g;
}

Expr telescoped_sum(const Expr& g, const Expr& f, int k, const Affine& lo, const Affine& hi, const Domain& dom,
                    const Domain* check) {
  Domain outer = check ? *check : dom.without(k);
  for (long t = 0; t <= 3; ++t)
    for (long u = 0; u <= 3; ++u) {
      try {
        Expr top = substitute(g, k, hi + Affine(1 - t), dom), bot = substitute(g, k, lo + Affine(u), dom);
        Expr out = top - bot + slices(f, k, hi + Affine(1 - t), t, dom) + slices(f, k, lo, u, dom);
        if (regular_on(out, outer)) return out;
      } catch (const Unsupported&) {
      }
    }
  throw Unsupported("certificate singular near both ends of the range");
}

LinearRecurrence sum_recurrence(const Affine& lo, const Affine& hi, const SummandRecurrence& rec, const Domain& dom) {
  const int n = rec.n, k = rec.k;
  Expr lhs;
  for (size_t i = 0; i < rec.coeffs.size(); ++i) lhs += rec.shifted[i].scaled(rec.coeffs[i]);
  // The recurrence is used for n up to its upper end minus the order.
  Domain check = dom.without(k);
  if (const Range* r = check.find(n); r && r->hi)
    check = check.with_range(n, r->lo, *r->hi - Affine(static_cast<long>(rec.order())));
  Expr rhs = telescoped_sum(rec.certificate, lhs, k, lo, hi, dom, &check);
  for (size_t i = 0; i < rec.coeffs.size(); ++i) {
    if (rec.coeffs[i].is_zero()) continue;
    // Plain shift, unsynchronised: the relation-based or synchronised forms
    // of a shifted generic sum can be singular just outside the range of k,
    // where these slices are taken.
    Expr Fi = shift(rec.shifted[0], n, static_cast<long>(i));
    long dh = hi.coeff(n).get_si() * static_cast<long>(i), dl = lo.coeff(n).get_si() * static_cast<long>(i);
    Expr comp;
    if (dh > 0) comp += slices(Fi, k, hi + Affine(1L), dh, dom);
    if (dh < 0) comp -= slices(Fi, k, hi + Affine(dh + 1), -dh, dom);
    if (dl > 0) comp -= slices(Fi, k, lo, dl, dom);
    if (dl < 0) comp += slices(Fi, k, lo + Affine(dl), -dl, dom);
    rhs += comp.scaled(rec.coeffs[i]);
  }
  LinearRecurrence out;
  out.var = n;
  out.coeffs = rec.coeffs;
  out.rhs = synchronize(rhs, dom.without(k));
  return out;
}

}  // namespace telesum
