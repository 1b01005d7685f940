#include "telesum/recsolver.hpp"

#include <algorithm>

#include "telesum/sumalgebra.hpp"
#include "telesum/symbols.hpp"

namespace telesum {

namespace {

std::optional<RatFun> as_ratfun(const Expr& e) {
  RatFun r;
  for (const Term& t : e.canon().terms) {
    if (!t.ker.is_one() || !t.mono.empty()) return std::nullopt;
    r += t.coef;
  }
  return r;
}

// Coefficients in n, low to high; the denominator must be free of n.
std::vector<RatFun> coeffs_n(const RatFun& p, int n) {
  if (p.den().has_var(n)) throw Unsupported("coefficient is not polynomial in the recurrence variable");
  std::vector<RatFun> out;
  if (p.is_zero()) return out;
  for (const MPoly& c : p.num().coeffs_in(n)) out.push_back(RatFun::make(c, p.den()));
  while (!out.empty() && out.back().is_zero()) out.pop_back();
  return out;
}

int deg_n(const RatFun& p, int n) { return static_cast<int>(coeffs_n(p, n).size()) - 1; }

// Nonnegative integers D with sum_k I[k] D^k = 0 for every value of the
// parameters.
std::vector<long> nonneg_integer_roots(const std::vector<RatFun>& I) {
  int D = fresh_symbol("D");
  MPoly den(1L);
  for (const RatFun& c : I) den = den * mpoly_exact_div(c.den(), mpoly_gcd(den, c.den()));
  MPoly P;
  for (size_t k = 0; k < I.size(); ++k)
    P += mpoly_exact_div(den * I[k].num(), I[k].den()) * MPoly::var_power(D, static_cast<int>(k));
  if (P.is_zero()) throw Unsupported("indicial polynomial vanishes identically");
  std::map<std::vector<std::pair<int, int>>, Polynomial> parts;
  for (const auto& [mono, c] : mpoly_terms(P)) {
    std::vector<std::pair<int, int>> rest;
    int dexp = 0;
    for (const auto& [v, e] : mono) {
      if (v == D)
        dexp = e;
      else
        rest.emplace_back(v, e);
    }
    parts[rest] = parts[rest] + Polynomial::monomial(c, dexp);
  }
  Polynomial g;
  bool first = true;
  for (const auto& [m, p] : parts) {
    g = first ? p : poly_gcd(g, p);
    first = false;
  }
  std::vector<long> out;
  if (g.degree() <= 0) return out;
  for (const Integer& r : integer_roots(g))
    if (r >= 0) out.push_back(r.get_si());
  return out;
}

struct PolyCore {
  std::vector<RatFun> hom;
  std::optional<RatFun> part;
};

constexpr long kMaxDegree = 80;

// Polynomial solutions of sum_i c[i](n) y(n+i) = h(n), c and h polynomial
// in n.
PolyCore poly_solve(const std::vector<RatFun>& c, const RatFun& h, int n) {
  const long d = static_cast<long>(c.size()) - 1;
  std::vector<RatFun> b(c.size());
  for (long l = 0; l <= d; ++l)
    for (long i = l; i <= d; ++i) b[l] += c[i] * RatFun(Rational(binomial(Integer(i), l)));
  long beta = 0;
  bool any = false;
  for (long l = 0; l <= d; ++l) {
    if (b[l].is_zero()) continue;
    long v = deg_n(b[l], n) - l;
    if (!any || v > beta) beta = v;
    any = true;
  }
  if (!any) throw Unsupported("recurrence with zero operator");
  // I(D) = sum over extremal l of lc(b_l) * D (D-1) ... (D-l+1).
  std::vector<RatFun> I(1, RatFun());
  for (long l = 0; l <= d; ++l) {
    if (b[l].is_zero() || deg_n(b[l], n) - l != beta) continue;
    RatFun lc = coeffs_n(b[l], n).back();
    std::vector<RatFun> fall{RatFun(1L)};
    for (long t = 0; t < l; ++t) {
      std::vector<RatFun> nx(fall.size() + 1);
      for (size_t s = 0; s < fall.size(); ++s) {
        nx[s + 1] += fall[s];
        nx[s] -= fall[s] * RatFun(t);
      }
      fall = nx;
    }
    if (I.size() < fall.size()) I.resize(fall.size());
    for (size_t s = 0; s < fall.size(); ++s) I[s] += lc * fall[s];
  }
  long bound = -1;
  if (!h.is_zero()) bound = deg_n(h, n) - beta;
  for (long r : nonneg_integer_roots(I)) bound = std::max(bound, r);
  PolyCore out;
  if (bound < 0) return out;
  if (bound > kMaxDegree) throw Unsupported("degree bound too large");

  const size_t na = static_cast<size_t>(bound) + 1;
  const bool inhom = !h.is_zero();
  std::vector<std::vector<RatFun>> cols;
  const MPoly N = MPoly::variable(n);
  for (size_t k = 0; k < na; ++k) {
    RatFun e;
    for (long i = 0; i <= d; ++i)
      if (!c[i].is_zero()) e += c[i] * RatFun((N + MPoly(i)).pow(static_cast<int>(k)));
    cols.push_back(coeffs_n(e, n));
  }
  if (inhom) cols.push_back(coeffs_n(-h, n));
  size_t nrows = 0;
  for (const auto& col : cols) nrows = std::max(nrows, col.size());
  std::vector<std::vector<RatFun>> rows(nrows, std::vector<RatFun>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t t = 0; t < cols[j].size(); ++t) rows[t][j] = cols[j][t];
  auto basis = nullspace(rows, cols.size());
  auto poly_of = [&](const std::vector<RatFun>& v) {
    RatFun p;
    for (size_t k = 0; k < na; ++k) p += v[k] * RatFun(MPoly::var_power(n, static_cast<int>(k)));
    return p;
  };
  std::optional<std::vector<RatFun>> piv;
  for (const auto& v : basis)
    if (inhom && !v[na].is_zero()) {
      piv = v;
      break;
    }
  if (piv) {
    RatFun lam = (*piv)[na];
    for (auto& x : *piv) x /= lam;
    out.part = poly_of(*piv);
  }
  for (auto v : basis) {
    if (inhom && !v[na].is_zero()) {
      RatFun lam = v[na];
      for (size_t k = 0; k <= na; ++k) v[k] -= lam * (*piv)[k];
    }
    RatFun p = poly_of(v);
    if (!p.is_zero()) out.hom.push_back(p);
  }
  return out;
}

// Copy of the coefficients made polynomial; h scaled along.
std::vector<RatFun> polynomial_coeffs(const LinearRecurrence& rec, RatFun& h) {
  std::vector<RatFun> c = rec.coeffs;
  RatFun f = normalize_recurrence(c);
  h *= f;
  return c;
}

RatFun rhs_ratfun(const LinearRecurrence& rec) {
  auto h = as_ratfun(rec.rhs);
  if (!h) throw Unsupported("rhs is not a rational function");
  return *h;
}

// Abramov's universal denominator, then polynomial solutions of the
// numerator recurrence.
PolyCore rat_solve(std::vector<RatFun> c, RatFun h, int n) {
  const long d = static_cast<long>(c.size()) - 1;
  RatFun hd(h.den());
  for (auto& x : c) x *= hd;
  h = RatFun(h.num());
  MPoly A = c[0].num(), B = c[d].num().shift(n, Rational(-d));
  MPoly U(1L);
  std::vector<Integer> disp = dispersion_set_in(A, B, n);
  std::sort(disp.rbegin(), disp.rend());
  for (const Integer& hh : disp) {
    long s = hh.get_si();
    MPoly g = mpoly_gcd(A, B.shift(n, Rational(s)));
    if (g.degree(n) <= 0) continue;
    A = mpoly_exact_div(A, g);
    B = mpoly_exact_div(B, g.shift(n, Rational(-s)));
    for (long i = 0; i <= s; ++i) U *= g.shift(n, Rational(-i));
  }
  MPoly L(1L);
  for (long i = 0; i <= d; ++i) {
    MPoly Ui = U.shift(n, Rational(i));
    L = mpoly_exact_div(L * Ui, mpoly_gcd(L, Ui));
  }
  std::vector<RatFun> e(c.size());
  for (long i = 0; i <= d; ++i) e[i] = c[i] * RatFun::make(L, U.shift(n, Rational(i)));
  PolyCore z = poly_solve(e, h * RatFun(L), n);
  PolyCore out;
  RatFun Ur(U);
  for (const auto& p : z.hom) out.hom.push_back(p / Ur);
  if (z.part) out.part = *z.part / Ur;
  return out;
}

SolutionSet from_core(const PolyCore& core) {
  SolutionSet s;
  for (const auto& p : core.hom) s.homogeneous.push_back(Expr(p));
  if (core.part) s.particular = Expr(*core.part);
  s.complete = true;
  return s;
}

Affine anchor_of(int n, const Domain& dom) {
  const Range* r = dom.find(n);
  return r ? r->lo : Affine(0L);
}

// H with H(n+1)/H(n) = ratio and H(n0) = 1, as a single term. The linear
// factors of ratio are checked for sign on the range n0 <= i <= hi - 1.
std::optional<Expr> hyper_from_ratio(const RatFun& ratio, int n, const Domain& dom) {
  if (ratio.is_zero()) return std::nullopt;
  const Range* rg = dom.find(n);
  Affine n0 = rg ? rg->lo : Affine(0L);
  std::optional<Affine> hi;
  if (rg && rg->hi) hi = *rg->hi - Affine(1L);
  Domain rdom = dom.with_range(n, n0, hi);
  Affine N = Affine::variable(n);

  Kernel ker;
  RatFun coef(1L);
  Rational z(1);
  auto take = [&](const MPoly& p, int sgn) -> bool {
    MPoly rest;
    auto roots = affine_roots(p, n, &rest);
    if (rest.has_var(n) || !rest.is_constant()) return false;
    if (sgn > 0)
      z *= rest.constant_value();
    else
      z /= rest.constant_value();
    // prod_{i=n0}^{n-1} L(i)^e for an integral linear form L.
    auto linear = [&](const Affine& L, int e) -> bool {
      if (auto m = rdom.min(L); m && *m >= 1) {
        ker.mul_fact(L - Affine(1L), e, coef);
        ker.mul_fact(L.subs(n, n0) - Affine(1L), -e, coef);
      } else if (auto M = rdom.max(L); M && *M <= -1) {
        ker.mul_fact(-L, -e, coef);
        ker.mul_fact(-L.subs(n, n0), e, coef);
        if (e % 2 != 0) ker.mul_sign(N - n0, coef);
      } else {
        return false;
      }
      return true;
    };
    for (const auto& r : roots) {
      int e = sgn * r.multiplicity;
      if (auto alpha = Affine::from_mpoly(r.root)) {
        if (!linear(N - *alpha, e)) return false;
        continue;
      }
      // Half-integer root: i - alpha = (2i + b)/2 with b odd, and
      // prod (2i + b) = (2n + b - 1)!/(2n0 + b - 1)! / prod 2(i + (b + 1)/2).
      auto twice = Affine::from_mpoly(r.root * MPoly(2L));
      if (!twice) return false;
      Affine L2 = N * 2 - *twice;
      if (auto m = rdom.min(L2); !m || *m < 1) return false;
      ker.mul_fact(L2 - Affine(1L), e, coef);
      ker.mul_fact(L2.subs(n, n0) - Affine(1L), -e, coef);
      auto alpha2 = Affine::from_mpoly(r.root - MPoly(Rational(1, 2)));
      if (!alpha2 || !linear(N - *alpha2, -e)) return false;
      z *= power(Rational(1, 4), e);
    }
    return true;
  };
  try {
    if (!take(ratio.num(), 1) || !take(ratio.den(), -1)) return std::nullopt;
    if (z != 1) kernel_mul_power(ker, z, N - n0, coef);
  } catch (const Unsupported&) {
    return std::nullopt;
  }
  Term t{coef, ker, {}};
  RatFun q = t.coef.shift(n, 1) / t.coef * t.ker.shift_ratio(n, 1);
  if (q != ratio) throw std::logic_error("hypergeometric term does not reproduce its shift quotient");
  return Expr::from_term(t);
}

RatFun shift_quotient_of(const Expr& H, int n, long i) {
  const Term& t = H.terms.at(0);
  return t.coef.shift(n, Rational(i)) / t.coef * t.ker.shift_ratio(n, i);
}

Expr inverse_term(const Expr& H) {
  if (H.terms.size() != 1 || !H.terms[0].mono.empty()) throw Unsupported("not a single term");
  const Term& t = H.terms[0];
  return Expr::from_term(Term{t.coef.inverse(), t.ker.inverse(), {}});
}

constexpr size_t kMaxCandidates = 4096;

std::vector<std::vector<std::pair<MPoly, int>>> monic_divisors(const MPoly& p, int n, bool* complete) {
  MPoly rest;
  auto roots = affine_roots(p, n, &rest);
  if (rest.has_var(n)) *complete = false;
  std::vector<std::vector<std::pair<MPoly, int>>> out{{}};
  for (const auto& r : roots) {
    std::vector<std::vector<std::pair<MPoly, int>>> nx;
    for (const auto& base : out)
      for (int e = 0; e <= r.multiplicity; ++e) {
        auto v = base;
        if (e > 0) v.emplace_back(MPoly::variable(n) - r.root, e);
        nx.push_back(std::move(v));
      }
    out = std::move(nx);
  }
  return out;
}

MPoly product_of(const std::vector<std::pair<MPoly, int>>& fs) {
  MPoly p(1L);
  for (const auto& [f, e] : fs) p *= f.pow(e);
  return p;
}

}  // namespace

SolutionSet polynomial_solutions(const LinearRecurrence& rec) {
  RatFun h = rhs_ratfun(rec);
  auto c = polynomial_coeffs(rec, h);
  if (h.den().has_var(rec.var)) throw Unsupported("rhs is not polynomial in the recurrence variable");
  return from_core(poly_solve(c, h, rec.var));
}

SolutionSet rational_solutions(const LinearRecurrence& rec) {
  RatFun h = rhs_ratfun(rec);
  auto c = polynomial_coeffs(rec, h);
  return from_core(rat_solve(c, h, rec.var));
}

std::vector<HypergeometricTerm> hypergeometric_solutions(const LinearRecurrence& rec, const Domain& dom,
                                                         bool* complete) {
  bool ok = true;
  const int n = rec.var;
  RatFun unused;
  auto c = polynomial_coeffs(LinearRecurrence{n, rec.coeffs, Expr()}, unused);
  const long d = static_cast<long>(c.size()) - 1;
  std::vector<RatFun> ratios;
  if (d < 1) {
    if (complete) *complete = true;
    return {};
  }
  if (d == 1) {
    ratios.push_back(-c[0] / c[1]);
  } else {
    auto as = monic_divisors(c[0].num(), n, &ok);
    auto bs = monic_divisors(c[d].num().shift(n, Rational(1 - d)), n, &ok);
    if (as.size() * bs.size() > kMaxCandidates) throw Unsupported("too many hypergeometric candidates");
    for (const auto& af : as)
      for (const auto& bf : bs) {
        MPoly a = product_of(af), b = product_of(bf);
        std::vector<MPoly> P(c.size());
        int m = 0;
        for (long i = 0; i <= d; ++i) {
          MPoly p = c[i].num();
          for (long j = 0; j < i; ++j) p *= a.shift(n, Rational(j));
          for (long j = i; j < d; ++j) p *= b.shift(n, Rational(j));
          P[i] = p;
          if (!p.is_zero()) m = std::max(m, p.degree(n));
        }
        Polynomial Z;
        bool constant = true;
        for (long i = 0; i <= d; ++i) {
          auto cs = P[i].coeffs_in(n);
          MPoly al = m < static_cast<int>(cs.size()) ? cs[m] : MPoly();
          if (!al.is_constant()) {
            constant = false;
            break;
          }
          Z = Z + Polynomial::monomial(al.constant_value(), static_cast<int>(i));
        }
        if (!constant) {
          ok = false;
          continue;
        }
        if (Z.is_zero()) continue;
        for (const Rational& z : rational_roots(Z)) {
          if (z == 0) continue;
          std::vector<RatFun> e(c.size());
          for (long i = 0; i <= d; ++i) e[i] = RatFun(P[i]) * RatFun(power(z, static_cast<long>(i)));
          PolyCore pc;
          try {
            pc = poly_solve(e, RatFun(), n);
          } catch (const Unsupported&) {
            ok = false;
            continue;
          }
          for (const RatFun& cp : pc.hom) {
            RatFun r = RatFun(z) * RatFun::make(a, b) * cp.shift(n, 1) / cp;
            if (std::find(ratios.begin(), ratios.end(), r) == ratios.end()) ratios.push_back(r);
          }
        }
      }
  }
  std::vector<HypergeometricTerm> out;
  for (const RatFun& r : ratios) {
    auto H = hyper_from_ratio(r, n, dom);
    if (!H) {
      ok = false;
      continue;
    }
    out.push_back(HypergeometricTerm{*H, n});
  }
  if (complete) *complete = ok;
  return out;
}

// sum_{i=lo}^{hi} G for a hypergeometric class G that does not telescope:
// G = c B + delta g with B the class kernel stripped of its offsets, times 1
// or 1/(i + a). The remaining sum of B becomes a generic atom.
std::optional<Expr> reduced_sum(const Expr& G, int i, const Affine& lo, const Affine& hi, const Domain& di) {
  for (const auto& t : G.terms)
    if (!t.mono.empty()) return std::nullopt;
  Kernel K0 = G.terms.at(0).ker;
  for (auto& [key, fe] : K0.facts)
    if (key == Affine::variable(i, key.coeff(i))) fe.offset = 0;
  RatFun x = RatFun::variable(i);
  std::vector<RatFun> cands{RatFun(1L)};
  for (long a : {0L, 1L, -1L, 2L, -2L})
    if (auto m = di.min(Affine::variable(i) + Affine(a)); m && *m >= 1) cands.push_back((x + RatFun(a)).inverse());
  for (const RatFun& r : cands) {
    Expr B = Expr::from_term(Term{r, K0, {}});
    try {
      for (const auto& s : solve_telescoping({G, B}, i, di)) {
        if (s.c[0].is_zero() || s.c[1].is_zero()) continue;
        Expr both = G.scaled(s.c[0]) + B.scaled(s.c[1]);
        Expr tele = telescoped_sum(s.g, both, i, lo, hi, di);
        Expr rest = Expr::atom(make_generic(i, lo, hi, B)).scaled(s.c[1]);
        return (tele - rest).scaled(s.c[0].inverse());
      }
    } catch (const Unsupported&) {
    }
  }
  return std::nullopt;
}

Expr indefinite_sum(const Expr& T, int var, const Affine& lo, const Affine& hi, const Domain& dom) {
  if (T.is_zero()) return Expr();
  int i = fresh_symbol("i");
  Expr Ti = substitute(T, var, Affine::variable(i), Domain()).canon();
  Domain di = dom.with_range(i, lo, hi);
  std::vector<Expr> groups;
  std::vector<Kernel> keys;
  for (const Term& t : Ti.terms) {
    size_t g = 0;
    while (g < keys.size() && !Kernel::same_class(keys[g], t.ker)) ++g;
    if (g == keys.size()) {
      keys.push_back(t.ker);
      groups.emplace_back();
    }
    groups[g].terms.push_back(t);
  }
  Expr out;
  for (const Expr& G : groups) {
    bool done = false;
    try {
      for (const auto& s : solve_telescoping({G}, i, di)) {
        if (s.c[0].is_zero()) continue;
        Expr g = s.g.scaled(s.c[0].inverse());
        out += telescoped_sum(g, G, i, lo, hi, di);
        done = true;
        break;
      }
    } catch (const Unsupported&) {
    }
    if (done) continue;
    std::optional<Expr> ns;
    try {
      ns = nested_sum(G, i, lo, hi, dom);
    } catch (const Unsupported&) {
    }
    if (ns) {
      out += *ns;
      continue;
    }
    if (auto red = reduced_sum(G, i, lo, hi, di)) {
      out += *red;
      continue;
    }
    out += Expr::atom(make_generic(i, lo, hi, G));
  }
  return synchronize(out, dom).canon();
}

SolutionSet dalembertian_solutions(const LinearRecurrence& rec, const Domain& dom, const HypergeometricFinder& finder) {
  const int n = rec.var;
  SolutionSet out;
  out.anchor = anchor_of(n, dom);
  std::vector<RatFun> c = rec.coeffs;
  RatFun f = normalize_recurrence(c);
  Expr rhs = rec.rhs.scaled(f);
  const long d = static_cast<long>(c.size()) - 1;
  if (d < 0) throw Unsupported("empty recurrence");
  if (d == 0) {
    out.particular = rhs.scaled(c[0].inverse()).canon();
    out.complete = true;
    return out;
  }
  bool comp = true;
  auto hs = finder(LinearRecurrence{n, c, rhs}, dom, &comp);
  if (hs.empty()) {
    out.complete = false;
    return out;
  }
  const Expr& H = hs[0].term;
  std::vector<RatFun> e(c.size());
  for (long i = 0; i <= d; ++i) e[i] = c[i] * shift_quotient_of(H, n, i);
  LinearRecurrence red;
  red.var = n;
  red.coeffs.resize(static_cast<size_t>(d));
  for (long l = 0; l < d; ++l)
    for (long i = l + 1; i <= d; ++i) red.coeffs[l] += e[i];
  red.rhs = (rhs * inverse_term(H)).canon();
  SolutionSet sub = dalembertian_solutions(red, dom, finder);
  Affine upper = Affine::variable(n) - Affine(1L);
  out.homogeneous.push_back(H);
  for (const Expr& w : sub.homogeneous) out.homogeneous.push_back((H * indefinite_sum(w, n, out.anchor, upper, dom)).canon());
  if (sub.particular) out.particular = (H * indefinite_sum(*sub.particular, n, out.anchor, upper, dom)).canon();
  out.complete = comp && sub.complete && sub.particular.has_value();
  return out;
}

Expr simplify_depth(const Expr& e, const Domain& dom) {
  Expr x = generic_to_nested(e, dom);
  try {
    x = reduce_to_basis(x, 4).first;
  } catch (const Unsupported&) {
  }
  return x.canon();
}

SolutionSet simplify_solution_depth(const SolutionSet& s, const Domain& dom) {
  SolutionSet out = s;
  for (auto& h : out.homogeneous) h = simplify_depth(h, dom);
  if (out.particular) out.particular = simplify_depth(*out.particular, dom);
  return out;
}

Expr recurrence_residual(const LinearRecurrence& rec, const Expr& y, const Domain& dom) {
  Expr acc = -rec.rhs;
  for (size_t i = 0; i < rec.coeffs.size(); ++i)
    if (!rec.coeffs[i].is_zero()) acc += shift_in(y, rec.var, static_cast<long>(i), dom).scaled(rec.coeffs[i]);
  return linearize_products(synchronize(acc, dom)).canon();
}

}  // namespace telesum
