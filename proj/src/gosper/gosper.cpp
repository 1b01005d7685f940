#include "telesum/gosper.hpp"

#include <algorithm>

namespace telesum {

RatFun HypergeometricTerm::shift_quotient() const {
  if (term.terms.empty()) return RatFun(1L);
  const Term& t = term.terms[0];
  return t.coef.shift(var, 1) / t.coef * t.ker.shift_ratio(var, 1);
}

HypergeometricTerm make_hypergeometric(const Expr& e, int var) {
  if (e.terms.size() > 1) throw Unsupported("not a single hypergeometric term");
  for (const auto& t : e.terms)
    for (const auto& [a, p] : t.mono)
      if (Expr::atom(a).has_var(var)) throw Unsupported("nested sum depending on the summation variable");
  return HypergeometricTerm{e, var};
}

namespace {

MPoly lcm(const MPoly& a, const MPoly& b) {
  MPoly g = mpoly_gcd(a, b);
  return mpoly_exact_div(a, g) * b;
}

// Univariate image of p in k with the other variables at sample values.
std::optional<Polynomial> specialize(const MPoly& p, int k, const std::map<int, Rational>& env) {
  MPoly s = p.subs(env);
  if (s.degree(k) != p.degree(k)) return std::nullopt;
  return s.to_univariate(k);
}

}  // namespace

std::vector<Integer> dispersion_set_in(const MPoly& p, const MPoly& q, int k) {
  if (p.degree(k) == 0 || q.degree(k) == 0) return {};
  std::set<int> vs = p.vars();
  q.collect_vars(vs);
  vs.erase(k);
  for (int trial = 0; trial < 8; ++trial) {
    std::map<int, Rational> env;
    long i = 0;
    for (int v : vs) env[v] = Rational(1009 + 37 * i++ + 311 * trial);
    auto ps = specialize(p, k, env), qs = specialize(q, k, env);
    if (!ps || !qs) continue;
    std::vector<Integer> out;
    for (const Integer& h : dispersion_set(*ps, *qs)) {
      MPoly g = mpoly_gcd(p, q.shift(k, Rational(h)));
      if (g.degree(k) > 0) out.push_back(h);
    }
    return out;
  }
  throw Unsupported("no admissible specialization for the dispersion computation");
}

GosperForm gosper_form(const RatFun& rho, int k) {
  GosperForm f{rho.num(), rho.den(), MPoly(1L)};
  for (const Integer& h : dispersion_set_in(f.a, f.b, k)) {
    if (h == 0) continue;
    MPoly g = mpoly_gcd(f.a, f.b.shift(k, Rational(h)));
    if (g.degree(k) == 0) continue;
    f.a = mpoly_exact_div(f.a, g);
    f.b = mpoly_exact_div(f.b, g.shift(k, Rational(-h)));
    for (long i = 1; i <= h.get_si(); ++i) f.c *= g.shift(k, Rational(-i));
  }
  return f;
}

namespace {

// One block of the linear system: x(k) = sum_i x_i k^i solves
// A x(k+1) - B x(k) = sum_l c_l rhs_l, and R = x B / (c D).
struct BlockSystem {
  MPoly A, B, scale_den;
  std::vector<MPoly> rhs;
  size_t nx = 0;
};

BlockSystem block_system(const GosperBlock& blk, int k, int extra_degree) {
  MPoly D(1L);
  for (const auto& r : blk.q) D = lcm(D, r.den());
  RatFun rho2 = blk.rho * RatFun::make(D, D.shift(k, 1));
  GosperForm gf = gosper_form(rho2, k);
  BlockSystem s;
  s.A = gf.a;
  s.B = gf.b.shift(k, -1);
  s.scale_den = gf.c * D;
  int rd = -1;
  for (const auto& r : blk.q) {
    s.rhs.push_back(gf.c * r.num() * mpoly_exact_div(D, r.den()));
    if (!s.rhs.back().is_zero()) rd = std::max(rd, s.rhs.back().degree(k));
  }
  int dA = s.A.degree(k), dB = s.B.degree(k);
  int dx;
  MPoly lA = s.A.lead_coeff(k), lB = s.B.lead_coeff(k);
  if (dA != dB || lA != lB) {
    dx = rd - std::max(dA, dB);
  } else {
    dx = rd - dA + 1;
    auto ca = s.A.coeffs_in(k), cb = s.B.coeffs_in(k);
    if (dA >= 1) {
      RatFun e0 = RatFun::make(cb[dA - 1] - ca[dA - 1], lA);
      if (e0.is_constant() && is_integer(e0.constant_value()) && e0.constant_value() >= 0)
        dx = std::max(dx, static_cast<int>(e0.constant_value().get_num().get_si()));
    }
  }
  dx = std::max(dx, -1);
  if (extra_degree > 0) dx += extra_degree;
  s.nx = static_cast<size_t>(dx + 1);
  return s;
}

}  // namespace

std::vector<BlockSolution> parameterized_gosper_blocks(const std::vector<GosperBlock>& blocks, size_t nparams, int k,
                                                       int extra_degree) {
  std::vector<BlockSystem> sys;
  size_t ncols = nparams;
  for (const auto& b : blocks) {
    if (b.q.size() != nparams) throw std::logic_error("Gosper block with a wrong number of parameters");
    sys.push_back(block_system(b, k, extra_degree));
    ncols += sys.back().nx;
  }
  MPoly K = MPoly::variable(k);
  std::vector<std::vector<RatFun>> rows;
  size_t off = nparams;
  for (const auto& s : sys) {
    std::vector<std::vector<MPoly>> cols(ncols);
    for (size_t l = 0; l < nparams; ++l) cols[l] = (-s.rhs[l]).coeffs_in(k);
    for (size_t i = 0; i < s.nx; ++i) {
      MPoly xi = K.pow(static_cast<int>(i));
      cols[off + i] = (s.A * xi.shift(k, 1) - s.B * xi).coeffs_in(k);
    }
    size_t nrows = 0;
    for (const auto& c : cols) nrows = std::max(nrows, c.size());
    for (size_t r = 0; r < nrows; ++r) {
      std::vector<RatFun> row(ncols);
      bool any = false;
      for (size_t j = 0; j < ncols; ++j)
        if (r < cols[j].size() && !cols[j][r].is_zero()) {
          row[j] = RatFun(cols[j][r]);
          any = true;
        }
      if (any) rows.push_back(std::move(row));
    }
    off += s.nx;
  }
  std::vector<BlockSolution> out;
  for (const auto& v : nullspace(rows, ncols)) {
    BlockSolution sol;
    sol.c.assign(v.begin(), v.begin() + static_cast<long>(nparams));
    size_t o = nparams;
    for (const auto& s : sys) {
      RatFun x;
      for (size_t i = 0; i < s.nx; ++i) x += v[o + i] * RatFun(K.pow(static_cast<int>(i)));
      sol.ratio.push_back(x.is_zero() ? x : x * RatFun::make(s.B, s.scale_den));
      o += s.nx;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

std::vector<ParamSolution> parameterized_gosper(const RatFun& rho, const std::vector<RatFun>& q, int k) {
  std::vector<ParamSolution> out;
  for (auto& s : parameterized_gosper_blocks({GosperBlock{rho, q}}, q.size(), k))
    out.push_back(ParamSolution{std::move(s.c), std::move(s.ratio[0])});
  return out;
}

bool certificate_holds(const RatFun& rho, const RatFun& ratio, int k) {
  return rho * ratio.shift(k, 1) - ratio == RatFun(1L);
}

std::optional<TelescoperCertificate> gosper(const HypergeometricTerm& f) {
  RatFun rho = f.shift_quotient();
  for (const auto& s : parameterized_gosper(rho, {RatFun(1L)}, f.var)) {
    if (s.c[0].is_zero()) continue;
    RatFun R = s.ratio / s.c[0];
    if (!certificate_holds(rho, R, f.var)) throw std::logic_error("Gosper certificate failed its check");
    return TelescoperCertificate{R};
  }
  return std::nullopt;
}

std::optional<Expr> telescope_definite(const HypergeometricTerm& f, const Affine& lower, const Affine& upper,
                                       const Domain& dom, Assumptions* as) {
  if (f.term.is_zero()) return Expr();
  auto cert = gosper(f);
  if (!cert) return std::nullopt;
  Expr g = f.term.scaled(cert->ratio);
  try {
    Expr hi = substitute(g, f.var, upper + Affine(1L), dom, as);
    Expr lo = substitute(g, f.var, lower, dom, as);
    return hi - lo;
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

}  // namespace telesum
