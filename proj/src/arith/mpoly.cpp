#include "telesum/mpoly.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "telesum/symbols.hpp"

namespace telesum {

namespace {

const MPoly& zero_poly() {
  static const MPoly z;
  return z;
}

}  // namespace

void MPoly::normalize() {
  if (var_ < 0) return;
  while (!co_.empty() && co_.back().is_zero()) co_.pop_back();
  if (co_.size() <= 1) {
    MPoly tmp = co_.empty() ? MPoly() : std::move(co_[0]);
    *this = std::move(tmp);
  }
}

MPoly MPoly::variable(int v) { return MPoly(v, std::vector<MPoly>{MPoly(0L), MPoly(1L)}); }

MPoly MPoly::var_power(int v, int k) {
  if (k == 0) return MPoly(1L);
  std::vector<MPoly> co(static_cast<size_t>(k) + 1);
  co.back() = MPoly(1L);
  return MPoly(v, std::move(co));
}

MPoly MPoly::from_coeffs(int v, const std::vector<MPoly>& coeffs) {
  bool simple = true;
  for (const auto& c : coeffs)
    if (c.var_ >= v) simple = false;
  if (simple) return MPoly(v, coeffs);
  MPoly acc;
  for (size_t k = coeffs.size(); k-- > 0;) acc = acc * variable(v) + coeffs[k];
  return acc;
}

MPoly MPoly::from_univariate(const Polynomial& p, int v) {
  std::vector<MPoly> co;
  for (const auto& c : p.coefficients()) co.emplace_back(c);
  return MPoly(v, std::move(co));
}

int MPoly::degree(int v) const {
  if (var_ < 0 || var_ < v) return 0;
  if (var_ == v) return static_cast<int>(co_.size()) - 1;
  int d = 0;
  for (const auto& c : co_) d = std::max(d, c.degree(v));
  return d;
}

int MPoly::total_degree() const {
  if (var_ < 0) return 0;
  int d = 0;
  for (size_t i = 0; i < co_.size(); ++i)
    if (!co_[i].is_zero()) d = std::max(d, static_cast<int>(i) + co_[i].total_degree());
  return d;
}

const MPoly& MPoly::coeff(int k) const {
  if (var_ < 0) return k == 0 ? *this : zero_poly();
  if (k < 0 || static_cast<size_t>(k) >= co_.size()) return zero_poly();
  return co_[static_cast<size_t>(k)];
}

std::vector<MPoly> MPoly::coeffs_in(int v) const {
  if (var_ == v) return co_;
  if (var_ < v) return {*this};
  std::vector<MPoly> out(static_cast<size_t>(degree(v)) + 1);
  for (size_t i = 0; i < co_.size(); ++i) {
    if (co_[i].is_zero()) continue;
    auto sub = co_[i].coeffs_in(v);
    MPoly xi = var_power(var_, static_cast<int>(i));
    for (size_t k = 0; k < sub.size(); ++k)
      if (!sub[k].is_zero()) out[k] += sub[k] * xi;
  }
  return out;
}

MPoly MPoly::lead_coeff(int v) const { return coeffs_in(v).back(); }

Rational MPoly::base_lead() const {
  const MPoly* p = this;
  while (p->var_ >= 0) p = &p->co_.back();
  return p->c_;
}

bool MPoly::has_var(int v) const {
  if (var_ < 0 || var_ < v) return false;
  if (var_ == v) return true;
  for (const auto& c : co_)
    if (c.has_var(v)) return true;
  return false;
}

void MPoly::collect_vars(std::set<int>& out) const {
  if (var_ < 0) return;
  out.insert(var_);
  for (const auto& c : co_) c.collect_vars(out);
}

std::set<int> MPoly::vars() const {
  std::set<int> out;
  collect_vars(out);
  return out;
}

Rational MPoly::eval(const std::map<int, Rational>& env) const {
  if (var_ < 0) return c_;
  auto it = env.find(var_);
  if (it == env.end()) throw std::domain_error("unbound variable " + symbol_name(var_));
  Rational acc = 0;
  for (size_t i = co_.size(); i-- > 0;) acc = acc * it->second + co_[i].eval(env);
  return acc;
}

MPoly MPoly::subs(int v, const Rational& value) const {
  if (var_ < 0 || var_ < v) return *this;
  if (var_ == v) {
    MPoly acc;
    for (size_t i = co_.size(); i-- > 0;) acc = mpoly_scale(acc, value) + co_[i];
    return acc;
  }
  std::vector<MPoly> co;
  co.reserve(co_.size());
  for (const auto& c : co_) co.push_back(c.subs(v, value));
  return MPoly(var_, std::move(co));
}

MPoly MPoly::subs(int v, const MPoly& value) const {
  if (value.is_constant()) return subs(v, value.c_);
  if (!has_var(v)) return *this;
  auto cs = coeffs_in(v);
  MPoly acc;
  for (size_t i = cs.size(); i-- > 0;) acc = acc * value + cs[i];
  return acc;
}

MPoly MPoly::subs(const std::map<int, Rational>& env) const {
  MPoly r = *this;
  for (const auto& [v, x] : env) r = r.subs(v, x);
  return r;
}

Rational MPoly::content_q() const {
  if (is_zero()) return 1;
  Integer g = 0, l = 1;
  std::vector<const MPoly*> stack{this};
  while (!stack.empty()) {
    const MPoly* p = stack.back();
    stack.pop_back();
    if (p->var_ < 0) {
      if (p->c_ == 0) continue;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), p->c_.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p->c_.get_den_mpz_t());
    } else {
      for (const auto& c : p->co_) stack.push_back(&c);
    }
  }
  Rational r(abs(g), l);
  r.canonicalize();
  return r;
}

MPoly MPoly::unit_normal() const {
  if (is_zero()) return *this;
  Rational c = content_q();
  if (base_lead() < 0) c = -c;
  if (c == 1) return *this;
  return mpoly_scale(*this, 1 / c);
}

MPoly MPoly::operator-() const { return mpoly_scale(*this, -1); }

MPoly operator+(const MPoly& a, const MPoly& b) {
  if (a.var_ < 0 && b.var_ < 0) return MPoly(Rational(a.c_ + b.c_));
  if (a.var_ == b.var_) {
    std::vector<MPoly> co(std::max(a.co_.size(), b.co_.size()));
    for (size_t i = 0; i < co.size(); ++i) {
      if (i < a.co_.size() && i < b.co_.size())
        co[i] = a.co_[i] + b.co_[i];
      else
        co[i] = i < a.co_.size() ? a.co_[i] : b.co_[i];
    }
    return MPoly(a.var_, std::move(co));
  }
  const MPoly& hi = a.var_ > b.var_ ? a : b;
  const MPoly& lo = a.var_ > b.var_ ? b : a;
  std::vector<MPoly> co = hi.co_;
  co[0] = co[0] + lo;
  return MPoly(hi.var_, std::move(co));
}

MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

MPoly operator*(const MPoly& a, const MPoly& b) {
  if (a.is_zero() || b.is_zero()) return MPoly();
  if (a.var_ < 0 && b.var_ < 0) return MPoly(Rational(a.c_ * b.c_));
  if (a.var_ < 0) return mpoly_scale(b, a.c_);
  if (b.var_ < 0) return mpoly_scale(a, b.c_);
  if (a.var_ == b.var_) {
    std::vector<MPoly> co(a.co_.size() + b.co_.size() - 1);
    for (size_t i = 0; i < a.co_.size(); ++i) {
      if (a.co_[i].is_zero()) continue;
      for (size_t j = 0; j < b.co_.size(); ++j) {
        if (b.co_[j].is_zero()) continue;
        co[i + j] += a.co_[i] * b.co_[j];
      }
    }
    return MPoly(a.var_, std::move(co));
  }
  const MPoly& hi = a.var_ > b.var_ ? a : b;
  const MPoly& lo = a.var_ > b.var_ ? b : a;
  std::vector<MPoly> co;
  co.reserve(hi.co_.size());
  for (const auto& c : hi.co_) co.push_back(c * lo);
  return MPoly(hi.var_, std::move(co));
}

MPoly MPoly::pow(int k) const {
  if (k < 0) throw std::domain_error("negative polynomial power");
  MPoly result(1L), base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

bool operator==(const MPoly& a, const MPoly& b) {
  if (a.var_ != b.var_) return false;
  if (a.var_ < 0) return a.c_ == b.c_;
  return a.co_ == b.co_;
}

int MPoly::compare(const MPoly& a, const MPoly& b) {
  if (a.var_ != b.var_) return a.var_ < b.var_ ? -1 : 1;
  if (a.var_ < 0) return a.c_ < b.c_ ? -1 : (a.c_ == b.c_ ? 0 : 1);
  if (a.co_.size() != b.co_.size()) return a.co_.size() < b.co_.size() ? -1 : 1;
  for (size_t i = a.co_.size(); i-- > 0;) {
    int c = compare(a.co_[i], b.co_[i]);
    if (c != 0) return c;
  }
  return 0;
}

Polynomial MPoly::to_univariate(int v) const {
  if (var_ < 0) return Polynomial::constant(c_);
  if (var_ != v) throw std::domain_error("polynomial is not univariate in " + symbol_name(v));
  std::vector<Rational> out;
  for (const auto& c : co_) {
    if (!c.is_constant()) throw std::domain_error("polynomial is not univariate in " + symbol_name(v));
    out.push_back(c.c_);
  }
  return Polynomial(std::move(out));
}

size_t MPoly::size() const {
  if (var_ < 0) return c_ == 0 ? 0 : 1;
  size_t s = 0;
  for (const auto& c : co_) s += c.size();
  return s;
}

namespace {

using Monomial = std::vector<std::pair<int, int>>;  // (var, exponent), var descending

void collect_terms(const MPoly& p, Monomial& prefix, std::vector<std::pair<Monomial, Rational>>& out) {
  if (p.is_constant()) {
    if (p.constant_value() != 0) out.emplace_back(prefix, p.constant_value());
    return;
  }
  for (int k = p.degree(); k >= 0; --k) {
    const MPoly& c = p.coeff(k);
    if (c.is_zero()) continue;
    if (k > 0) prefix.emplace_back(p.main_var(), k);
    collect_terms(c, prefix, out);
    if (k > 0) prefix.pop_back();
  }
}

}  // namespace

std::vector<std::pair<std::vector<std::pair<int, int>>, Rational>> mpoly_terms(const MPoly& p) {
  std::vector<std::pair<Monomial, Rational>> terms;
  Monomial prefix;
  collect_terms(p, prefix, terms);
  return terms;
}

std::string MPoly::str() const {
  auto terms = mpoly_terms(*this);
  if (terms.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [mono, c] : terms) {
    bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    out << (neg ? "-" : (first ? "" : "+"));
    first = false;
    bool wrote = false;
    if (a != 1 || mono.empty()) {
      out << to_string(a);
      wrote = true;
    }
    for (const auto& [v, e] : mono) {
      if (wrote) out << "*";
      out << symbol_name(v);
      if (e > 1) out << "^" << e;
      wrote = true;
    }
  }
  return out.str();
}

MPoly mpoly_scale(const MPoly& a, const Rational& c) {
  if (c == 0 || a.is_zero()) return MPoly();
  if (c == 1) return a;
  if (a.var_ < 0) return MPoly(Rational(a.c_ * c));
  MPoly r = a;
  std::vector<MPoly*> stack{&r};
  while (!stack.empty()) {
    MPoly* p = stack.back();
    stack.pop_back();
    if (p->var_ < 0) {
      p->c_ *= c;
    } else {
      for (auto& x : p->co_) stack.push_back(&x);
    }
  }
  return r;
}

std::optional<MPoly> mpoly_divide(const MPoly& a, const MPoly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.is_zero()) return MPoly();
  if (b.var_ < 0) return mpoly_scale(a, 1 / b.c_);
  const int v = b.var_;
  if (a.var_ < v) return std::nullopt;
  if (a.var_ > v) {
    std::vector<MPoly> co;
    co.reserve(a.co_.size());
    for (const auto& c : a.co_) {
      auto q = mpoly_divide(c, b);
      if (!q) return std::nullopt;
      co.push_back(std::move(*q));
    }
    return MPoly(a.var_, std::move(co));
  }
  const int db = b.degree();
  const MPoly& lb = b.co_.back();
  std::vector<MPoly> r = a.co_;
  std::vector<MPoly> q(r.size() >= static_cast<size_t>(db) + 1 ? r.size() - static_cast<size_t>(db) : 0);
  for (int i = static_cast<int>(r.size()) - 1; i >= db; --i) {
    if (r[static_cast<size_t>(i)].is_zero()) continue;
    auto t = mpoly_divide(r[static_cast<size_t>(i)], lb);
    if (!t) return std::nullopt;
    for (int k = 0; k <= db; ++k) r[static_cast<size_t>(i - db + k)] -= *t * b.co_[static_cast<size_t>(k)];
    q[static_cast<size_t>(i - db)] = std::move(*t);
  }
  for (int i = 0; i < db && i < static_cast<int>(r.size()); ++i)
    if (!r[static_cast<size_t>(i)].is_zero()) return std::nullopt;
  if (q.empty()) return std::nullopt;
  return MPoly(v, std::move(q));
}

MPoly mpoly_exact_div(const MPoly& a, const MPoly& b) {
  auto q = mpoly_divide(a, b);
  if (!q) throw std::domain_error("inexact multivariate division: (" + a.str() + ")/(" + b.str() + ")");
  return *q;
}

MPoly mpoly_prem(const MPoly& a, const MPoly& b, int v) {
  std::vector<MPoly> r = a.coeffs_in(v);
  const std::vector<MPoly> bc = b.coeffs_in(v);
  const int db = static_cast<int>(bc.size()) - 1;
  if (db == 0) throw std::domain_error("pseudo-remainder by polynomial free of the variable");
  int dr = static_cast<int>(r.size()) - 1;
  if (dr < db) return a;
  const MPoly& lb = bc.back();
  int steps = dr - db + 1;
  while (dr >= db) {
    MPoly lr = r[static_cast<size_t>(dr)];
    for (auto& c : r) c = c * lb;
    for (int k = 0; k <= db; ++k) r[static_cast<size_t>(dr - db + k)] -= lr * bc[static_cast<size_t>(k)];
    while (dr >= 0 && r[static_cast<size_t>(dr)].is_zero()) --dr;
    r.resize(static_cast<size_t>(std::max(dr, 0)) + 1);
    if (dr < 0) r[0] = MPoly();
    --steps;
  }
  MPoly factor = lb.pow(steps);
  MPoly out = MPoly::from_coeffs(v, r);
  return factor * out;
}

MPoly mpoly_derivative(const MPoly& a, int v) {
  auto cs = a.coeffs_in(v);
  std::vector<MPoly> out;
  for (size_t k = 1; k < cs.size(); ++k) out.push_back(mpoly_scale(cs[k], Rational(static_cast<long>(k))));
  if (out.empty()) return MPoly();
  return MPoly::from_coeffs(v, out);
}

MPoly mpoly_content(const MPoly& a, int v) {
  if (a.is_zero()) return MPoly();
  if (!a.has_var(v)) return a.unit_normal();
  auto cs = a.coeffs_in(v);
  MPoly g;
  for (const auto& c : cs) {
    if (c.is_zero()) continue;
    g = mpoly_gcd(g, c);
    if (g.is_constant()) return MPoly(1L);
  }
  return g;
}

namespace {

std::mt19937_64& rng() {
  thread_local std::mt19937_64 gen(0x7e1e5u);
  return gen;
}

// True when gcd(a, b) is certainly free of v (a, b both of positive degree in v).
bool gcd_trivial_in(const MPoly& a, const MPoly& b, int v) {
  std::set<int> vs = a.vars();
  b.collect_vars(vs);
  vs.erase(v);
  std::uniform_int_distribution<int> dist(-97, 97);
  MPoly la = a.lead_coeff(v), lb = b.lead_coeff(v);
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::map<int, Rational> env;
    for (int x : vs) env[x] = Rational(dist(rng()));
    if (la.eval(env) == 0 || lb.eval(env) == 0) continue;
    Polynomial pa = a.subs(env).to_univariate(v), pb = b.subs(env).to_univariate(v);
    return poly_gcd(pa, pb).degree() == 0;
  }
  return false;
}

MPoly primitive_in(const MPoly& a, int v) {
  MPoly c = mpoly_content(a, v);
  return mpoly_exact_div(a, c).unit_normal();
}

}  // namespace

MPoly mpoly_gcd(const MPoly& a, const MPoly& b) {
  if (a.is_zero()) return b.unit_normal();
  if (b.is_zero()) return a.unit_normal();
  if (a.is_constant() || b.is_constant()) return MPoly(1L);
  const int v = std::max(a.main_var(), b.main_var());
  if (a.main_var() < v) return mpoly_gcd(a, mpoly_content(b, v));
  if (b.main_var() < v) return mpoly_gcd(mpoly_content(a, v), b);
  if (a == b) return a.unit_normal();
  MPoly ca = mpoly_content(a, v), cb = mpoly_content(b, v);
  MPoly gc = mpoly_gcd(ca, cb);
  MPoly pa = mpoly_exact_div(a, ca).unit_normal();
  MPoly pb = mpoly_exact_div(b, cb).unit_normal();
  if (!a.is_constant() && !b.is_constant() && (a.vars().size() > 1 || b.vars().size() > 1) &&
      gcd_trivial_in(pa, pb, v))
    return gc.unit_normal();
  if (pa.vars().size() == 1 && pb.vars().size() == 1) {
    Polynomial g = poly_gcd(pa.to_univariate(v), pb.to_univariate(v));
    return (gc * MPoly::from_univariate(g, v)).unit_normal();
  }
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  while (true) {
    MPoly r = mpoly_prem(pa, pb, v);
    if (r.is_zero()) break;
    if (r.degree(v) == 0) return gc.unit_normal();
    pa = std::move(pb);
    pb = primitive_in(r, v);
  }
  return (gc * primitive_in(pb, v)).unit_normal();
}

std::vector<std::pair<MPoly, int>> squarefree_factors(const MPoly& p, Rational* unit) {
  std::vector<std::pair<MPoly, int>> out;
  if (p.is_zero()) throw std::domain_error("square-free factorisation of zero");
  MPoly n = p.unit_normal();
  if (unit) *unit = p.base_lead() / n.base_lead();
  if (n.is_constant()) return out;
  const int v = n.main_var();
  MPoly cont = mpoly_content(n, v);
  if (!cont.is_constant()) {
    for (auto& f : squarefree_factors(cont)) out.push_back(std::move(f));
  }
  MPoly f = mpoly_exact_div(n, cont).unit_normal();
  MPoly df = mpoly_derivative(f, v);
  MPoly a0 = mpoly_gcd(f, df);
  MPoly b = mpoly_exact_div(f, a0);
  MPoly c = mpoly_exact_div(df, a0);
  MPoly d = c - mpoly_derivative(b, v);
  int i = 1;
  while (b.degree(v) > 0) {
    MPoly a = mpoly_gcd(b, d);
    if (!a.is_constant()) out.emplace_back(a.unit_normal(), i);
    b = mpoly_exact_div(b, a);
    c = mpoly_exact_div(d, a);
    d = c - mpoly_derivative(b, v);
    ++i;
  }
  return out;
}

std::vector<AffineRoot> affine_roots(const MPoly& p, int v, MPoly* rest) {
  std::vector<AffineRoot> out;
  MPoly cur = p;
  auto finish = [&]() {
    if (rest) *rest = cur;
    return out;
  };
  if (p.is_zero() || p.degree(v) == 0) return finish();
  std::set<int> params = p.vars();
  params.erase(v);
  std::vector<MPoly> candidates;
  if (params.empty()) {
    for (const auto& r : rational_roots(p.to_univariate(v))) candidates.emplace_back(r);
  } else {
    MPoly lc = p.lead_coeff(v);
    std::uniform_int_distribution<int> dist(3, 60);
    std::vector<int> pv(params.begin(), params.end());
    for (int attempt = 0; attempt < 8 && candidates.empty(); ++attempt) {
      std::map<int, Rational> base;
      for (int x : pv) base[x] = Rational(dist(rng()) * (attempt % 2 ? -1 : 1));
      auto roots_at = [&](const std::map<int, Rational>& env, bool& ok) {
        if (lc.eval(env) == 0) {
          ok = false;
          return std::vector<Rational>{};
        }
        return rational_roots(p.subs(env).to_univariate(v));
      };
      bool ok = true;
      auto r0 = roots_at(base, ok);
      std::vector<std::vector<Rational>> r1(pv.size()), r2(pv.size());
      for (size_t k = 0; k < pv.size() && ok; ++k) {
        auto e1 = base, e2 = base;
        e1[pv[k]] += 1;
        e2[pv[k]] += 2;
        r1[k] = roots_at(e1, ok);
        if (ok) r2[k] = roots_at(e2, ok);
      }
      if (!ok) continue;
      for (const auto& rho : r0) {
        std::vector<std::vector<Rational>> slopes(pv.size());
        bool feasible = true;
        for (size_t k = 0; k < pv.size() && feasible; ++k) {
          for (const auto& s : r1[k]) {
            Rational c = s - rho;
            if (std::binary_search(r2[k].begin(), r2[k].end(), Rational(rho + 2 * c))) slopes[k].push_back(c);
          }
          feasible = !slopes[k].empty();
        }
        if (!feasible) continue;
        std::vector<size_t> idx(pv.size(), 0);
        size_t combos = 1;
        for (const auto& s : slopes) combos *= s.size();
        if (combos > 4096) continue;
        for (size_t n = 0; n < combos; ++n) {
          size_t m = n;
          MPoly alpha(rho);
          for (size_t k = 0; k < pv.size(); ++k) {
            const Rational& c = slopes[k][m % slopes[k].size()];
            m /= slopes[k].size();
            if (c != 0) alpha += mpoly_scale(MPoly::variable(pv[k]) - MPoly(base[pv[k]]), c);
          }
          if (p.subs(v, alpha).is_zero()) candidates.push_back(alpha);
        }
      }
      if (!r0.empty() && candidates.empty() && attempt >= 1) break;
      if (r0.empty()) break;
    }
  }
  for (const auto& alpha : candidates) {
    bool dup = false;
    for (const auto& r : out)
      if (r.root == alpha) dup = true;
    if (dup) continue;
    MPoly lin = MPoly::variable(v) - alpha;
    AffineRoot ar{alpha, 0};
    while (cur.degree(v) > 0) {
      auto q = mpoly_divide(cur, lin);
      if (!q) break;
      cur = std::move(*q);
      ++ar.multiplicity;
    }
    if (ar.multiplicity > 0) out.push_back(std::move(ar));
  }
  return finish();
}

std::vector<std::pair<MPoly, int>> split_factors(const MPoly& p, Rational* unit) {
  Rational u = 1;
  std::vector<std::pair<MPoly, int>> out;
  for (auto& [f, m] : squarefree_factors(p, &u)) {
    std::vector<MPoly> pending{f};
    std::vector<MPoly> done;
    for (int v : f.vars()) {
      std::vector<MPoly> next;
      for (auto& g : pending) {
        if (g.degree(v) <= 1) {
          next.push_back(g);
          continue;
        }
        MPoly rest;
        auto roots = affine_roots(g, v, &rest);
        for (const auto& r : roots) {
          MPoly lin = (MPoly::variable(v) - r.root).unit_normal();
          for (int k = 0; k < r.multiplicity; ++k) done.push_back(lin);
        }
        if (!rest.is_constant()) next.push_back(rest.unit_normal());
      }
      pending = std::move(next);
    }
    for (auto& g : pending) done.push_back(g.unit_normal());
    for (auto& g : done) {
      bool merged = false;
      for (auto& [h, k] : out)
        if (h == g) {
          k += m;
          merged = true;
        }
      if (!merged) out.emplace_back(g, m);
    }
  }
  // Constant from unit-normalising the linear pieces.
  MPoly prod(1L);
  for (const auto& [g, k] : out) prod *= g.pow(k);
  if (unit) *unit = prod.is_zero() ? u : p.base_lead() / prod.base_lead();
  return out;
}

// ---------------------------------------------------------------------------
// RatFun

RatFun RatFun::from_coprime(MPoly num, MPoly den) {
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  RatFun r;
  if (num.is_zero()) return r;
  Rational c = den.content_q();
  if (den.base_lead() < 0) c = -c;
  if (den.is_constant()) c = den.constant_value();
  r.num_ = mpoly_scale(num, 1 / c);
  r.den_ = mpoly_scale(den, 1 / c);
  return r;
}

namespace {

RatFun reduced(MPoly num, MPoly den) { return RatFun::from_coprime(std::move(num), std::move(den)); }

}  // namespace

RatFun RatFun::make(const MPoly& num, const MPoly& den) {
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  RatFun r;
  if (num.is_zero()) return r;
  if (den.is_constant()) {
    r.num_ = mpoly_scale(num, 1 / den.constant_value());
    r.den_ = MPoly(1L);
    return r;
  }
  // Fast path: already unit-normal and coprime is common after reduced().
  MPoly g = mpoly_gcd(num, den);
  MPoly n = g.is_constant() ? num : mpoly_exact_div(num, g);
  MPoly d = g.is_constant() ? den : mpoly_exact_div(den, g);
  Rational c = d.content_q();
  if (d.base_lead() < 0) c = -c;
  r.num_ = mpoly_scale(n, 1 / c);
  r.den_ = mpoly_scale(d, 1 / c);
  if (r.den_.is_constant()) {
    r.num_ = mpoly_scale(r.num_, 1 / r.den_.constant_value());
    r.den_ = MPoly(1L);
  }
  return r;
}

std::set<int> RatFun::vars() const {
  std::set<int> out = num_.vars();
  den_.collect_vars(out);
  return out;
}

Rational RatFun::eval(const std::map<int, Rational>& env) const {
  Rational d = den_.eval(env);
  if (d == 0) throw std::domain_error("rational function evaluated at a pole");
  return num_.eval(env) / d;
}

RatFun RatFun::subs(int v, const Rational& value) const {
  if (!has_var(v)) return *this;
  MPoly d = den_.subs(v, value);
  if (d.is_zero()) throw std::domain_error("rational function evaluated at a pole");
  return make(num_.subs(v, value), d);
}

RatFun RatFun::subs(int v, const MPoly& value) const {
  if (!has_var(v)) return *this;
  MPoly d = den_.subs(v, value);
  if (d.is_zero()) throw std::domain_error("rational function evaluated at a pole");
  return make(num_.subs(v, value), d);
}

RatFun RatFun::subs(const std::map<int, Rational>& env) const {
  MPoly d = den_.subs(env);
  if (d.is_zero()) throw std::domain_error("rational function evaluated at a pole");
  return make(num_.subs(env), d);
}

RatFun RatFun::operator-() const {
  RatFun r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_.is_constant() && b.den_.is_constant()) return RatFun(a.num_ + b.num_);
  if (a.den_ == b.den_) return RatFun::make(a.num_ + b.num_, a.den_);
  MPoly g = mpoly_gcd(a.den_, b.den_);
  if (g.is_constant()) return reduced(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  MPoly ad = mpoly_exact_div(a.den_, g), bd = mpoly_exact_div(b.den_, g);
  MPoly n = a.num_ * bd + b.num_ * ad;
  if (n.is_zero()) return RatFun();
  MPoly d = a.den_ * bd;
  MPoly h = mpoly_gcd(n, g);
  if (!h.is_constant()) {
    n = mpoly_exact_div(n, h);
    d = mpoly_exact_div(d, h);
  }
  return reduced(n, d);
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }

RatFun operator*(const RatFun& a, const RatFun& b) {
  if (a.is_zero() || b.is_zero()) return RatFun();
  if (a.den_.is_constant() && b.den_.is_constant()) return RatFun(a.num_ * b.num_);
  MPoly g1 = mpoly_gcd(a.num_, b.den_), g2 = mpoly_gcd(b.num_, a.den_);
  MPoly an = g1.is_constant() ? a.num_ : mpoly_exact_div(a.num_, g1);
  MPoly bd = g1.is_constant() ? b.den_ : mpoly_exact_div(b.den_, g1);
  MPoly bn = g2.is_constant() ? b.num_ : mpoly_exact_div(b.num_, g2);
  MPoly ad = g2.is_constant() ? a.den_ : mpoly_exact_div(a.den_, g2);
  return reduced(an * bn, ad * bd);
}

RatFun RatFun::inverse() const {
  if (is_zero()) throw std::domain_error("rational function division by zero");
  return reduced(den_, num_);
}

RatFun operator/(const RatFun& a, const RatFun& b) { return a * b.inverse(); }

RatFun RatFun::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  RatFun r;
  r.num_ = num_.pow(k);
  r.den_ = den_.pow(k);
  return r;
}

int RatFun::compare(const RatFun& a, const RatFun& b) {
  int c = MPoly::compare(a.num_, b.num_);
  return c != 0 ? c : MPoly::compare(a.den_, b.den_);
}

std::string RatFun::str() const {
  if (den_.is_constant()) return num_.str();
  return "(" + num_.str() + ")/(" + den_.str() + ")";
}

// ---------------------------------------------------------------------------
// nullspace

std::vector<std::vector<RatFun>> nullspace(std::vector<std::vector<RatFun>> rows, size_t ncols) {
  // Clear denominators row by row, then fraction-free elimination.
  std::vector<std::vector<MPoly>> m;
  for (auto& row : rows) {
    MPoly l(1L);
    for (const auto& e : row)
      if (!e.is_zero() && !e.den().is_constant()) {
        MPoly g = mpoly_gcd(l, e.den());
        l = l * mpoly_exact_div(e.den(), g);
      }
    std::vector<MPoly> r(ncols);
    bool any = false;
    for (size_t c = 0; c < ncols && c < row.size(); ++c) {
      if (row[c].is_zero()) continue;
      r[c] = row[c].num() * mpoly_exact_div(l, row[c].den());
      any = true;
    }
    if (!any) continue;
    m.push_back(std::move(r));
  }
  std::vector<size_t> pivot_cols;
  size_t rank = 0;
  MPoly prev(1L);
  for (size_t c = 0; c < ncols && rank < m.size(); ++c) {
    size_t best = m.size();
    for (size_t i = rank; i < m.size(); ++i) {
      if (m[i][c].is_zero()) continue;
      if (best == m.size() || m[i][c].size() < m[best][c].size()) best = i;
    }
    if (best == m.size()) continue;
    std::swap(m[rank], m[best]);
    const MPoly piv = m[rank][c];
    for (size_t i = rank + 1; i < m.size(); ++i) {
      const MPoly a = m[i][c];
      for (size_t j = c; j < ncols; ++j) {
        MPoly v = piv * m[i][j];
        if (!a.is_zero() && !m[rank][j].is_zero()) v -= a * m[rank][j];
        m[i][j] = prev.is_constant() ? mpoly_scale(v, 1 / prev.constant_value()) : mpoly_exact_div(v, prev);
      }
    }
    prev = piv;
    pivot_cols.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (size_t c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<RatFun>> basis;
  for (size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<RatFun> x(ncols);
    x[f] = RatFun(1L);
    for (size_t r = rank; r-- > 0;) {
      size_t pc = pivot_cols[r];
      RatFun acc;
      for (size_t j = pc + 1; j < ncols; ++j)
        if (!m[r][j].is_zero() && !x[j].is_zero()) acc += RatFun(m[r][j]) * x[j];
      x[pc] = -acc / RatFun(m[r][pc]);
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace telesum
