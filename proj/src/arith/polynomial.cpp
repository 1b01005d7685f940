#include "telesum/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace telesum {

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<long> coeffs) {
  for (long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

Polynomial Polynomial::constant(const Rational& c) { return Polynomial(std::vector<Rational>{c}); }

Polynomial Polynomial::monomial(const Rational& c, int degree) {
  std::vector<Rational> v(static_cast<size_t>(degree) + 1);
  v[static_cast<size_t>(degree)] = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return coeffs_[static_cast<size_t>(i)];
}

const Rational& Polynomial::leading() const {
  if (coeffs_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
  return coeffs_.back();
}

Rational Polynomial::operator()(const Rational& at) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * at + *it;
  return acc;
}

Polynomial Polynomial::shift(const Rational& h) const {
  // Horner in the polynomial ring: acc = acc*(x+h) + c.
  std::vector<Rational> acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    std::vector<Rational> next(acc.size() + 1);
    for (size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] += acc[i] * h;
    }
    next[0] += *it;
    acc = std::move(next);
  }
  return Polynomial(std::move(acc));
}

Polynomial Polynomial::compose_linear(const Rational& a, const Rational& b) const {
  Polynomial lin({b, a});
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * lin + constant(*it);
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> v;
  for (size_t i = 1; i < coeffs_.size(); ++i) v.push_back(coeffs_[i] * static_cast<long>(i));
  return Polynomial(std::move(v));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  Rational inv = 1 / leading();
  return *this * inv;
}

Rational Polynomial::content() const {
  if (is_zero()) return 1;
  Integer g = 0, l = 1;
  for (const auto& c : coeffs_) {
    if (c == 0) continue;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  Rational r(abs(g), l);
  r.canonicalize();
  return r;
}

Polynomial Polynomial::primitive_part() const {
  if (is_zero()) return *this;
  Polynomial p = *this * (1 / content());
  if (p.leading() < 0) p = -p;
  return p;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1);
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(r);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

std::string Polynomial::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    Rational c = coeff(i);
    if (c == 0) continue;
    bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    if (first) {
      if (neg) out << "-";
    } else {
      out << (neg ? "-" : "+");
    }
    first = false;
    if (i == 0) {
      out << to_string(a);
      continue;
    }
    if (a != 1) out << to_string(a) << "*";
    out << var;
    if (i > 1) out << "^" << i;
  }
  return out.str();
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> r = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {Polynomial(), a};
  std::vector<Rational> q(static_cast<size_t>(a.degree() - db + 1));
  Rational inv = 1 / b.leading();
  for (int i = a.degree(); i >= db; --i) {
    Rational c = r[static_cast<size_t>(i)] * inv;
    q[static_cast<size_t>(i - db)] = c;
    if (c == 0) continue;
    for (int k = 0; k <= db; ++k) r[static_cast<size_t>(i - db + k)] -= c * b.coeff(k);
  }
  return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

Polynomial exact_div(const Polynomial& a, const Polynomial& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
  return q;
}

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("pseudo-remainder by zero");
  if (a.degree() < b.degree()) return a;
  Rational scale = power(b.leading(), a.degree() - b.degree() + 1);
  return divmod(a * scale, b).second;
}

Polynomial poly_gcd(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero()) return q.monic();
  if (q.is_zero()) return p.monic();
  Polynomial a = p.primitive_part(), b = q.primitive_part();
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    Polynomial r = pseudo_remainder(a, b);
    a = std::move(b);
    b = r.primitive_part();
  }
  return a.monic();
}

Polynomial poly_lcm(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return Polynomial();
  return exact_div(p * q, poly_gcd(p, q)).monic();
}

Polynomial squarefree_part(const Polynomial& p) {
  if (p.degree() <= 0) return p.monic();
  return exact_div(p, poly_gcd(p, p.derivative())).monic();
}

Rational resultant(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) throw std::domain_error("resultant of zero polynomial");
  const int m = p.degree(), n = q.degree();
  if (m == 0) return power(p.leading(), n);
  if (n == 0) return power(q.leading(), m);
  const size_t size = static_cast<size_t>(m + n);
  std::vector<std::vector<Rational>> s(size, std::vector<Rational>(size));
  for (int row = 0; row < n; ++row)
    for (int k = 0; k <= m; ++k) s[static_cast<size_t>(row)][static_cast<size_t>(row + k)] = p.coeff(m - k);
  for (int row = 0; row < m; ++row)
    for (int k = 0; k <= n; ++k)
      s[static_cast<size_t>(n + row)][static_cast<size_t>(row + k)] = q.coeff(n - k);
  return bareiss_determinant<Rational>(std::move(s), Rational(0), Rational(1),
                                       [](const Rational& a, const Rational& b) { return Rational(a / b); });
}

namespace {

// Newton interpolation through (xs[i], ys[i]).
Polynomial interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  const size_t n = xs.size();
  std::vector<Rational> dd = ys;
  for (size_t k = 1; k < n; ++k)
    for (size_t i = n - 1; i >= k; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
  Polynomial acc = Polynomial::constant(dd[n - 1]);
  for (size_t i = n - 1; i-- > 0;) acc = acc * Polynomial({-xs[i], Rational(1)}) + Polynomial::constant(dd[i]);
  return acc;
}

// Integer-coefficient primitive multiple.
std::vector<Integer> integral_coefficients(const Polynomial& p) {
  Polynomial q = p * (1 / p.content());
  std::vector<Integer> out;
  for (const auto& c : q.coefficients()) out.push_back(c.get_num());
  return out;
}

}  // namespace

Polynomial shifted_resultant(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) throw std::domain_error("resultant of zero polynomial");
  const int bound = std::max(0, p.degree()) * std::max(0, q.degree());
  std::vector<Rational> xs, ys;
  for (int h = 0; h <= bound; ++h) {
    xs.emplace_back(h);
    ys.push_back(resultant(p, q.shift(h)));
  }
  return interpolate(xs, ys);
}

namespace {

// Sign variations of a Sturm chain at x.
int sturm_variations(const std::vector<Polynomial>& chain, const Rational& x) {
  int v = 0, last = 0;
  for (const auto& s : chain) {
    int sg = sgn(s(x));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++v;
    last = sg;
  }
  return v;
}

// Positive multiple with integral coprime coefficients (primitive_part may
// flip the sign).
Polynomial positive_primitive(const Polynomial& p) {
  Polynomial q = p.primitive_part();
  return sgn(q.leading()) == sgn(p.leading()) ? q : -q;
}

std::vector<Polynomial> sturm_chain(const Polynomial& p) {
  std::vector<Polynomial> chain{positive_primitive(p), positive_primitive(p.derivative())};
  while (chain.back().degree() > 0) {
    Polynomial r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(positive_primitive(-r));
  }
  return chain;
}

// Integer roots of a square-free polynomial by Sturm bisection inside the
// Cauchy bound.
void integer_roots_sturm(const Polynomial& sq, std::vector<Integer>& out) {
  if (sq.degree() == 1) {
    Rational r = -sq.coeff(0) / sq.coeff(1);
    if (is_integer(r)) out.push_back(r.get_num());
    return;
  }
  Rational m = 0;
  for (int i = 0; i < sq.degree(); ++i) m = std::max(m, Rational(abs(sq.coeff(i) / sq.leading())));
  Integer bound = m.get_num() / m.get_den() + 2;
  auto chain = sturm_chain(sq);
  std::function<void(const Integer&, const Integer&, int, int)> go = [&](const Integer& lo, const Integer& hi, int vlo,
                                                                         int vhi) {
    if (vlo - vhi <= 0) return;
    if (hi - lo == 1) {
      if (sq(Rational(hi)) == 0) out.push_back(hi);
      return;
    }
    Integer mid = lo + (hi - lo) / 2;
    int vm = sturm_variations(chain, Rational(mid));
    go(lo, mid, vlo, vm);
    go(mid, hi, vm, vhi);
  };
  Integer lo = -bound, hi = bound;
  go(lo, hi, sturm_variations(chain, Rational(lo)), sturm_variations(chain, Rational(hi)));
}

}  // namespace

std::vector<Rational> rational_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::domain_error("roots of zero polynomial");
  std::vector<Rational> roots;
  if (p.degree() <= 0) return roots;
  Polynomial sq = squarefree_part(p);
  std::vector<Integer> c = integral_coefficients(sq);
  // y = lead * x turns lead^(n-1) * sq(y / lead) into a monic integral polynomial.
  const int n = sq.degree();
  const Integer& lead = c.back();
  std::vector<Rational> t(c.size());
  Integer scale = 1;
  for (int i = n; i >= 0; --i) {
    t[i] = Rational(c[i] * scale);
    scale *= lead;
  }
  Polynomial mon(t);
  std::vector<Integer> ys;
  integer_roots_sturm(squarefree_part(mon), ys);
  for (const auto& y : ys) {
    Rational r(y, lead);
    r.canonicalize();
    if (sq(r) == 0) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<Integer> integer_roots(const Polynomial& p) {
  if (p.is_zero()) throw std::domain_error("roots of zero polynomial");
  std::vector<Integer> roots;
  if (p.degree() <= 0) return roots;
  integer_roots_sturm(squarefree_part(p), roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

int root_multiplicity(const Polynomial& p, const Rational& r) {
  if (p.is_zero()) throw std::domain_error("root multiplicity in zero polynomial");
  Polynomial lin({-r, Rational(1)});
  Polynomial cur = p;
  int m = 0;
  while (cur.degree() > 0) {
    auto [q, rem] = divmod(cur, lin);
    if (!rem.is_zero()) break;
    cur = std::move(q);
    ++m;
  }
  return m;
}

std::vector<Integer> dispersion_set(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) throw std::domain_error("dispersion of zero polynomial");
  std::vector<Integer> out;
  if (p.degree() <= 0 || q.degree() <= 0) return out;
  Polynomial r = shifted_resultant(p, q);
  for (const auto& h : integer_roots(r)) {
    if (h < 0) continue;
    if (poly_gcd(p, q.shift(Rational(h))).degree() > 0) out.push_back(h);
  }
  return out;
}

std::optional<Integer> dispersion(const Polynomial& p, const Polynomial& q) {
  auto s = dispersion_set(p, q);
  if (s.empty()) return std::nullopt;
  return s.back();
}

RationalFunction rf_normalize(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  RationalFunction out;
  if (num.is_zero()) return out;
  Polynomial g = poly_gcd(num, den);
  Polynomial n = exact_div(num, g), d = exact_div(den, g);
  Rational inv = 1 / d.leading();
  out.num_ = n * inv;
  out.den_ = d * inv;
  return out;
}

Rational RationalFunction::operator()(const Rational& at) const {
  Rational d = den_(at);
  if (d == 0) throw std::domain_error("rational function evaluated at a pole");
  return num_(at) / d;
}

RationalFunction RationalFunction::shift(const Rational& h) const {
  return rf_normalize(num_.shift(h), den_.shift(h));
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return rf_normalize(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return rf_normalize(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return rf_normalize(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw std::domain_error("rational function division by zero");
  return rf_normalize(a.num_ * b.den_, a.den_ * b.num_);
}

std::string RationalFunction::str(const std::string& var) const {
  if (is_polynomial()) return num_.str(var);
  return "(" + num_.str(var) + ")/(" + den_.str(var) + ")";
}

}  // namespace telesum
