#include "telesum/affine.hpp"

#include <sstream>
#include <stdexcept>

#include "telesum/symbols.hpp"

namespace telesum {

std::map<int, Rational> to_rational_env(const Env& env) {
  std::map<int, Rational> out;
  for (const auto& [v, x] : env) out.emplace(v, Rational(x));
  return out;
}

Affine Affine::variable(int v, const Integer& coeff) {
  Affine a;
  if (coeff != 0) a.terms_[v] = coeff;
  return a;
}

Integer Affine::coeff(int v) const {
  auto it = terms_.find(v);
  return it == terms_.end() ? Integer(0) : it->second;
}

Affine Affine::var_part() const {
  Affine a = *this;
  a.constant_ = 0;
  return a;
}

Affine Affine::operator-() const {
  Affine a = *this;
  a.constant_ = -a.constant_;
  for (auto& [v, c] : a.terms_) c = -c;
  return a;
}

Affine operator+(const Affine& a, const Affine& b) {
  Affine r = a;
  r.constant_ += b.constant_;
  for (const auto& [v, c] : b.terms_) {
    Integer s = r.coeff(v) + c;
    if (s == 0)
      r.terms_.erase(v);
    else
      r.terms_[v] = s;
  }
  return r;
}

Affine operator-(const Affine& a, const Affine& b) { return a + (-b); }

Affine operator*(const Affine& a, const Integer& k) {
  if (k == 0) return Affine();
  Affine r = a;
  r.constant_ *= k;
  for (auto& [v, c] : r.terms_) c *= k;
  return r;
}

Affine Affine::subs(int v, const Affine& value) const {
  auto it = terms_.find(v);
  if (it == terms_.end()) return *this;
  Integer c = it->second;
  Affine r = *this;
  r.terms_.erase(v);
  return r + value * c;
}

Affine Affine::shift(int v, const Integer& k) const {
  Affine r = *this;
  r.constant_ += coeff(v) * k;
  return r;
}

Integer Affine::eval(const Env& env) const {
  Integer acc = constant_;
  for (const auto& [v, c] : terms_) {
    auto it = env.find(v);
    if (it == env.end()) throw std::domain_error("unbound variable " + symbol_name(v));
    acc += c * it->second;
  }
  return acc;
}

MPoly Affine::to_mpoly() const {
  MPoly p{Rational(constant_)};
  for (const auto& [v, c] : terms_) p += mpoly_scale(MPoly::variable(v), Rational(c));
  return p;
}

std::optional<Affine> Affine::from_mpoly(const MPoly& p) {
  if (p.total_degree() > 1) return std::nullopt;
  Affine a;
  MPoly rest = p;
  for (int v : p.vars()) {
    const MPoly c = rest.coeffs_in(v)[1];
    if (!c.is_constant() || !is_integer(c.constant_value())) return std::nullopt;
    a.terms_[v] = c.constant_value().get_num();
    rest = rest.subs(v, Rational(0));
  }
  if (!rest.is_constant() || !is_integer(rest.constant_value())) return std::nullopt;
  a.constant_ = rest.constant_value().get_num();
  return a;
}

std::optional<Affine> Affine::from_ratfun(const RatFun& r) {
  if (!r.is_polynomial()) return std::nullopt;
  return from_mpoly(r.num());
}

int Affine::compare(const Affine& a, const Affine& b) {
  if (a.terms_ != b.terms_) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
      if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (ia == a.terms_.end() && ib != b.terms_.end()) return -1;
    if (ia != a.terms_.end() && ib == b.terms_.end()) return 1;
  }
  if (a.constant_ != b.constant_) return a.constant_ < b.constant_ ? -1 : 1;
  return 0;
}

std::string Affine::str() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [v, c] : terms_) {
    if (c < 0)
      out << "-";
    else if (!first)
      out << "+";
    Integer a = abs(c);
    if (a != 1) out << a.get_str() << "*";
    out << symbol_name(v);
    first = false;
  }
  if (first) return constant_.get_str();
  if (constant_ > 0) out << "+" << constant_.get_str();
  if (constant_ < 0) out << "-" << Integer(-constant_).get_str();
  return out.str();
}

// ---------------------------------------------------------------------------

void Domain::push(int var, Affine lo, std::optional<Affine> hi) { ranges_.push_back(Range{var, std::move(lo), std::move(hi)}); }

const Range* Domain::find(int var) const {
  for (const auto& r : ranges_)
    if (r.var == var) return &r;
  return nullptr;
}

Domain Domain::with_range(int var, Affine lo, std::optional<Affine> hi) const {
  Domain d = *this;
  for (auto& r : d.ranges_)
    if (r.var == var) {
      r.lo = std::move(lo);
      r.hi = std::move(hi);
      return d;
    }
  d.push(var, std::move(lo), std::move(hi));
  return d;
}

Domain Domain::without(int var) const {
  Domain d;
  for (const auto& r : ranges_)
    if (r.var != var) d.ranges_.push_back(r);
  return d;
}

std::optional<Integer> Domain::extremum(Affine a, bool want_min) const {
  for (size_t i = ranges_.size(); i-- > 0;) {
    const Range& r = ranges_[i];
    Integer c = a.coeff(r.var);
    if (c == 0) continue;
    bool use_lo = (c > 0) == want_min;
    if (use_lo) {
      a = a.subs(r.var, r.lo);
    } else {
      if (!r.hi) return std::nullopt;
      a = a.subs(r.var, *r.hi);
    }
  }
  if (!a.is_constant()) return std::nullopt;
  return a.constant();
}

std::optional<Integer> Domain::min(const Affine& a) const { return extremum(a, true); }
std::optional<Integer> Domain::max(const Affine& a) const { return extremum(a, false); }

bool Domain::nonneg(const Affine& a) const {
  auto m = min(a);
  return m && *m >= 0;
}

bool Domain::negative(const Affine& a) const {
  auto m = max(a);
  return m && *m < 0;
}

std::string Domain::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < ranges_.size(); ++i) {
    const Range& r = ranges_[i];
    if (i) out << ", ";
    out << r.lo.str() << " <= " << symbol_name(r.var);
    if (r.hi) out << " <= " << r.hi->str();
  }
  return out.str();
}

}  // namespace telesum
