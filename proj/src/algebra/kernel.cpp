#include <algorithm>

#include "telesum/algebra.hpp"

namespace telesum {

void Assumptions::add(const Affine& a) {
  if (a.is_constant()) return;
  if (std::find(nonneg.begin(), nonneg.end(), a) == nonneg.end()) nonneg.push_back(a);
}

RatFun fact_ratio(const Affine& a, const Integer& c1, const Integer& c2) {
  MPoly p = a.to_mpoly();
  MPoly acc(1L);
  const Integer& lo = c1 < c2 ? c1 : c2;
  const Integer& hi = c1 < c2 ? c2 : c1;
  for (Integer i = lo + 1; i <= hi; ++i) acc *= p + MPoly(Rational(i));
  if (c1 >= c2) return RatFun(acc);
  return RatFun::make(MPoly(1L), acc);
}

namespace {

Integer mod2(const Integer& x) {
  Integer r = x % 2;
  if (r < 0) r += 2;
  return r;
}

Affine mod2_affine(const Affine& a) {
  Affine r;
  for (const auto& [v, c] : a.terms()) r += Affine::variable(v, mod2(c));
  return r;
}

}  // namespace

bool Kernel::has_var(int v) const {
  for (const auto& [a, f] : facts)
    if (a.has_var(v)) return true;
  for (const auto& [p, e] : exps)
    if (e.has_var(v)) return true;
  return sign.has_var(v);
}

void Kernel::collect_vars(std::set<int>& out) const {
  auto add = [&](const Affine& a) {
    for (const auto& [v, c] : a.terms()) out.insert(v);
  };
  for (const auto& [a, f] : facts) add(a);
  for (const auto& [p, e] : exps) add(e);
  add(sign);
}

void Kernel::mul_fact(const Affine& arg, int exp, RatFun& coef) {
  if (exp == 0) return;
  if (arg.is_constant()) {
    if (arg.constant() < 0) throw Unsupported("factorial of the negative integer " + arg.constant().get_str());
    coef *= RatFun(Rational(factorial(arg.constant().get_si()))).pow(exp);
    return;
  }
  Affine key = arg.var_part();
  const Integer& off = arg.constant();
  auto it = facts.find(key);
  if (it == facts.end()) {
    facts[key] = FactEntry{off, exp};
    return;
  }
  FactEntry& f = it->second;
  Integer m = f.offset < off ? off : f.offset;
  if (f.offset != m) coef *= fact_ratio(key, f.offset, m).pow(f.exp);
  if (off != m) coef *= fact_ratio(key, off, m).pow(exp);
  f.offset = m;
  f.exp += exp;
  if (f.exp == 0) facts.erase(it);
}

void Kernel::mul_exp(const Integer& prime, const Affine& e, RatFun& coef) {
  if (e.constant() != 0) coef *= RatFun(power(Rational(prime), e.constant().get_si()));
  Affine vp = e.var_part();
  if (vp.is_constant()) return;
  Affine& slot = exps[prime];
  slot += vp;
  if (slot.is_constant()) exps.erase(prime);
}

void Kernel::mul_sign(const Affine& e, RatFun& coef) {
  if (mod2(e.constant()) == 1) coef = -coef;
  sign = mod2_affine(sign + e.var_part());
}

void Kernel::mul(const Kernel& o, RatFun& coef) {
  for (const auto& [a, f] : o.facts) mul_fact(a + Affine(f.offset), f.exp, coef);
  for (const auto& [p, e] : o.exps) mul_exp(p, e, coef);
  mul_sign(o.sign, coef);
}

void kernel_mul_power(Kernel& k, const Rational& base, const Affine& e, RatFun& coef) {
  if (base == 0) throw Unsupported("power of zero with symbolic exponent");
  if (base < 0) k.mul_sign(e, coef);
  Integer num = abs(base.get_num()), den = base.get_den();
  if (num != 1)
    for (const auto& [p, m] : factor_integer(num)) k.mul_exp(p, e * Integer(m), coef);
  if (den != 1)
    for (const auto& [p, m] : factor_integer(den)) k.mul_exp(p, e * Integer(-static_cast<long>(m)), coef);
}

Kernel Kernel::inverse() const {
  Kernel k = *this;
  for (auto& [a, f] : k.facts) f.exp = -f.exp;
  for (auto& [p, e] : k.exps) e = -e;
  return k;
}

RatFun Kernel::ratio_to(const Kernel& ref) const {
  RatFun acc(1L);
  for (const auto& [a, f] : facts) {
    const FactEntry& g = ref.facts.at(a);
    if (f.offset != g.offset) acc *= fact_ratio(a, f.offset, g.offset).pow(f.exp);
  }
  return acc;
}

RatFun Kernel::shift_ratio(int v, long k) const {
  RatFun acc(1L);
  if (k == 0) return acc;
  for (const auto& [a, f] : facts) {
    Integer c = a.coeff(v);
    if (c == 0) continue;
    acc *= fact_ratio(a, f.offset + c * k, f.offset).pow(f.exp);
  }
  Rational scal = 1;
  for (const auto& [p, e] : exps) {
    Integer c = e.coeff(v);
    if (c != 0) scal *= power(Rational(p), Integer(c * k).get_si());
  }
  if (mod2(sign.coeff(v) * k) == 1) scal = -scal;
  return acc * RatFun(scal);
}

Rational Kernel::eval(const Env& env) const {
  Rational acc = 1;
  auto aff = [&](const Affine& a) {
    try {
      return a.eval(env);
    } catch (const std::domain_error& e) {
      throw DomainError(e.what());
    }
  };
  for (const auto& [a, f] : facts) {
    Integer x = aff(a) + f.offset;
    if (x < 0) throw DomainError("negative factorial argument (" + (a + Affine(f.offset)).str() + ")");
    if (x > 100000) throw DomainError("factorial argument too large");
    acc *= power(Rational(factorial(x.get_si())), f.exp);
  }
  for (const auto& [p, e] : exps) acc *= power(Rational(p), aff(e).get_si());
  if (mod2(aff(sign)) == 1) acc = -acc;
  return acc;
}

int Kernel::compare_class(const Kernel& a, const Kernel& b) {
  auto ia = a.facts.begin(), ib = b.facts.begin();
  for (; ia != a.facts.end() && ib != b.facts.end(); ++ia, ++ib) {
    if (int c = Affine::compare(ia->first, ib->first)) return c;
    if (ia->second.exp != ib->second.exp) return ia->second.exp < ib->second.exp ? -1 : 1;
  }
  if (ia != a.facts.end()) return 1;
  if (ib != b.facts.end()) return -1;
  auto ea = a.exps.begin(), eb = b.exps.begin();
  for (; ea != a.exps.end() && eb != b.exps.end(); ++ea, ++eb) {
    if (ea->first != eb->first) return ea->first < eb->first ? -1 : 1;
    if (int c = Affine::compare(ea->second, eb->second)) return c;
  }
  if (ea != a.exps.end()) return 1;
  if (eb != b.exps.end()) return -1;
  return Affine::compare(a.sign, b.sign);
}

bool Kernel::same_class(const Kernel& a, const Kernel& b) { return compare_class(a, b) == 0; }

int Kernel::compare(const Kernel& a, const Kernel& b) {
  if (int c = compare_class(a, b)) return c;
  for (auto ia = a.facts.begin(), ib = b.facts.begin(); ia != a.facts.end(); ++ia, ++ib)
    if (ia->second.offset != ib->second.offset) return ia->second.offset < ib->second.offset ? -1 : 1;
  return 0;
}

}  // namespace telesum
