#pragma once

// Integer affine forms c0 + sum c_v * v and nested summation domains over
// them. Every bound and atom argument in the engine is one of these.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "telesum/mpoly.hpp"
#include "telesum/rational.hpp"

namespace telesum {

using Env = std::map<int, Integer>;

std::map<int, Rational> to_rational_env(const Env& env);

class Affine {
 public:
  Affine() = default;
  Affine(long c) : constant_(c) {}              // NOLINT
  Affine(const Integer& c) : constant_(c) {}    // NOLINT
  static Affine variable(int v, const Integer& coeff = 1);

  const std::map<int, Integer>& terms() const { return terms_; }
  const Integer& constant() const { return constant_; }
  Integer coeff(int v) const;
  bool is_constant() const { return terms_.empty(); }
  bool has_var(int v) const { return terms_.count(v) > 0; }
  Affine var_part() const;

  Affine operator-() const;
  friend Affine operator+(const Affine& a, const Affine& b);
  friend Affine operator-(const Affine& a, const Affine& b);
  friend Affine operator*(const Affine& a, const Integer& k);
  Affine& operator+=(const Affine& o) { return *this = *this + o; }

  Affine subs(int v, const Affine& value) const;
  Affine shift(int v, const Integer& k) const;  // v -> v + k
  Integer eval(const Env& env) const;
  MPoly to_mpoly() const;
  static std::optional<Affine> from_mpoly(const MPoly& p);
  static std::optional<Affine> from_ratfun(const RatFun& r);

  friend bool operator==(const Affine& a, const Affine& b) {
    return a.constant_ == b.constant_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Affine& a, const Affine& b) { return !(a == b); }
  friend bool operator<(const Affine& a, const Affine& b) { return compare(a, b) < 0; }
  static int compare(const Affine& a, const Affine& b);

  std::string str() const;

 private:
  std::map<int, Integer> terms_;
  Integer constant_ = 0;
};

struct Range {
  int var;
  Affine lo;
  std::optional<Affine> hi;  // absent: unbounded above
};

// Nested ranges, outermost first; each bound may use only outer variables.
class Domain {
 public:
  Domain() = default;
  void push(int var, Affine lo, std::optional<Affine> hi);
  const std::vector<Range>& ranges() const { return ranges_; }
  const Range* find(int var) const;
  bool has(int var) const { return find(var) != nullptr; }
  // Domain with var's range replaced (or appended when absent).
  Domain with_range(int var, Affine lo, std::optional<Affine> hi) const;
  Domain without(int var) const;

  // Exact extrema over the domain (ranges assumed nonempty); absent when
  // unbounded or when a free variable is not covered.
  std::optional<Integer> min(const Affine& a) const;
  std::optional<Integer> max(const Affine& a) const;
  bool nonneg(const Affine& a) const;
  bool negative(const Affine& a) const;

  std::string str() const;

 private:
  std::optional<Integer> extremum(Affine a, bool want_min) const;
  std::vector<Range> ranges_;
};

}  // namespace telesum
