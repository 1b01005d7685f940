#pragma once

// Term algebra used by the summation algorithms. An Expr is a sum of terms
//   coef(vars) * kernel * prod atom^e
// where coef is a multivariate rational function, the kernel is a product of
// factorials of affine arguments, integer powers p^A and a sign (-1)^A, and
// the atoms are nested sums (S-sums with an affine argument, or generic
// sums with an explicit body).
//
// Two terms are in the same class when their kernels differ by a rational
// factor; the class key forgets factorial offsets.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "telesum/affine.hpp"
#include "telesum/ast.hpp"
#include "telesum/mpoly.hpp"

namespace telesum {

// Raised when the algebra cannot represent a result (unprovable sign,
// divergent limit, division by a sum, ...). Callers turn this into UNSOLVED.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Affine forms assumed nonnegative while converting or substituting.
struct Assumptions {
  std::vector<Affine> nonneg;
  void add(const Affine& a);
};

// (A + offset)!^exp for the var part A.
struct FactEntry {
  Integer offset;
  int exp = 0;
};

class Kernel {
 public:
  std::map<Affine, FactEntry> facts;  // key: nonconstant var part
  std::map<Integer, Affine> exps;     // prime -> exponent var part
  Affine sign;                        // coefficients in {0,1}, constant 0

  bool is_one() const { return facts.empty() && exps.empty() && sign.is_constant(); }
  bool has_var(int v) const;
  void collect_vars(std::set<int>& out) const;

  // Multiply into this kernel; rational corrections go into coef.
  void mul_fact(const Affine& arg, int exp, RatFun& coef);
  void mul_exp(const Integer& prime, const Affine& e, RatFun& coef);
  void mul_sign(const Affine& e, RatFun& coef);
  void mul(const Kernel& o, RatFun& coef);
  Kernel inverse() const;

  // this / ref as a rational function; requires same_class.
  RatFun ratio_to(const Kernel& ref) const;
  // K(v + k) / K(v).
  RatFun shift_ratio(int v, long k) const;
  Rational eval(const Env& env) const;

  static bool same_class(const Kernel& a, const Kernel& b);
  static int compare_class(const Kernel& a, const Kernel& b);
  static int compare(const Kernel& a, const Kernel& b);
};

// base^e for a nonzero rational base, split into sign and prime powers.
void kernel_mul_power(Kernel& k, const Rational& base, const Affine& e, RatFun& coef);

// (A + c1)! / (A + c2)! as a rational function.
RatFun fact_ratio(const Affine& a, const Integer& c1, const Integer& c2);

struct Expr;
struct SumAtom;
using AtomPtr = std::shared_ptr<const SumAtom>;
using Monomial = std::vector<std::pair<AtomPtr, int>>;

struct Term {
  RatFun coef;
  Kernel ker;
  Monomial mono;
};

struct Expr {
  std::vector<Term> terms;

  Expr() = default;
  Expr(const RatFun& r);  // NOLINT
  static Expr from_term(Term t);
  static Expr atom(const AtomPtr& a, int power = 1);

  bool is_zero() const { return terms.empty(); }
  bool has_var(int v) const;
  std::set<int> vars() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr scaled(const RatFun& r) const;

  // Canonical form: like terms merged (factorial offsets raised to the max
  // within a class), zero terms dropped, deterministic order.
  Expr canon() const;
  Rational eval(const Env& env) const;
};

// Nested sum atom. Letters (m, x) stand for x^i / i^m; an S-sum when some
// |x| != 1, a harmonic sum otherwise (x = -1 encodes a negative index).
struct SumAtom {
  enum class Kind { Nested, Generic } kind = Kind::Nested;
  std::vector<std::pair<long, Rational>> letters;
  Affine arg;  // upper bound
  // Generic: sum_{var = lo}^{arg} body
  int var = -1;
  Affine lo;
  Expr body;

  int depth() const;
  long weight() const;
};

AtomPtr make_nested(std::vector<std::pair<long, Rational>> letters, const Affine& arg);
// Renames the bound variable canonically.
AtomPtr make_generic(int var, const Affine& lo, const Affine& hi, const Expr& body);
int compare_atoms(const AtomPtr& a, const AtomPtr& b);
int compare_mono(const Monomial& a, const Monomial& b);
Rational eval_atom(const SumAtom& a, const Env& env);

// Substitution v := value. Kernel poles are resolved by the limit along
// v = value + eps; sign questions are settled on dom and otherwise recorded
// as assumptions. Throws Unsupported for divergent limits.
Expr substitute(const Expr& e, int v, const Affine& value, const Domain& dom, Assumptions* as = nullptr);
// v -> v + k, kernels rebased to the unshifted kernel, atom arguments shifted.
Expr shift(const Expr& e, int v, long k);
// Rewrite every atom with argument P + c (P its var part) in terms of the
// argument P, plus explicit boundary terms. Constant-argument atoms are
// evaluated.
Expr synchronize(const Expr& e, const Domain& dom, Assumptions* as = nullptr);


// Conversion from and to the user-facing tree.
Expr from_ast(const NodePtr& n, const Domain& dom, Assumptions* as = nullptr);
NodePtr to_ast(const Expr& e);
NodePtr term_to_ast(const Term& t);

// No denominator factor or factorial argument of e (including generic sum
// bodies over their ranges) can vanish or turn negative on dom. Conservative:
// only linear factors are examined.
bool regular_on(const Expr& e, const Domain& dom);

// Symbolic zero test: canonical form after synchronization is empty.
bool is_zero_symbolic(const Expr& e, const Domain& dom);

std::string str(const Expr& e);

}  // namespace telesum
