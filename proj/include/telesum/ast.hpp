#pragma once

// The user-facing expression tree: what the parser produces, the renderer
// prints and the oracle evaluates. Algorithms work on the term algebra in
// algebra.hpp instead.

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "telesum/affine.hpp"
#include "telesum/mpoly.hpp"
#include "telesum/rational.hpp"

namespace telesum {

enum class NodeKind {
  Number,
  Var,
  Add,
  Mul,
  Pow,          // kids[0]^exponent, integer exponent
  RationalOf,   // rf
  Exponential,  // value^a, rational base, affine exponent
  Factorial,    // a!
  Binomial,     // binomial(a, b)
  Pochhammer,   // (a)_b
  HarmonicSum,  // S[indices](a)
  SSum,         // SS[indices][weights](a)
  Sum,          // sum_{var=a}^{b} kids[0]
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  Rational value;
  int var = -1;
  long exponent = 0;
  std::vector<NodePtr> kids;
  Affine a, b;
  std::vector<long> indices;
  std::vector<Rational> weights;
  RatFun rf;
};

// Evaluation failure (negative factorial, pole, unbound variable).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace ast {
NodePtr number(const Rational& q);
NodePtr variable(int v);
NodePtr add(std::vector<NodePtr> kids);
NodePtr mul(std::vector<NodePtr> kids);
NodePtr pow(NodePtr base, long e);
NodePtr rational(const RatFun& r);
NodePtr exponential(const Rational& base, const Affine& e);
NodePtr factorial(const Affine& a);
NodePtr binomial(const Affine& n, const Affine& k);
NodePtr pochhammer(const Affine& a, const Affine& k);
NodePtr harmonic(std::vector<long> m, const Affine& arg);
NodePtr ssum(std::vector<long> m, std::vector<Rational> x, const Affine& arg);
NodePtr sum(int var, const Affine& lo, const Affine& hi, NodePtr body);
}  // namespace ast

// Nested sums in the usual convention; S_m with m < 0 carries (-1)^i.
Rational harmonic_value(const std::vector<long>& m, const Integer& n);
Rational ssum_value(const std::vector<long>& m, const std::vector<Rational>& x, const Integer& n);
Rational binomial_value(const Integer& n, const Integer& k);
Rational pochhammer_value(const Rational& a, const Integer& k);

Rational evaluate(const NodePtr& e, const Env& env);

NodePtr normalize(const NodePtr& e);
int compare(const NodePtr& a, const NodePtr& b);
inline bool equal(const NodePtr& a, const NodePtr& b) { return compare(a, b) == 0; }

std::set<int> free_vars(const NodePtr& e);
bool depends_on(const NodePtr& e, int v);

// e(v+1)/e(v) when e is hypergeometric in v.
std::optional<RatFun> shift_quotient(const NodePtr& e, int v);

// Value of the rational part if the whole tree is rational.
std::optional<RatFun> as_ratfun(const NodePtr& e);

}  // namespace telesum
