#pragma once

// Definite nested sums to indefinite nested product-sum expressions, one
// summation quantifier at a time from the inside out: telescoping, then
// creative telescoping, recurrence solving and initial values, with an exact
// brute-force oracle checking every layer.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "telesum/ast.hpp"
#include "telesum/recsolver.hpp"

namespace telesum {

struct SimplifyOptions {
  int max_order = 5;      // creative telescoping order limit
  int weight_cap = 4;     // basis reduction
  int depth_limit = 6;    // nested right-hand-side simplifications
  long oracle_budget = 10000000;
  int check_points = 8;   // per-layer verification

  // oracle_budget from TELESUM_ORACLE_BUDGET when set.
  static SimplifyOptions from_env();
};

struct LayerRecord {
  std::string var;
  std::string bounds;      // "lo..hi"
  std::string summand;
  int depth = 0;
  std::string method;      // finite, constant, telescoping, nested-sum, creative-telescoping, direct
  std::string recurrence;  // plain rendering, creative telescoping only
  std::string recurrence_var;
  std::vector<std::string> coefficients;  // c_0 .. c_d, re-parseable
  std::vector<std::string> solutions;
  std::vector<std::string> initial_values;
  std::vector<std::string> checked_points;
  std::string result;
  std::string status;      // solved / unsolved
  std::string reason;
};

struct SimplificationTrace {
  std::vector<LayerRecord> layers;
};

struct ClosedForm {
  Expr expr;
  NodePtr ast;
  int var = -1;            // the free parameter, -1 for a constant sum
  Integer valid_from = 0;
  std::optional<std::pair<NodePtr, NodePtr>> parity_split;
};

class Unsolved : public std::runtime_error {
 public:
  Unsolved(std::string layer, std::string reason, SimplificationTrace trace = {});
  std::string layer;
  std::string reason;
  SimplificationTrace trace;
};

// A layer result that disagrees with direct summation. Never expected.
class VerificationFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The free variable of the sum (at most one), or -1.
int parameter_of(const NodePtr& s);

// Smallest N >= 0 from which every summation range of s is nonempty and the
// summand is defined (searched up to 50).
Integer validity_threshold(const NodePtr& s, int var);

std::pair<ClosedForm, SimplificationTrace> simplify(const NodePtr& s, const SimplifyOptions& opt = {});

// Exact nested summation; refuses more than budget summand evaluations.
Rational oracle(const NodePtr& s, const Env& env, long budget = 10000000);

struct VerifyPoint {
  Integer n;
  Rational expected;
  Rational got;
  bool ok = false;
};
struct VerifyReport {
  std::vector<VerifyPoint> points;
  std::vector<Integer> skipped;  // oracle budget exceeded
  bool ok() const;
};
VerifyReport verify(const ClosedForm& cf, const NodePtr& s, const Integer& from, const Integer& to,
                    long budget = 10000000);

// F = particular + sum_l c_l homogeneous_l with the c_l fixed by
// values[t] = F(anchor + t), t = 0..d-1.
Expr match_initial_values(const SolutionSet& sols, int n, const std::vector<Expr>& values, const Domain& dom);

}  // namespace telesum
