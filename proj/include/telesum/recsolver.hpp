#pragma once

// Solutions of linear recurrences with polynomial coefficients: polynomial,
// rational, hypergeometric and d'Alembertian (nested product-sum) ones.

#include <functional>
#include <optional>
#include <vector>

#include "telesum/gosper.hpp"
#include "telesum/zeilberger.hpp"

namespace telesum {

struct SolutionSet {
  std::vector<Expr> homogeneous;
  std::optional<Expr> particular;
  bool complete = false;
  // Indefinite sums of the solutions start here; the first homogeneous
  // solution is 1 there and the particular one vanishes there.
  Affine anchor;
};

// Coefficients must be polynomial in rec.var (other variables are
// parameters); the rhs must be a rational function, polynomial in rec.var
// for polynomial_solutions.
SolutionSet polynomial_solutions(const LinearRecurrence& rec);
SolutionSet rational_solutions(const LinearRecurrence& rec);

// Hypergeometric solutions of the homogeneous part, normalised to 1 at the
// anchor (the lower end of rec.var in dom). Linear factors of the shift
// quotient that are negative on the range are written through reflected
// factorials. `complete` is cleared when a candidate could not be written as
// a term of the algebra.
std::vector<HypergeometricTerm> hypergeometric_solutions(const LinearRecurrence& rec, const Domain& dom,
                                                         bool* complete = nullptr);

using HypergeometricFinder =
    std::function<std::vector<HypergeometricTerm>(const LinearRecurrence&, const Domain&, bool*)>;

// Peels hypergeometric right factors and reduces the order by
// F = h * sum_{i=anchor}^{n-1} G(i).
SolutionSet dalembertian_solutions(const LinearRecurrence& rec, const Domain& dom,
                                   const HypergeometricFinder& finder = hypergeometric_solutions);

// sum_{i=lo}^{hi} T(i) for T an expression in var: Gosper / telescoping per
// kernel class, then nested sums, then a generic sum atom.
Expr indefinite_sum(const Expr& T, int var, const Affine& lo, const Affine& hi, const Domain& dom);

// Generic sums converted to nested sums where possible, then reduced to the
// Lyndon basis (left unreduced above weight 4).
Expr simplify_depth(const Expr& e, const Domain& dom);
SolutionSet simplify_solution_depth(const SolutionSet& s, const Domain& dom);

// rec applied to y, minus the rhs, synchronised; zero for a solution.
Expr recurrence_residual(const LinearRecurrence& rec, const Expr& y, const Domain& dom);

}  // namespace telesum
