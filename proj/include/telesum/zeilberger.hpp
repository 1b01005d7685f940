#pragma once

// Creative telescoping over the term algebra, for summands that are
// hypergeometric terms times polynomials in nested sums of the summation
// variable, and the recurrence for the definite sum that follows from it.

#include <optional>
#include <vector>

#include "telesum/algebra.hpp"

namespace telesum {

// g(k+1) - g(k) = sum_i c_i F_i(k) with c_i free of k.
struct TelescopingSolution {
  std::vector<RatFun> c;
  Expr g;
};

// Basis of the solutions whose certificate g lies in the span of
// (rational function) * (kernel class) * (monomial in the sums) over the
// classes and monomials reachable from the F_i. Every returned solution has
// been checked symbolically.
std::vector<TelescopingSolution> solve_telescoping(const std::vector<Expr>& F, int k, const Domain& dom,
                                                   int extra_degree = 0);

// e(n + i) for i >= 0. Generic sums whose body depends on n are rewritten in
// terms of the unshifted sum through an order-one relation of the body.
Expr shift_in(const Expr& e, int n, long i, const Domain& dom);

// sum_i coeffs[i](n) f(n+i, k) = g(n, k+1) - g(n, k).
struct SummandRecurrence {
  int n = -1, k = -1;
  std::vector<RatFun> coeffs;
  Expr certificate;
  std::vector<Expr> shifted;  // f(n+i, k), i = 0..order
  bool lower_orders_fail = false;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Minimal order 1..d_max; coefficients polynomial, content removed, positive
// leading coefficient of the last one. Absent when no order works.
std::optional<SummandRecurrence> creative_telescoping(const Expr& f, int n, int k, const Domain& dom, int d_max = 5);

// Symbolic check of the summand recurrence.
bool summand_recurrence_holds(const SummandRecurrence& rec, const Domain& dom);

// g with g(k+1) - g(k) = f(k). Tries the ansatz first, then the nested-sum
// class sum_{i=lo}^{k-1} f(i), lo the lower end of k in dom (1 if absent).
std::optional<Expr> plain_telescoping_tower(const Expr& f, int k, const Domain& dom);

// sum_{k=lo}^{hi} f(k) = g(hi+1) - g(lo) when g(k+1) - g(k) = f(k). Where g
// has a pole at an end point the range is shortened by up to three steps on
// either side and the skipped summands are added explicitly. The result must
// be regular on `check` (default: dom without k).
Expr telescoped_sum(const Expr& g, const Expr& f, int k, const Affine& lo, const Affine& hi, const Domain& dom,
                    const Domain* check = nullptr);

// sum_i coeffs[i](var) F(var + i) = rhs(var).
struct LinearRecurrence {
  int var = -1;
  std::vector<RatFun> coeffs;
  Expr rhs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Recurrence of F(n) = sum_{k=lo(n)}^{hi(n)} f(n, k) from a summand
// recurrence: boundary values of the certificate plus the summand slices
// gained or lost when the bounds move with n.
LinearRecurrence sum_recurrence(const Affine& lo, const Affine& hi, const SummandRecurrence& rec, const Domain& dom);

// Polynomial coefficients, content removed, positive leading coefficient of
// the last one; rhs scaled along. Returns the factor applied.
RatFun normalize_recurrence(std::vector<RatFun>& coeffs);

}  // namespace telesum
