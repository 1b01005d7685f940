#pragma once

// Indefinite hypergeometric summation (Gosper) and its parameterized form,
// which the creative telescoping code reuses.

#include <optional>
#include <vector>

#include "telesum/algebra.hpp"

namespace telesum {

// A single term of the algebra whose shift quotient in var is rational:
// atoms and kernel parts may depend on var only through factorials, powers
// and signs.
struct HypergeometricTerm {
  Expr term;
  int var = -1;

  // term(var + 1) / term(var).
  RatFun shift_quotient() const;
};

// Throws Unsupported when e is not a single hypergeometric term in var.
HypergeometricTerm make_hypergeometric(const Expr& e, int var);

// g(k) = ratio(k) * f(k) satisfies g(k+1) - g(k) = f(k).
struct TelescoperCertificate {
  RatFun ratio;
};

// rho = a(k)/b(k) * c(k+1)/c(k) with gcd(a(k), b(k+h)) = 1 for all h >= 0.
struct GosperForm {
  MPoly a, b, c;
};
GosperForm gosper_form(const RatFun& rho, int k);

// All h >= 0 with gcd(p(k), q(k+h)) nonconstant in k. Other variables are
// treated as parameters.
std::vector<Integer> dispersion_set_in(const MPoly& p, const MPoly& q, int k);

// One solution of rho(k) R(k+1) - R(k) = sum_l c_l q_l(k).
struct ParamSolution {
  std::vector<RatFun> c;
  RatFun ratio;
};

// Basis of the solution space (over the parameters' rational functions) of
// the equation above. The c vectors of different basis elements may be
// dependent; callers pick what they need.
std::vector<ParamSolution> parameterized_gosper(const RatFun& rho, const std::vector<RatFun>& q, int k);

// Several equations rho_b R_b(k+1) - R_b(k) = sum_l c_l q_{b,l}(k) sharing
// the unknowns c_l, one certificate R_b per block. extra_degree raises the
// degree bound of every block.
struct GosperBlock {
  RatFun rho;
  std::vector<RatFun> q;
};
struct BlockSolution {
  std::vector<RatFun> c;
  std::vector<RatFun> ratio;
};
std::vector<BlockSolution> parameterized_gosper_blocks(const std::vector<GosperBlock>& blocks, size_t nparams, int k,
                                                       int extra_degree = 0);

std::optional<TelescoperCertificate> gosper(const HypergeometricTerm& f);

// rho(k) R(k+1) - R(k) == 1 as rational functions.
bool certificate_holds(const RatFun& rho, const RatFun& ratio, int k);

// sum_{k=lower}^{upper} f(k) = g(upper+1) - g(lower); absent if Gosper fails
// or the boundary values cannot be formed.
std::optional<Expr> telescope_definite(const HypergeometricTerm& f, const Affine& lower, const Affine& upper,
                                       const Domain& dom, Assumptions* as = nullptr);

}  // namespace telesum
