#pragma once

// Harmonic sums and S-sums as words over letters (m, x): quasi-shuffle
// products, the Lyndon basis, and conversion of indefinite sums over
// rational functions times nested sums into this class.

#include <map>
#include <optional>
#include <vector>

#include "telesum/algebra.hpp"

namespace telesum {

using Letter = std::pair<long, Rational>;  // x^i / i^m
using Word = std::vector<Letter>;

int compare_letters(const Letter& a, const Letter& b);
int compare_words(const Word& a, const Word& b);
struct WordLess {
  bool operator()(const Word& a, const Word& b) const { return compare_words(a, b) < 0; }
};
using WordCombination = std::map<Word, Rational, WordLess>;

long word_weight(const Word& w);
std::string word_str(const Word& w);
// Letters of a harmonic index vector (negative entries carry (-1)^i).
Word harmonic_word(const std::vector<long>& m);

// Stuffle product of two words.
WordCombination quasi_shuffle_words(const Word& a, const Word& b);
// Product of two nested-sum atoms with the same argument.
Expr quasi_shuffle(const AtomPtr& a, const AtomPtr& b);
// Rewrites every product of nested atoms sharing an argument as a linear
// combination of single atoms.
Expr linearize_products(const Expr& e);

// Zero test modulo the quasi-shuffle relations: synchronised, products
// linearised.
bool is_zero_nested(const Expr& e, const Domain& dom);

bool is_lyndon(const Word& w);
// Chen-Fox-Lyndon factorisation, nonincreasing factors.
std::vector<Word> lyndon_factorization(const Word& w);

struct BasisReport {
  std::vector<Word> kept;
  std::map<Word, Expr, WordLess> eliminated;  // polynomial in basis sums at argument N
};

// Replaces every non-Lyndon nested atom by its polynomial in Lyndon atoms
// of the same argument. Throws Unsupported for weights above the cap.
std::pair<Expr, BasisReport> reduce_to_basis(const Expr& e, int weight_cap);

// S_w(arg) rewritten at the var part of arg plus boundary terms.
Expr synchronize_sum(const Word& w, const Affine& arg);

// sum_{i=lo}^{hi} body(i) where body is a combination of
//   r(i) * x^i * S_w(i) * (factors free of i)
// with r a rational function whose denominator splits into factors i + c,
// c an integer. Absent outside that class.
std::optional<Expr> nested_sum(const Expr& body, int var, const Affine& lo, const Affine& hi, const Domain& dom);

// sum_{i=lo}^{hi} r(i) x^i as harmonic sums and S-sums; throws Unsupported
// when the denominator of r has factors other than i + c.
Expr rational_to_harmonic(const RatFun& r, const Rational& x, int var, const Affine& lo, const Affine& hi,
                          const Domain& dom);

// Replaces generic sum atoms by nested sums wherever nested_sum applies,
// innermost first.
Expr generic_to_nested(const Expr& e, const Domain& dom);

}  // namespace telesum
