#pragma once

#include <stdexcept>
#include <string>

#include "telesum/ast.hpp"

namespace telesum {

struct SourceSpan {
  size_t start = 0;
  size_t end = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, std::string expected, std::string found);
  SourceSpan span;
  std::string expected;
  std::string found;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := atom ['^' (int | name | '(' expr ')')]
//   atom   := int | name | '(' expr ')' | call
//   call   := Sum(v,lo,hi,body) | Binomial(a,b) | Factorial(a) | Pochhammer(a,k)
//           | S[m1,..](a) | SS[m1,..][x1,..](a)
// A non-integer exponent is allowed only over a rational base and must be
// affine. Bounds and atom arguments must be affine with integer coefficients.
NodePtr parse_raw(const std::string& text);
// parse_raw followed by normalize.
NodePtr parse(const std::string& text);

// Message with the offending line and a caret marker under the span.
std::string format_diagnostic(const std::string& text, const ParseError& err);

}  // namespace telesum
