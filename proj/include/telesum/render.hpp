#pragma once

#include <string>

#include "telesum/ast.hpp"

namespace telesum {

enum class Format { Plain, Json };

// Both forms print the normal form of e. Plain output re-parses.
std::string render(const NodePtr& e, Format f);
std::string render_plain(const NodePtr& e);
std::string render_json(const NodePtr& e);

// Numerator over a factored denominator, e.g. "(N^2+N+1)/(N^2*(N+1)^3)".
std::string render_ratfun(const RatFun& r);

}  // namespace telesum
