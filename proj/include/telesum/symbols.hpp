#pragma once

// Process-wide variable table. Variables are small integer ids; the id order
// is the recursive variable order used by MPoly.

#include <string>

namespace telesum {

int intern_symbol(const std::string& name);
const std::string& symbol_name(int id);
// A new variable whose name cannot clash with user input.
int fresh_symbol(const std::string& hint);

}  // namespace telesum
