#include "telesum/symbols.hpp"

#include <deque>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace telesum {

namespace {

struct Table {
  std::mutex mu;
  std::deque<std::string> names;
  std::unordered_map<std::string, int> ids;
  int fresh = 0;
};

Table& table() {
  static Table t;
  return t;
}

}  // namespace

int intern_symbol(const std::string& name) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  int id = static_cast<int>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& symbol_name(int id) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  if (id < 0 || static_cast<size_t>(id) >= t.names.size()) throw std::out_of_range("unknown symbol id");
  return t.names[static_cast<size_t>(id)];
}

int fresh_symbol(const std::string& hint) {
  std::string name;
  {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    name = "%" + hint + std::to_string(t.fresh++);
  }
  return intern_symbol(name);
}

}  // namespace telesum
