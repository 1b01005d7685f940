// Command-line driver: simplify, oracle, verify, parse-check.
//
// Exit codes: 0 ok, 1 UNSOLVED, 2 verification mismatch, 3 input error.
// For a batch file (a JSON array of expressions) the most severe code wins.

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "telesum/parser.hpp"
#include "telesum/pipeline.hpp"
#include "telesum/render.hpp"
#include "telesum/symbols.hpp"

using namespace telesum;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kUnsolved = 1, kMismatch = 2, kInput = 3 };

// Severity order for batches: input error > mismatch > unsolved > ok.
int worse(int a, int b) {
  auto rank = [](int c) { return c == kInput ? 3 : c == kMismatch ? 2 : c == kUnsolved ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// One expression per file, or a JSON array of expression strings.
std::vector<std::string> read_inputs(const std::string& path) {
  std::string text = trim(read_file(path));
  if (text.empty() || text.front() != '[') return {text};
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw InputError(path + ": batch entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::pair<Integer, Integer> parse_range(const std::string& s) {
  static const std::regex re(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw InputError("range must look like A..B, got '" + s + "'");
  return {Integer(m[1].str()), Integer(m[2].str())};
}

// Parses text; on failure prints the spanned diagnostic and returns null.
NodePtr parse_or_report(const std::string& text) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    std::cerr << format_diagnostic(text, e) << "\n";
    return nullptr;
  }
}

json layer_json(const LayerRecord& l) {
  return json{{"var", l.var},
              {"bounds", l.bounds},
              {"summand", l.summand},
              {"depth", l.depth},
              {"method", l.method},
              {"recurrence", l.recurrence},
              {"recurrence_var", l.recurrence_var},
              {"coefficients", l.coefficients},
              {"solutions", l.solutions},
              {"initial_values", l.initial_values},
              {"checked_points", l.checked_points},
              {"result", l.result},
              {"status", l.status},
              {"reason", l.reason}};
}

json trace_json(const SimplificationTrace& t) {
  json layers = json::array();
  for (const auto& l : t.layers) layers.push_back(layer_json(l));
  return json{{"layers", layers}};
}

json report_json(const VerifyReport& r, const Integer& a, const Integer& b) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back(json{{"n", p.n.get_str()}, {"expected", to_string(p.expected)}, {"got", to_string(p.got)}, {"ok", p.ok}});
  json skipped = json::array();
  for (const auto& n : r.skipped) skipped.push_back(n.get_str());
  return json{{"from", a.get_str()}, {"to", b.get_str()}, {"ok", r.ok()}, {"points", pts}, {"skipped", skipped}};
}

void print_report(std::ostream& os, const VerifyReport& r) {
  for (const auto& p : r.points)
    if (!p.ok)
      os << "mismatch at " << p.n.get_str() << ": expected " << to_string(p.expected) << ", got " << to_string(p.got)
         << "\n";
  for (const auto& n : r.skipped) os << "skipped " << n.get_str() << " (oracle budget)\n";
  os << (r.ok() ? "PASS" : "FAIL") << " (" << r.points.size() << " points)\n";
}

struct Options {
  std::string in;
  std::string closed;
  std::optional<std::string> at;
  std::optional<std::string> range;
  std::string format = "plain";
  std::optional<int> max_order;
  std::optional<int> weight_cap;
  std::string trace;
};

SimplifyOptions simplify_options(const Options& o) {
  SimplifyOptions s = SimplifyOptions::from_env();
  if (o.max_order) s.max_order = *o.max_order;
  if (o.weight_cap) s.weight_cap = *o.weight_cap;
  return s;
}

// Runs simplify on one input; fills out (json) and prints plain output.
int simplify_one(const std::string& text, const Options& o, json& out, json& traces) {
  out = json{{"input", text}};
  NodePtr s = parse_or_report(text);
  if (!s) {
    out["status"] = "input-error";
    return kInput;
  }
  SimplifyOptions so = simplify_options(o);
  bool plain = o.format == "plain";
  try {
    auto [cf, tr] = simplify(s, so);
    traces.push_back(trace_json(tr));
    std::string form = render_plain(cf.ast);
    out["status"] = "solved";
    out["closed_form"] = form;
    out["ast"] = json::parse(render_json(cf.ast));
    out["valid_from"] = cf.valid_from.get_str();
    if (plain) std::cout << form << "\n";
    if (!o.range) return kOk;
    auto [a, b] = parse_range(*o.range);
    VerifyReport rep = verify(cf, s, a, b, so.oracle_budget);
    out["verify"] = report_json(rep, a, b);
    if (plain) print_report(std::cout, rep);
    return rep.ok() ? kOk : kMismatch;
  } catch (const Unsolved& u) {
    traces.push_back(trace_json(u.trace));
    out["status"] = "unsolved";
    out["layer"] = u.layer;
    out["reason"] = u.reason;
    if (plain) std::cout << u.what() << "\n";
    return kUnsolved;
  } catch (const VerificationFailure& e) {
    out["status"] = "mismatch";
    out["reason"] = e.what();
    std::cerr << e.what() << "\n";
    return kMismatch;
  }
}

int cmd_simplify(const Options& o) {
  auto inputs = read_inputs(o.in);
  int code = kOk;
  json results = json::array(), traces = json::array();
  for (const auto& text : inputs) {
    json r;
    code = worse(code, simplify_one(text, o, r, traces));
    results.push_back(r);
  }
  if (o.format == "json") std::cout << (inputs.size() == 1 ? results[0] : results).dump(2) << "\n";
  if (!o.trace.empty()) {
    std::ofstream tf(o.trace);
    if (!tf) throw InputError("cannot write " + o.trace);
    tf << (inputs.size() == 1 && !traces.empty() ? traces[0] : traces).dump(2) << "\n";
  }
  return code;
}

int cmd_oracle(const Options& o) {
  if (!o.at) throw InputError("oracle needs --at N");
  Integer n(*o.at);
  auto inputs = read_inputs(o.in);
  int code = kOk;
  json results = json::array();
  for (const auto& text : inputs) {
    NodePtr s = parse_or_report(text);
    if (!s) {
      code = worse(code, kInput);
      results.push_back(json{{"input", text}, {"status", "input-error"}});
      continue;
    }
    Env env;
    int v = parameter_of(s);
    if (v >= 0) env[v] = n;
    Rational val = oracle(s, env, SimplifyOptions::from_env().oracle_budget);
    if (o.format == "plain") std::cout << to_string(val) << "\n";
    results.push_back(json{{"input", text}, {"at", n.get_str()}, {"value", to_string(val)}});
  }
  if (o.format == "json") std::cout << (inputs.size() == 1 ? results[0] : results).dump(2) << "\n";
  return code;
}

// Checks a closed form (from --closed, or from simplify) against the oracle.
int cmd_verify(const Options& o) {
  std::string text = trim(read_file(o.in));
  NodePtr s = parse_or_report(text);
  if (!s) return kInput;
  ClosedForm cf;
  cf.var = parameter_of(s);
  cf.valid_from = validity_threshold(s, cf.var);
  if (!o.closed.empty()) {
    std::string ctext = trim(read_file(o.closed));
    cf.ast = parse_or_report(ctext);
    if (!cf.ast) return kInput;
  } else {
    try {
      cf = simplify(s, simplify_options(o)).first;
    } catch (const Unsolved& u) {
      std::cout << u.what() << "\n";
      return kUnsolved;
    }
  }
  Integer a = cf.valid_from, b = cf.valid_from + 28;
  if (o.range) std::tie(a, b) = parse_range(*o.range);
  VerifyReport rep = verify(cf, s, a, b, SimplifyOptions::from_env().oracle_budget);
  if (o.format == "json")
    std::cout << report_json(rep, a, b).dump(2) << "\n";
  else
    print_report(std::cout, rep);
  return rep.ok() ? kOk : kMismatch;
}

int cmd_parse_check(const Options& o) {
  auto inputs = read_inputs(o.in);
  int code = kOk;
  for (const auto& text : inputs) {
    NodePtr s = parse_or_report(text);
    if (!s) {
      code = worse(code, kInput);
      continue;
    }
    std::cout << (o.format == "json" ? render_json(s) : render_plain(s)) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"telesum: definite nested sums to nested product-sum expressions"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--in", o.in, "input file (one expression, or a JSON array of expressions)")->required();
    c->add_option("--format", o.format, "plain or json")->check(CLI::IsMember({"plain", "json"}));
  };
  auto* simp = app.add_subcommand("simplify", "simplify a definite sum");
  add_common(simp);
  simp->add_option("--verify", o.range, "check against the oracle for N in A..B");
  simp->add_option("--max-order", o.max_order, "creative telescoping order limit")->check(CLI::PositiveNumber);
  simp->add_option("--weight-cap", o.weight_cap, "basis reduction weight cap")->check(CLI::NonNegativeNumber);
  simp->add_option("--trace", o.trace, "write the simplification trace as JSON");

  auto* orc = app.add_subcommand("oracle", "evaluate a sum by brute force");
  add_common(orc);
  orc->add_option("--at", o.at, "value of the free variable");

  auto* ver = app.add_subcommand("verify", "compare a closed form with the oracle");
  add_common(ver);
  ver->add_option("--closed", o.closed, "file with the closed form (default: simplify the input)");
  ver->add_option("--verify", o.range, "range A..B (default: threshold..threshold+28)");
  ver->add_option("--max-order", o.max_order, "creative telescoping order limit")->check(CLI::PositiveNumber);
  ver->add_option("--weight-cap", o.weight_cap, "basis reduction weight cap")->check(CLI::NonNegativeNumber);

  auto* pc = app.add_subcommand("parse-check", "parse and print the normal form");
  add_common(pc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }

  try {
    if (*simp) return cmd_simplify(o);
    if (*orc) return cmd_oracle(o);
    if (*ver) return cmd_verify(o);
    if (*pc) return cmd_parse_check(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const OracleBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
