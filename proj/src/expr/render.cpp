#include "telesum/render.hpp"

#include <json.hpp>

#include "telesum/symbols.hpp"

namespace telesum {

namespace {

struct Frac {
  MPoly num;  // integral
  std::vector<std::string> den_items;
};

std::string factor_str(const MPoly& f) {
  std::string s = f.str();
  return mpoly_terms(f).size() > 1 ? "(" + s + ")" : s;
}

Frac frac_of(const RatFun& r) {
  Frac fr;
  Rational unit = 1;
  auto factors = split_factors(r.den(), &unit);
  Rational c = r.num().is_zero() ? Rational(1) : r.num().content_q();
  MPoly prim = r.num().is_zero() ? MPoly() : mpoly_scale(r.num(), 1 / c);
  Rational k = c / unit;
  fr.num = mpoly_scale(prim, Rational(k.get_num()));
  if (k.get_den() != 1) fr.den_items.push_back(k.get_den().get_str());
  for (const auto& [f, m] : factors) {
    std::string s = factor_str(f);
    if (m > 1) s += "^" + std::to_string(m);
    fr.den_items.push_back(s);
  }
  return fr;
}

std::string product_str(const RatFun& coef, const std::vector<std::string>& factors) {
  Frac fr = frac_of(coef);
  std::string sign, nstr;
  auto terms = mpoly_terms(fr.num);
  if (terms.size() <= 1) {
    MPoly a = fr.num;
    if (!terms.empty() && terms[0].second < 0) {
      sign = "-";
      a = -a;
    }
    if (a == MPoly(1L))
      nstr = factors.empty() ? "1" : "";
    else
      nstr = a.str();
  } else {
    nstr = fr.num.str();
    if (!factors.empty() || !fr.den_items.empty()) nstr = "(" + nstr + ")";
  }
  std::string body = nstr;
  for (const auto& f : factors) body += (body.empty() ? "" : "*") + f;
  if (!fr.den_items.empty()) {
    std::string d;
    for (const auto& it : fr.den_items) d += (d.empty() ? "" : "*") + it;
    body += "/" + (fr.den_items.size() > 1 ? "(" + d + ")" : d);
  }
  return sign + body;
}

std::string affine_arg(const Affine& a) { return a.str(); }

std::string plain(const NodePtr& e);

std::string as_factor(const NodePtr& e) {
  std::string s = plain(e);
  if (e->kind == NodeKind::Add || e->kind == NodeKind::Mul || e->kind == NodeKind::RationalOf) return "(" + s + ")";
  return s;
}

std::string list_str(const std::vector<long>& m) {
  std::string s;
  for (size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
  return s;
}

std::string plain(const NodePtr& e) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::Number:
      return to_string(n.value);
    case NodeKind::Var:
      return symbol_name(n.var);
    case NodeKind::RationalOf:
      return product_str(n.rf, {});
    case NodeKind::Mul: {
      RatFun coef(1L);
      std::vector<std::string> fs;
      for (const auto& k : n.kids) {
        if (k->kind == NodeKind::RationalOf)
          coef *= k->rf;
        else
          fs.push_back(as_factor(k));
      }
      return product_str(coef, fs);
    }
    case NodeKind::Add: {
      std::string out;
      for (const auto& k : n.kids) {
        std::string s = plain(k);
        if (out.empty())
          out = s;
        else if (s[0] == '-')
          out += " - " + s.substr(1);
        else
          out += " + " + s;
      }
      return out;
    }
    case NodeKind::Pow: {
      std::string base = as_factor(n.kids[0]);
      std::string ex = n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent);
      return base + "^" + ex;
    }
    case NodeKind::Exponential: {
      std::string base = to_string(n.value);
      if (n.value < 0 || !is_integer(n.value)) base = "(" + base + ")";
      std::string ex = n.a.str();
      bool simple = n.a.constant() == 0 && n.a.terms().size() == 1 && n.a.terms().begin()->second == 1;
      return base + "^" + (simple ? ex : "(" + ex + ")");
    }
    case NodeKind::Factorial:
      return "Factorial(" + affine_arg(n.a) + ")";
    case NodeKind::Binomial:
      return "Binomial(" + affine_arg(n.a) + "," + affine_arg(n.b) + ")";
    case NodeKind::Pochhammer:
      return "Pochhammer(" + affine_arg(n.a) + "," + affine_arg(n.b) + ")";
    case NodeKind::HarmonicSum:
      return "S[" + list_str(n.indices) + "](" + affine_arg(n.a) + ")";
    case NodeKind::SSum: {
      std::string w;
      for (size_t i = 0; i < n.weights.size(); ++i) w += (i ? "," : "") + to_string(n.weights[i]);
      return "SS[" + list_str(n.indices) + "][" + w + "](" + affine_arg(n.a) + ")";
    }
    case NodeKind::Sum:
      return "Sum(" + symbol_name(n.var) + "," + affine_arg(n.a) + "," + affine_arg(n.b) + "," + plain(n.kids[0]) + ")";
  }
  return "?";
}

using nlohmann::json;

json rational_json(const Rational& q) { return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

json affine_json(const Affine& a) {
  json coeffs = json::object();
  for (const auto& [v, c] : a.terms()) coeffs[symbol_name(v)] = c.get_str();
  return json{{"constant", a.constant().get_str()}, {"coeffs", coeffs}};
}

json poly_json(const MPoly& p) {
  json terms = json::array();
  for (const auto& [mono, c] : mpoly_terms(p)) {
    json powers = json::object();
    for (const auto& [v, e] : mono) powers[symbol_name(v)] = e;
    terms.push_back(json{{"coeff", rational_json(c)}, {"powers", powers}});
  }
  return terms;
}

json to_json(const NodePtr& e) {
  const Node& n = *e;
  json kids = json::array();
  for (const auto& k : n.kids) kids.push_back(to_json(k));
  switch (n.kind) {
    case NodeKind::Number:
      return json{{"kind", "number"}, {"value", rational_json(n.value)}};
    case NodeKind::Var:
      return json{{"kind", "variable"}, {"name", symbol_name(n.var)}};
    case NodeKind::Add:
      return json{{"kind", "add"}, {"children", kids}};
    case NodeKind::Mul:
      return json{{"kind", "mul"}, {"children", kids}};
    case NodeKind::Pow:
      return json{{"kind", "pow"}, {"exponent", std::to_string(n.exponent)}, {"children", kids}};
    case NodeKind::RationalOf:
      if (n.rf.is_constant()) return json{{"kind", "number"}, {"value", rational_json(n.rf.constant_value())}};
      return json{{"kind", "rational_function"}, {"num", poly_json(n.rf.num())}, {"den", poly_json(n.rf.den())}, {"text", render_ratfun(n.rf)}};
    case NodeKind::Exponential:
      return json{{"kind", "power"}, {"base", rational_json(n.value)}, {"exponent", affine_json(n.a)}};
    case NodeKind::Factorial:
      return json{{"kind", "factorial"}, {"arg", affine_json(n.a)}};
    case NodeKind::Binomial:
      return json{{"kind", "binomial"}, {"top", affine_json(n.a)}, {"bottom", affine_json(n.b)}};
    case NodeKind::Pochhammer:
      return json{{"kind", "pochhammer"}, {"base", affine_json(n.a)}, {"count", affine_json(n.b)}};
    case NodeKind::HarmonicSum: {
      json idx = json::array();
      for (long m : n.indices) idx.push_back(std::to_string(m));
      return json{{"kind", "harmonic_sum"}, {"indices", idx}, {"arg", affine_json(n.a)}};
    }
    case NodeKind::SSum: {
      json idx = json::array(), w = json::array();
      for (long m : n.indices) idx.push_back(std::to_string(m));
      for (const auto& x : n.weights) w.push_back(rational_json(x));
      return json{{"kind", "s_sum"}, {"indices", idx}, {"weights", w}, {"arg", affine_json(n.a)}};
    }
    case NodeKind::Sum:
      return json{{"kind", "sum"},
                  {"var", symbol_name(n.var)},
                  {"lower", affine_json(n.a)},
                  {"upper", affine_json(n.b)},
                  {"children", kids}};
  }
  return json();
}

}  // namespace

std::string render_ratfun(const RatFun& r) { return product_str(r, {}); }

std::string render_plain(const NodePtr& e) { return plain(normalize(e)); }

std::string render_json(const NodePtr& e) { return to_json(normalize(e)).dump(); }

std::string render(const NodePtr& e, Format f) { return f == Format::Json ? render_json(e) : render_plain(e); }

}  // namespace telesum
