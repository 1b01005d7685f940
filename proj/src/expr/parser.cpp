#include "telesum/parser.hpp"

#include <cctype>
#include <set>

#include "telesum/symbols.hpp"

namespace telesum {

ParseError::ParseError(SourceSpan s, std::string exp, std::string fnd)
    : std::runtime_error("expected " + exp + ", found " + fnd + " at " + std::to_string(s.start) + ".." +
                         std::to_string(s.end)),
      span(s),
      expected(std::move(exp)),
      found(std::move(fnd)) {}

namespace {

enum class Tok { Int, Name, LParen, RParen, LBrack, RBrack, Comma, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end-of-input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    size_t start = i;
    if (std::isdigit(c)) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Int, s.substr(start, i - start), {start, i}});
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Name, s.substr(start, i - start), {start, i}});
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      default:
        throw ParseError({start, start + 1}, "token", "'" + std::string(1, s[i]) + "'");
    }
    out.push_back({k, std::string(1, s[i]), {start, start + 1}});
    ++i;
  }
  out.push_back({Tok::End, "", {s.size(), s.size()}});
  return out;
}

const std::set<std::string> kReserved = {"Sum", "Binomial", "Factorial", "Pochhammer", "S", "SS"};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  NodePtr run() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) fail("operator or end-of-input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& expected) { throw ParseError(peek().span, expected, describe(peek())); }
  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(what);
    return next();
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  NodePtr expr() {
    std::vector<NodePtr> terms{term()};
    while (true) {
      if (accept(Tok::Plus)) {
        terms.push_back(term());
      } else if (accept(Tok::Minus)) {
        terms.push_back(ast::mul({ast::number(-1), term()}));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : ast::add(std::move(terms));
  }

  NodePtr term() {
    std::vector<NodePtr> fs{unary()};
    while (true) {
      if (accept(Tok::Star)) {
        fs.push_back(unary());
      } else if (accept(Tok::Slash)) {
        fs.push_back(ast::pow(unary(), -1));
      } else {
        break;
      }
    }
    return fs.size() == 1 ? fs[0] : ast::mul(std::move(fs));
  }

  NodePtr unary() {
    if (accept(Tok::Minus)) return ast::mul({ast::number(-1), unary()});
    return factor();
  }

  NodePtr factor() {
    size_t base_start = peek().span.start;
    NodePtr base = atom();
    size_t base_end = toks_[pos_ - 1].span.end;
    if (!accept(Tok::Caret)) return base;
    size_t ex_start = peek().span.start;
    NodePtr ex = exponent();
    SourceSpan ex_span{ex_start, toks_[pos_ - 1].span.end};
    auto er = as_ratfun(ex);
    if (er && er->is_constant()) {
      Rational q = er->constant_value();
      if (!is_integer(q)) throw ParseError(ex_span, "integer exponent", "'" + to_string(q) + "'");
      if (!q.get_num().fits_slong_p()) throw ParseError(ex_span, "exponent of machine size", "'" + to_string(q) + "'");
      return ast::pow(base, q.get_num().get_si());
    }
    auto aff = er ? Affine::from_ratfun(*er) : std::nullopt;
    if (!aff) throw ParseError(ex_span, "integer or affine exponent", "non-affine expression");
    auto br = as_ratfun(base);
    if (!br || !br->is_constant())
      throw ParseError({base_start, base_end}, "rational constant base for a symbolic exponent", "symbolic base");
    return ast::exponential(br->constant_value(), *aff);
  }

  NodePtr exponent() {
    if (accept(Tok::Minus)) return ast::mul({ast::number(-1), exponent()});
    if (peek().kind == Tok::Int) return ast::number(Rational(Integer(next().text)));
    if (peek().kind == Tok::Name) return name_atom();
    if (accept(Tok::LParen)) {
      NodePtr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail("exponent");
  }

  NodePtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        return ast::number(Rational(Integer(next().text)));
      case Tok::LParen: {
        next();
        NodePtr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Name:
        return name_atom();
      default:
        fail("expression");
    }
  }

  NodePtr name_atom() {
    Token t = next();
    const std::string& nm = t.text;
    if (nm == "S" && peek().kind == Tok::LBrack) return harmonic();
    if (nm == "SS" && peek().kind == Tok::LBrack) return ssum();
    if (peek().kind == Tok::LParen) {
      if (nm == "Sum") return sum_call(t);
      if (nm == "Binomial") {
        next();
        Affine a = affine_arg();
        expect(Tok::Comma, "','");
        Affine b = affine_arg();
        expect(Tok::RParen, "')'");
        return ast::binomial(a, b);
      }
      if (nm == "Factorial") {
        next();
        Affine a = affine_arg();
        expect(Tok::RParen, "')'");
        return ast::factorial(a);
      }
      if (nm == "Pochhammer") {
        next();
        Affine a = affine_arg();
        expect(Tok::Comma, "','");
        Affine b = affine_arg();
        expect(Tok::RParen, "')'");
        return ast::pochhammer(a, b);
      }
      throw ParseError(t.span, "known function (Sum, Binomial, Factorial, Pochhammer, S, SS)", "unknown function '" + nm + "'");
    }
    if (kReserved.count(nm)) throw ParseError(peek().span, nm == "S" || nm == "SS" ? "'['" : "'('", describe(peek()));
    return ast::variable(intern_symbol(nm));
  }

  Affine affine_arg() {
    size_t start = peek().span.start;
    NodePtr e = expr();
    SourceSpan sp{start, toks_[pos_ - 1].span.end};
    auto r = as_ratfun(e);
    std::optional<Affine> a = r ? Affine::from_ratfun(*r) : std::nullopt;
    if (!a) throw ParseError(sp, "affine integer expression", "'" + render_span(sp) + "'");
    return *a;
  }

  std::string render_span(SourceSpan sp) const {
    std::string s;
    for (const auto& t : toks_)
      if (t.span.start >= sp.start && t.span.end <= sp.end) s += t.text;
    return s;
  }

  long signed_int(bool allow_negative) {
    bool neg = false;
    size_t start = peek().span.start;
    if (allow_negative && accept(Tok::Minus)) neg = true;
    Token t = expect(Tok::Int, allow_negative ? "nonzero integer index" : "positive integer index");
    Integer v(t.text);
    if (neg) v = -v;
    if (v == 0 || !v.fits_slong_p()) throw ParseError({start, t.span.end}, "nonzero integer index", "'" + v.get_str() + "'");
    return v.get_si();
  }

  std::vector<long> index_list(bool allow_negative) {
    expect(Tok::LBrack, "'['");
    std::vector<long> m{signed_int(allow_negative)};
    while (accept(Tok::Comma)) m.push_back(signed_int(allow_negative));
    expect(Tok::RBrack, "']'");
    return m;
  }

  Affine paren_affine() {
    expect(Tok::LParen, "'('");
    Affine a = affine_arg();
    expect(Tok::RParen, "')'");
    return a;
  }

  NodePtr harmonic() {
    auto m = index_list(true);
    return ast::harmonic(std::move(m), paren_affine());
  }

  NodePtr ssum() {
    size_t start = peek().span.start;
    auto m = index_list(false);
    expect(Tok::LBrack, "'['");
    std::vector<Rational> x;
    do {
      size_t ws = peek().span.start;
      NodePtr w = expr();
      auto r = as_ratfun(w);
      SourceSpan sp{ws, toks_[pos_ - 1].span.end};
      if (!r || !r->is_constant() || r->is_zero())
        throw ParseError(sp, "nonzero rational weight", "'" + render_span(sp) + "'");
      x.push_back(r->constant_value());
    } while (accept(Tok::Comma));
    expect(Tok::RBrack, "']'");
    if (x.size() != m.size())
      throw ParseError({start, toks_[pos_ - 1].span.end}, std::to_string(m.size()) + " weights",
                       std::to_string(x.size()) + " weights");
    return ast::ssum(std::move(m), std::move(x), paren_affine());
  }

  NodePtr sum_call(const Token&) {
    expect(Tok::LParen, "'('");
    Token v = expect(Tok::Name, "summation variable");
    if (kReserved.count(v.text)) throw ParseError(v.span, "summation variable", "reserved name '" + v.text + "'");
    int var = intern_symbol(v.text);
    if (bound_.count(var)) throw ParseError(v.span, "fresh summation variable", "rebound variable '" + v.text + "'");
    expect(Tok::Comma, "','");
    size_t lo_start = peek().span.start;
    Affine lo = affine_arg();
    SourceSpan lo_span{lo_start, toks_[pos_ - 1].span.end};
    expect(Tok::Comma, "','");
    size_t hi_start = peek().span.start;
    Affine hi = affine_arg();
    SourceSpan hi_span{hi_start, toks_[pos_ - 1].span.end};
    if (lo.has_var(var)) throw ParseError(lo_span, "bound free of '" + v.text + "'", "'" + render_span(lo_span) + "'");
    if (hi.has_var(var)) throw ParseError(hi_span, "bound free of '" + v.text + "'", "'" + render_span(hi_span) + "'");
    expect(Tok::Comma, "','");
    bound_.insert(var);
    NodePtr body = expr();
    bound_.erase(var);
    expect(Tok::RParen, "')'");
    return ast::sum(var, lo, hi, body);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::set<int> bound_;
};

}  // namespace

NodePtr parse_raw(const std::string& text) { return Parser(text).run(); }

NodePtr parse(const std::string& text) { return normalize(parse_raw(text)); }

std::string format_diagnostic(const std::string& text, const ParseError& err) {
  size_t ls = text.rfind('\n', err.span.start == 0 ? 0 : err.span.start - 1);
  ls = (ls == std::string::npos || err.span.start == 0) ? 0 : ls + 1;
  if (ls > err.span.start) ls = 0;
  size_t le = text.find('\n', err.span.start);
  if (le == std::string::npos) le = text.size();
  std::string line = text.substr(ls, le - ls);
  size_t col = err.span.start - ls;
  size_t width = std::max<size_t>(1, std::min(err.span.end, le) - err.span.start);
  std::string out = "error at " + std::to_string(err.span.start) + ".." + std::to_string(err.span.end) + ": expected " +
                    err.expected + ", found " + err.found + "\n  " + line + "\n  " + std::string(col, ' ') +
                    std::string(width, '^');
  return out;
}

}  // namespace telesum
