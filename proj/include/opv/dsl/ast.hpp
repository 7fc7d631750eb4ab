#pragma once

// Inequality expression language: lexer, recursive-descent parser and
// canonical printer.
//
//   ineq   := expr (REL expr)?          REL := "<=" | ">=" | "=="
//   expr   := term (("+" | "-") term)*
//   term   := factor ("*" factor)*
//   factor := NUMBER | NAME | NAME "(" args ")" | "(" expr ")" | "inv" "(" expr ")"
//
// Registered functions have fixed arity and their names are reserved.

#include <charconv>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "opv/error.hpp"
#include "opv/funcatalog.hpp"

namespace opv::dsl {

struct SourcePos {
  std::size_t offset = 0;  // 0-based byte offset
  std::size_t line = 1;
  std::size_t col = 1;
};

enum class NodeKind { name, number, call, add, sub, mul, inverse, relation };
enum class Rel { le, ge, eq };

inline std::string_view to_string(Rel r) {
  switch (r) {
    case Rel::le: return "<=";
    case Rel::ge: return ">=";
    case Rel::eq: return "==";
  }
  return "?";
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::name;
  std::string text;  // name, function name, or number lexeme
  double value = 0.0;
  Rel rel = Rel::le;
  std::vector<NodePtr> children;
  SourcePos pos;
};

/// Function name -> arity. Shared by the parser and the evaluator.
inline const std::map<std::string, int, std::less<>>& registered_functions() {
  static const std::map<std::string, int, std::less<>> table{
      // operator means and perspectives
      {"abs2", 1},
      {"nabla", 3},
      {"sharp", 3},
      {"bang", 3},
      {"geoQ", 3},
      {"geoQmod", 3},
      {"S", 2},
      {"entQ", 2},
      {"tsallisQ", 3},
      {"persp", 3},
      {"perspQ", 3},
      {"absPersp", 3},
      {"absPerspMean", 4},
      // scalar means
      {"Lp", 3},
      {"identric", 2},
      {"logmean", 2},
      // functions as values and their evaluation
      {"pow", 1},
      {"neg_pow", 1},
      {"tsallis", 1},
      {"D", 1},
      {"Dl", 1},
      {"fn", 2},
      {"dfn", 2},
      {"imean", 3},
      // vectors and matrix helpers
      {"rq", 3},
      {"ip", 2},
      {"adj", 1},
      {"cong", 2},
  };
  return table;
}

/// Positioned parse failure (SyntaxError, UnknownFunction or ArityMismatch).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourcePos pos, std::vector<std::string> expected, const std::string& msg)
      : Error(kind, std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg + describe(expected)),
        pos_(pos),
        expected_(std::move(expected)) {}

  const SourcePos& pos() const noexcept { return pos_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string describe(const std::vector<std::string>& e) {
    if (e.empty()) return "";
    std::string s = " (expected";
    for (const auto& x : e) s += " " + x;
    return s + ")";
  }

  SourcePos pos_;
  std::vector<std::string> expected_;
};

enum class TokKind { number, name, plus, minus, star, lparen, rparen, comma, le, ge, eq, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string text;
  double value = 0.0;
  SourcePos pos;
  std::size_t length = 0;
};

inline std::string_view describe(TokKind k) {
  switch (k) {
    case TokKind::number: return "number";
    case TokKind::name: return "name";
    case TokKind::plus: return "'+'";
    case TokKind::minus: return "'-'";
    case TokKind::star: return "'*'";
    case TokKind::lparen: return "'('";
    case TokKind::rparen: return "')'";
    case TokKind::comma: return "','";
    case TokKind::le: return "'<='";
    case TokKind::ge: return "'>='";
    case TokKind::eq: return "'=='";
    case TokKind::end: return "end of input";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    Token tok;
    tok.pos = {i, line, col};
    std::size_t len = 1;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          while (k < src.size() && is_digit(src[k])) ++k;
          j = k;
        }
      }
      len = j - i;
      tok.kind = TokKind::number;
      tok.text = std::string(src.substr(i, len));
      auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.value);
      if (res.ec != std::errc())
        throw ParseError(ErrorKind::SyntaxError, tok.pos, {}, "bad number '" + tok.text + "'");
    } else if (is_alpha(c)) {
      std::size_t j = i;
      while (j < src.size() && (is_alpha(src[j]) || is_digit(src[j]))) ++j;
      len = j - i;
      tok.kind = TokKind::name;
      tok.text = std::string(src.substr(i, len));
    } else if (c == '<' || c == '>' || c == '=') {
      if (i + 1 >= src.size() || src[i + 1] != '=')
        throw ParseError(ErrorKind::SyntaxError, tok.pos, {"'<='", "'>='", "'=='"},
                         std::string("unexpected character '") + c + "'");
      len = 2;
      tok.kind = c == '<' ? TokKind::le : c == '>' ? TokKind::ge : TokKind::eq;
      tok.text = std::string(src.substr(i, 2));
    } else {
      switch (c) {
        case '+': tok.kind = TokKind::plus; break;
        case '-': tok.kind = TokKind::minus; break;
        case '*': tok.kind = TokKind::star; break;
        case '(': tok.kind = TokKind::lparen; break;
        case ')': tok.kind = TokKind::rparen; break;
        case ',': tok.kind = TokKind::comma; break;
        default:
          throw ParseError(ErrorKind::SyntaxError, tok.pos, {}, std::string("unexpected character '") + c + "'");
      }
      tok.text = std::string(1, c);
    }
    tok.length = len;
    out.push_back(tok);
    advance(len);
  }
  Token end;
  end.kind = TokKind::end;
  end.pos = {i, line, col};
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  NodePtr parse_ineq() {
    auto lhs = parse_expr();
    const Token& t = peek();
    if (t.kind == TokKind::le || t.kind == TokKind::ge || t.kind == TokKind::eq) {
      next();
      auto rhs = parse_expr();
      expect_end();
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::relation;
      n->rel = t.kind == TokKind::le ? Rel::le : t.kind == TokKind::ge ? Rel::ge : Rel::eq;
      n->text = t.text;
      n->pos = t.pos;
      n->children = {lhs, rhs};
      return n;
    }
    expect_end({"'+'", "'-'", "'*'", "'<='", "'>='", "'=='"});
    return lhs;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& at, std::vector<std::string> expected, const std::string& msg = "") {
    std::string m = msg.empty() ? "unexpected " + std::string(describe(at.kind)) +
                                      (at.kind == TokKind::end ? "" : " '" + at.text + "'")
                                : msg;
    throw ParseError(ErrorKind::SyntaxError, at.pos, std::move(expected), m);
  }

  void expect_end(std::vector<std::string> expected = {"'+'", "'-'", "'*'"}) {
    if (peek().kind != TokKind::end) {
      expected.push_back("end of input");
      fail(peek(), expected);
    }
  }

  const Token& expect(TokKind k) {
    if (peek().kind != k) fail(peek(), {std::string(describe(k))});
    return next();
  }

  static NodePtr binary(NodeKind kind, const Token& op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->text = op.text;
    n->pos = op.pos;
    n->children = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    while (peek().kind == TokKind::plus || peek().kind == TokKind::minus) {
      const Token& op = next();
      auto rhs = parse_term();
      lhs = binary(op.kind == TokKind::plus ? NodeKind::add : NodeKind::sub, op, lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_term() {
    auto lhs = parse_factor();
    while (peek().kind == TokKind::star) {
      const Token& op = next();
      auto rhs = parse_factor();
      lhs = binary(NodeKind::mul, op, lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_factor() {
    const Token& t = peek();
    auto n = std::make_shared<Node>();
    n->pos = t.pos;
    switch (t.kind) {
      case TokKind::number:
        next();
        n->kind = NodeKind::number;
        n->text = t.text;
        n->value = t.value;
        return n;
      case TokKind::lparen: {
        next();
        auto inner = parse_expr();
        if (peek().kind != TokKind::rparen) fail(peek(), {"'+'", "'-'", "'*'", "')'"});
        next();
        return inner;
      }
      case TokKind::name: {
        next();
        if (t.text == "inv") {
          expect(TokKind::lparen);
          auto inner = parse_expr();
          if (peek().kind != TokKind::rparen) fail(peek(), {"'+'", "'-'", "'*'", "')'"});
          next();
          n->kind = NodeKind::inverse;
          n->text = "inv";
          n->children = {inner};
          return n;
        }
        const auto& reg = registered_functions();
        auto it = reg.find(t.text);
        if (peek().kind == TokKind::lparen) {
          if (it == reg.end())
            throw ParseError(ErrorKind::UnknownFunction, t.pos, {}, "unknown function '" + t.text + "'");
          next();
          n->kind = NodeKind::call;
          n->text = t.text;
          parse_args(*n, it->second);
          return n;
        }
        if (it != reg.end()) fail(peek(), {"'('"}, "function '" + t.text + "' must be called");
        n->kind = NodeKind::name;
        n->text = t.text;
        return n;
      }
      default:
        fail(t, {"number", "name", "'('"}, "expected an expression, found " + std::string(describe(t.kind)));
    }
  }

  void parse_args(Node& call, int arity) {
    for (int k = 0; k < arity; ++k) {
      if (k > 0) {
        if (peek().kind == TokKind::rparen)
          throw ParseError(ErrorKind::ArityMismatch, peek().pos, {"','"},
                           call.text + " takes " + std::to_string(arity) + " argument(s), got " + std::to_string(k));
        if (peek().kind != TokKind::comma) fail(peek(), {"'+'", "'-'", "'*'", "','"});
        next();
      } else if (peek().kind == TokKind::rparen) {
        throw ParseError(ErrorKind::ArityMismatch, peek().pos, {"number", "name", "'('"},
                         call.text + " takes " + std::to_string(arity) + " argument(s), got 0");
      }
      call.children.push_back(parse_expr());
    }
    if (peek().kind == TokKind::comma)
      throw ParseError(ErrorKind::ArityMismatch, peek().pos, {"')'"},
                       call.text + " takes " + std::to_string(arity) + " argument(s)");
    if (peek().kind != TokKind::rparen) fail(peek(), {"'+'", "'-'", "'*'", "')'"});
    next();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline NodePtr parse(std::string_view src) { return Parser(src).parse_ineq(); }

/// Structural equality: ignores positions and the spelling of number literals.
inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      if (a.value != b.value) return false;
      break;
    case NodeKind::name:
    case NodeKind::call:
      if (a.text != b.text) return false;
      break;
    case NodeKind::relation:
      if (a.rel != b.rel) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

namespace detail {

inline bool is_additive(const Node& n) { return n.kind == NodeKind::add || n.kind == NodeKind::sub; }

inline void print(const Node& n, std::string& out) {
  auto wrapped = [&](const Node& c, bool paren) {
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case NodeKind::name: out += n.text; break;
    case NodeKind::number: out += n.text.empty() ? format_number(n.value) : n.text; break;
    case NodeKind::call:
    case NodeKind::inverse:
      out += n.kind == NodeKind::inverse ? "inv" : n.text;
      out += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        print(*n.children[i], out);
      }
      out += ')';
      break;
    case NodeKind::add:
    case NodeKind::sub:
      print(*n.children[0], out);
      out += n.kind == NodeKind::add ? " + " : " - ";
      wrapped(*n.children[1], is_additive(*n.children[1]));
      break;
    case NodeKind::mul:
      wrapped(*n.children[0], is_additive(*n.children[0]));
      out += " * ";
      wrapped(*n.children[1], is_additive(*n.children[1]) || n.children[1]->kind == NodeKind::mul);
      break;
    case NodeKind::relation:
      print(*n.children[0], out);
      out += ' ';
      out += to_string(n.rel);
      out += ' ';
      print(*n.children[1], out);
      break;
  }
}

}  // namespace detail

/// Canonical text with the minimal parentheses needed to reparse the same tree.
inline std::string print_canonical(const Node& n) {
  std::string out;
  detail::print(n, out);
  return out;
}

inline std::string print_canonical(const NodePtr& n) { return print_canonical(*n); }

/// Free variable names (excluding function names) in first-appearance order.
inline void collect_names(const Node& n, std::vector<std::string>& out) {
  if (n.kind == NodeKind::name) {
    for (const auto& s : out)
      if (s == n.text) return;
    out.push_back(n.text);
  }
  for (const auto& c : n.children) collect_names(*c, out);
}

}  // namespace opv::dsl
