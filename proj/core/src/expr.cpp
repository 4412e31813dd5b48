#include "viab/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

#include "viab/error.hpp"

namespace viab::expr {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    Token tok;
    tok.offset = pos_;
    if (pos_ >= src_.size()) return tok;

    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return lex_number();
    }
    if (is_alpha(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]))) ++end;
      tok.kind = Tok::Ident;
      tok.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return tok;
    }
    switch (c) {
      case '+': tok.kind = Tok::Plus; break;
      case '-': tok.kind = Tok::Minus; break;
      case '*': tok.kind = Tok::Star; break;
      case '/': tok.kind = Tok::Slash; break;
      case '^': tok.kind = Tok::Caret; break;
      case '(': tok.kind = Tok::LParen; break;
      case ')': tok.kind = Tok::RParen; break;
      case ',': tok.kind = Tok::Comma; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }
    tok.text = src_.substr(pos_, 1);
    ++pos_;
    return tok;
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  Token lex_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
      if (exp < src_.size() && is_digit(src_[exp])) {
        while (exp < src_.size() && is_digit(src_[exp])) ++exp;
        end = exp;
      }
    }
    Token tok;
    tok.kind = Tok::Number;
    tok.offset = start;
    tok.text = src_.substr(start, end - start);
    const auto res = std::from_chars(src_.data() + start, src_.data() + end, tok.number);
    if (res.ec != std::errc() || !std::isfinite(tok.number)) {
      throw SyntaxError("numeric literal out of range", start);
    }
    pos_ = end;
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(NodeKind kind, std::vector<NodePtr> args) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->args = std::move(args);
  return node;
}

class Parser {
 public:
  Parser(std::string_view src, Dims dims) : lex_(src), dims_(dims) { advance(); }

  NodePtr parse_all() {
    NodePtr root = parse_expr();
    if (cur_.kind != Tok::End) fail("unexpected token '" + std::string(cur_.text) + "'");
    return root;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& what) const {
    if (cur_.kind == Tok::End) throw SyntaxError("unexpected end of input", cur_.offset);
    throw SyntaxError(what, cur_.offset);
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    advance();
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const NodeKind kind = cur_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      advance();
      lhs = make(kind, {lhs, parse_term()});
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const NodeKind kind = cur_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      advance();
      lhs = make(kind, {lhs, parse_unary()});
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return make(NodeKind::Neg, {parse_unary()});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (cur_.kind == Tok::Caret) {
      advance();
      return make(NodeKind::Pow, {base, parse_unary()});
    }
    return base;
  }

  NodePtr parse_primary() {
    switch (cur_.kind) {
      case Tok::Number: {
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::Number;
        node->number = cur_.number;
        advance();
        return node;
      }
      case Tok::LParen: {
        advance();
        NodePtr inner = parse_expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        const Token ident = cur_;
        advance();
        if (cur_.kind == Tok::LParen) return parse_call(ident);
        return make_variable(ident);
      }
      default:
        fail("expected operand");
    }
  }

  NodePtr parse_call(const Token& ident) {
    NodeKind kind;
    std::size_t arity = 2;
    if (ident.text == "min") {
      kind = NodeKind::Min;
    } else if (ident.text == "max") {
      kind = NodeKind::Max;
    } else if (ident.text == "abs") {
      kind = NodeKind::Abs;
      arity = 1;
    } else {
      throw SyntaxError("unknown function '" + std::string(ident.text) + "'", ident.offset);
    }
    advance();  // '('
    std::vector<NodePtr> args;
    args.push_back(parse_expr());
    for (std::size_t i = 1; i < arity; ++i) {
      expect(Tok::Comma, "','");
      args.push_back(parse_expr());
    }
    expect(Tok::RParen, "')'");
    return make(kind, std::move(args));
  }

  NodePtr make_variable(const Token& ident) {
    const std::optional<std::size_t> slot = resolve(ident.text);
    if (!slot) throw UnknownVariableError(std::string(ident.text));
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Variable;
    node->name = std::string(ident.text);
    node->slot = *slot;
    return node;
  }

  std::optional<std::size_t> resolve(std::string_view name) const {
    if (name == "t") return 0;
    if (name.empty()) return std::nullopt;
    std::size_t base = 0;
    std::size_t dim = 0;
    switch (name.front()) {
      case 'x': base = 1; dim = dims_.n; break;
      case 'u': base = 1 + dims_.n; dim = dims_.p; break;
      case 'w': base = 1 + dims_.n + dims_.p; dim = dims_.q; break;
      default: return std::nullopt;
    }
    const std::string_view digits = name.substr(1);
    if (digits.empty()) {
      if (dim == 1) return base;
      return std::nullopt;
    }
    if (digits.front() == '0') return std::nullopt;
    std::size_t k = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) return std::nullopt;
    if (k < 1 || k > dim) return std::nullopt;
    return base + k - 1;
  }

  Lexer lex_;
  Dims dims_;
  Token cur_;
};

double checked(double value) {
  if (!std::isfinite(value)) throw EvalError("non-finite result");
  return value;
}

template <typename Lookup>
double evaluate(const Node& node, const Lookup& lookup) {
  switch (node.kind) {
    case NodeKind::Number: return node.number;
    case NodeKind::Variable: return lookup(node);
    case NodeKind::Neg: return -evaluate(*node.args[0], lookup);
    case NodeKind::Abs: return std::fabs(evaluate(*node.args[0], lookup));
    default: break;
  }
  const double a = evaluate(*node.args[0], lookup);
  const double b = evaluate(*node.args[1], lookup);
  switch (node.kind) {
    case NodeKind::Add: return checked(a + b);
    case NodeKind::Sub: return checked(a - b);
    case NodeKind::Mul: return checked(a * b);
    case NodeKind::Div:
      if (b == 0.0) throw EvalError("division by zero");
      return checked(a / b);
    case NodeKind::Pow:
      if (a == 0.0 && b < 0.0) throw EvalError("division by zero (0 raised to a negative power)");
      return checked(std::pow(a, b));
    case NodeKind::Min: return std::fmin(a, b);
    case NodeKind::Max: return std::fmax(a, b);
    default: break;
  }
  throw EvalError("corrupt expression node");
}

const char* symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::Add: return " + ";
    case NodeKind::Sub: return " - ";
    case NodeKind::Mul: return " * ";
    case NodeKind::Div: return " / ";
    case NodeKind::Pow: return " ^ ";
    default: return "";
  }
}

void render(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", node.number);
      out += buf;
      return;
    }
    case NodeKind::Variable:
      out += node.name;
      return;
    case NodeKind::Neg:
      out += "(-";
      render(*node.args[0], out);
      out += ')';
      return;
    case NodeKind::Abs:
      out += "abs(";
      render(*node.args[0], out);
      out += ')';
      return;
    case NodeKind::Min:
    case NodeKind::Max:
      out += node.kind == NodeKind::Min ? "min(" : "max(";
      render(*node.args[0], out);
      out += ", ";
      render(*node.args[1], out);
      out += ')';
      return;
    default:
      out += '(';
      render(*node.args[0], out);
      out += symbol(node.kind);
      render(*node.args[1], out);
      out += ')';
      return;
  }
}

}  // namespace

Ast parse(std::string_view source, Dims dims) {
  Parser parser(source, dims);
  return Ast(parser.parse_all(), dims);
}

double eval(const Ast& ast, std::span<const double> slots) {
  if (ast.empty()) throw EvalError("empty expression");
  if (slots.size() != ast.slot_count()) {
    throw EvalError("expected " + std::to_string(ast.slot_count()) + " bindings, got " +
                    std::to_string(slots.size()));
  }
  return checked(evaluate(ast.root(), [&](const Node& v) { return slots[v.slot]; }));
}

double eval(const Ast& ast, const std::map<std::string, double>& bindings) {
  if (ast.empty()) throw EvalError("empty expression");
  const Dims& d = ast.dims();
  auto lookup = [&](const Node& v) {
    if (auto it = bindings.find(v.name); it != bindings.end()) return it->second;
    // x <-> x1 (and likewise u, w) are interchangeable when the dimension is 1.
    std::string alt;
    const char head = v.name.front();
    const std::size_t dim = head == 'x' ? d.n : head == 'u' ? d.p : d.q;
    if (v.name != "t" && dim == 1) alt = v.name.size() == 1 ? v.name + "1" : std::string(1, head);
    if (!alt.empty()) {
      if (auto it = bindings.find(alt); it != bindings.end()) return it->second;
    }
    throw EvalError("missing binding for '" + v.name + "'");
  };
  return checked(evaluate(ast.root(), lookup));
}

std::string to_string(const Ast& ast) {
  std::string out;
  if (!ast.empty()) render(ast.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == NodeKind::Number && a.number != b.number) return false;
  if (a.kind == NodeKind::Variable && (a.name != b.name || a.slot != b.slot)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace viab::expr
