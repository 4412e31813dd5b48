#pragma once

// Arithmetic expressions for ExprDynamics.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]          (right-associative)
//   primary := number | variable | call | '(' expr ')'
//   call    := ('min' | 'max') '(' expr ',' expr ')' | 'abs' '(' expr ')'
//   variable:= 't' | 'x'k | 'u'k | 'w'k       (k = 1..dim)
//            | 'x' | 'u' | 'w'                 (only when that dim is 1)
//
// Unary minus binds looser than '^', so -2^2 == -4.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viab::expr {

struct Dims {
  std::size_t n = 1;  // state
  std::size_t p = 1;  // control
  std::size_t q = 1;  // disturbance
};

enum class NodeKind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Min, Max, Abs };

/// Immutable expression tree. Variables carry both the name as written
/// and a slot in the layout [t, x1..xn, u1..up, w1..wq].
struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  std::string name;
  std::size_t slot = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

class Ast {
 public:
  Ast() = default;
  Ast(std::shared_ptr<const Node> root, Dims dims) : root_(std::move(root)), dims_(dims) {}

  const Node& root() const { return *root_; }
  const Dims& dims() const noexcept { return dims_; }
  bool empty() const noexcept { return root_ == nullptr; }

  /// Number of binding slots: 1 + n + p + q.
  std::size_t slot_count() const noexcept { return 1 + dims_.n + dims_.p + dims_.q; }

 private:
  std::shared_ptr<const Node> root_;
  Dims dims_;
};

Ast parse(std::string_view source, Dims dims);

/// Evaluates with named bindings (t, x1, ..., and the 1-d aliases x/u/w).
double eval(const Ast& ast, const std::map<std::string, double>& bindings);

/// Evaluates with positional slot values laid out as [t, x..., u..., w...].
double eval(const Ast& ast, std::span<const double> slots);

/// Fully parenthesized rendering; parse(to_string(a)) is structurally equal to a.
std::string to_string(const Ast& ast);

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Ast& a, const Ast& b) {
  return structurally_equal(a.root(), b.root());
}

}  // namespace viab::expr
