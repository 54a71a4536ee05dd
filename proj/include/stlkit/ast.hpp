#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stlkit::stl {

// ---------------------------------------------------------------------------
// Arithmetic expressions over signal variables.
// ---------------------------------------------------------------------------

struct ExprNode;

/// Immutable, cheaply copyable handle to an expression tree.
class Expr {
 public:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  static Expr var(std::string name);
  static Expr constant(double value);
  static Expr neg(Expr operand);
  static Expr abs(Expr operand);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr div(Expr lhs, Expr rhs);

  const ExprNode& node() const { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> node_;
};

enum class ArithOp { Add, Sub, Mul, Div };

struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};
struct Const {
  double value;
  friend bool operator==(const Const&, const Const&) = default;
};
struct Neg {
  Expr operand;
  friend bool operator==(const Neg&, const Neg&) = default;
};
struct Abs {
  Expr operand;
  friend bool operator==(const Abs&, const Abs&) = default;
};
struct BinOp {
  ArithOp op;
  Expr lhs;
  Expr rhs;
  friend bool operator==(const BinOp&, const BinOp&) = default;
};

struct ExprNode : std::variant<Var, Const, Neg, Abs, BinOp> {
  using variant::variant;
};

// ---------------------------------------------------------------------------
// Atomic predicates and formulas.
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct Atom {
  Expr lhs;
  CmpOp cmp;
  Expr rhs;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Closed time window [lo, hi] with 0 <= lo < hi, in trace time units.
struct Interval {
  double lo;
  double hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Temporal operators may be written without a window ("eventually (a < 5)");
/// such an operator ranges over the rest of the trace.
using OptInterval = std::optional<Interval>;

struct FormulaNode;

/// Immutable, cheaply copyable handle to a formula tree.
class Formula {
 public:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}

  static Formula top();
  static Formula bottom();
  static Formula atomic(Atom atom);
  static Formula atomic(Expr lhs, CmpOp cmp, Expr rhs);
  static Formula negation(Formula operand);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula always(OptInterval interval, Formula operand);
  static Formula eventually(OptInterval interval, Formula operand);
  static Formula until(OptInterval interval, Formula lhs, Formula rhs);

  const FormulaNode& node() const { return *node_; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  std::shared_ptr<const FormulaNode> node_;
};

struct True {
  friend bool operator==(const True&, const True&) = default;
};
struct False {
  friend bool operator==(const False&, const False&) = default;
};
struct Atomic {
  Atom atom;
  friend bool operator==(const Atomic&, const Atomic&) = default;
};
struct Not {
  Formula operand;
  friend bool operator==(const Not&, const Not&) = default;
};
struct And {
  Formula lhs, rhs;
  friend bool operator==(const And&, const And&) = default;
};
struct Or {
  Formula lhs, rhs;
  friend bool operator==(const Or&, const Or&) = default;
};
struct Implies {
  Formula lhs, rhs;
  friend bool operator==(const Implies&, const Implies&) = default;
};
struct Always {
  OptInterval interval;
  Formula operand;
  friend bool operator==(const Always&, const Always&) = default;
};
struct Eventually {
  OptInterval interval;
  Formula operand;
  friend bool operator==(const Eventually&, const Eventually&) = default;
};
struct Until {
  OptInterval interval;
  Formula lhs, rhs;
  friend bool operator==(const Until&, const Until&) = default;
};

struct FormulaNode
    : std::variant<True, False, Atomic, Not, And, Or, Implies, Always, Eventually, Until> {
  using variant::variant;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class Visitor>
decltype(auto) visit(Visitor&& visitor, const Expr& e) {
  return std::visit(std::forward<Visitor>(visitor),
                    static_cast<const ExprNode::variant&>(e.node()));
}

template <class Visitor>
decltype(auto) visit(Visitor&& visitor, const Formula& f) {
  return std::visit(std::forward<Visitor>(visitor),
                    static_cast<const FormulaNode::variant&>(f.node()));
}

template <class T>
const T* get_if(const Formula& f) {
  return std::get_if<T>(&static_cast<const FormulaNode::variant&>(f.node()));
}

/// Variable names referenced anywhere in the formula, sorted and unique.
std::vector<std::string> variables(const Formula& f);

}  // namespace stlkit::stl
