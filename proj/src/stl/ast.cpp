#include "stlkit/ast.hpp"

#include <algorithm>
#include <vector>

namespace stlkit::stl {

namespace {

template <typename T>
Expr make_expr(T&& value) {
  return Expr(std::make_shared<const ExprNode>(std::forward<T>(value)));
}

template <typename T>
Formula make_formula(T&& value) {
  return Formula(std::make_shared<const FormulaNode>(std::forward<T>(value)));
}

void collect(const Expr& e, std::vector<std::string>& out) {
  visit(overloaded{
                 [&](const Var& v) { out.push_back(v.name); },
                 [](const Const&) {},
                 [&](const Neg& n) { collect(n.operand, out); },
                 [&](const Abs& a) { collect(a.operand, out); },
                 [&](const BinOp& b) {
                   collect(b.lhs, out);
                   collect(b.rhs, out);
                 },
             },
        e);
}

void collect(const Formula& f, std::vector<std::string>& out) {
  visit(overloaded{
                 [](const True&) {},
                 [](const False&) {},
                 [&](const Atomic& a) {
                   collect(a.atom.lhs, out);
                   collect(a.atom.rhs, out);
                 },
                 [&](const Not& n) { collect(n.operand, out); },
                 [&](const Always& n) { collect(n.operand, out); },
                 [&](const Eventually& n) { collect(n.operand, out); },
                 [&](const auto& bin) {
                   collect(bin.lhs, out);
                   collect(bin.rhs, out);
                 },
             },
        f);
}

}  // namespace

Expr Expr::var(std::string name) { return make_expr(Var{std::move(name)}); }
Expr Expr::constant(double value) { return make_expr(Const{value}); }
Expr Expr::neg(Expr operand) { return make_expr(Neg{std::move(operand)}); }
Expr Expr::abs(Expr operand) { return make_expr(Abs{std::move(operand)}); }
Expr Expr::add(Expr lhs, Expr rhs) {
  return make_expr(BinOp{ArithOp::Add, std::move(lhs), std::move(rhs)});
}
Expr Expr::sub(Expr lhs, Expr rhs) {
  return make_expr(BinOp{ArithOp::Sub, std::move(lhs), std::move(rhs)});
}
Expr Expr::mul(Expr lhs, Expr rhs) {
  return make_expr(BinOp{ArithOp::Mul, std::move(lhs), std::move(rhs)});
}
Expr Expr::div(Expr lhs, Expr rhs) {
  return make_expr(BinOp{ArithOp::Div, std::move(lhs), std::move(rhs)});
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  return static_cast<const ExprNode::variant&>(*a.node_) ==
         static_cast<const ExprNode::variant&>(*b.node_);
}

Formula Formula::top() { return make_formula(True{}); }
Formula Formula::bottom() { return make_formula(False{}); }
Formula Formula::atomic(Atom atom) { return make_formula(Atomic{std::move(atom)}); }
Formula Formula::atomic(Expr lhs, CmpOp cmp, Expr rhs) {
  return atomic(Atom{std::move(lhs), cmp, std::move(rhs)});
}
Formula Formula::negation(Formula operand) { return make_formula(Not{std::move(operand)}); }
Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make_formula(And{std::move(lhs), std::move(rhs)});
}
Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make_formula(Or{std::move(lhs), std::move(rhs)});
}
Formula Formula::implication(Formula lhs, Formula rhs) {
  return make_formula(Implies{std::move(lhs), std::move(rhs)});
}
Formula Formula::always(OptInterval interval, Formula operand) {
  return make_formula(Always{interval, std::move(operand)});
}
Formula Formula::eventually(OptInterval interval, Formula operand) {
  return make_formula(Eventually{interval, std::move(operand)});
}
Formula Formula::until(OptInterval interval, Formula lhs, Formula rhs) {
  return make_formula(Until{interval, std::move(lhs), std::move(rhs)});
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return static_cast<const FormulaNode::variant&>(*a.node_) ==
         static_cast<const FormulaNode::variant&>(*b.node_);
}

std::vector<std::string> variables(const Formula& f) {
  std::vector<std::string> names;
  collect(f, names);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace stlkit::stl
