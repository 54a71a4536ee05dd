#include "stlkit/analysis.hpp"

namespace stlkit::stl {

Formula desugar(const Formula& f) {
  using F = Formula;
  return visit(
      overloaded{
          [&](const True&) { return f; },
          [&](const False&) { return f; },
          [&](const Atomic&) { return f; },
          [](const Not& n) { return F::negation(desugar(n.operand)); },
          [](const And& n) { return F::conjunction(desugar(n.lhs), desugar(n.rhs)); },
          [](const Or& n) {
            return F::negation(
                F::conjunction(F::negation(desugar(n.lhs)), F::negation(desugar(n.rhs))));
          },
          [](const Implies& n) {
            // a -> b  ==  !a || b  ==  !(!!a & !b)
            return F::negation(F::conjunction(F::negation(F::negation(desugar(n.lhs))),
                                              F::negation(desugar(n.rhs))));
          },
          [](const Always& n) {
            return F::negation(
                F::until(n.interval, F::top(), F::negation(desugar(n.operand))));
          },
          [](const Eventually& n) { return F::until(n.interval, F::top(), desugar(n.operand)); },
          [](const Until& n) { return F::until(n.interval, desugar(n.lhs), desugar(n.rhs)); },
      },
      f);
}

namespace {

void preorder(const Formula& f, std::vector<Formula>& out) {
  out.push_back(f);
  visit(overloaded{
            [](const True&) {},
            [](const False&) {},
            [](const Atomic&) {},
            [&](const Not& n) { preorder(n.operand, out); },
            [&](const Always& n) { preorder(n.operand, out); },
            [&](const Eventually& n) { preorder(n.operand, out); },
            [&](const auto& bin) {
              preorder(bin.lhs, out);
              preorder(bin.rhs, out);
            },
        },
        f);
}

}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  preorder(f, out);
  return out;
}

std::size_t count_operators(const Formula& f) {
  std::size_t n = 0;
  for (const auto& sub : subformulas(f)) {
    const bool leaf = get_if<True>(sub) || get_if<False>(sub) || get_if<Atomic>(sub);
    if (!leaf) ++n;
  }
  return n;
}

Template extract_template(const Formula& f) {
  using K = Template::Kind;
  return visit(
      overloaded{
          [](const True&) { return Template{K::True, false, {}}; },
          [](const False&) { return Template{K::False, false, {}}; },
          [](const Atomic&) { return Template{K::Placeholder, false, {}}; },
          [](const Not& n) { return Template{K::Not, false, {extract_template(n.operand)}}; },
          [](const And& n) {
            return Template{K::And, false, {extract_template(n.lhs), extract_template(n.rhs)}};
          },
          [](const Or& n) {
            return Template{K::Or, false, {extract_template(n.lhs), extract_template(n.rhs)}};
          },
          [](const Implies& n) {
            return Template{K::Implies, false,
                            {extract_template(n.lhs), extract_template(n.rhs)}};
          },
          [](const Always& n) {
            return Template{K::Always, n.interval.has_value(), {extract_template(n.operand)}};
          },
          [](const Eventually& n) {
            return Template{K::Eventually, n.interval.has_value(), {extract_template(n.operand)}};
          },
          [](const Until& n) {
            return Template{K::Until, n.interval.has_value(),
                            {extract_template(n.lhs), extract_template(n.rhs)}};
          },
      },
      f);
}

}  // namespace stlkit::stl
