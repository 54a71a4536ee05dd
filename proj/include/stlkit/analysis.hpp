#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stlkit/ast.hpp"

namespace stlkit::stl {

/// Rewrites f over the core connectives {true, false, atom, !, &, U}:
///   F_I p    => true U_I p
///   G_I p    => !(true U_I !p)
///   a || b   => !(!a & !b)
///   a -> b   => !(!!a & !b)
/// Double negations introduced by the rewrite are kept, so the result is a
/// fixed point of desugar().
Formula desugar(const Formula& f);

/// Every formula-typed node of f in pre-order, f itself first, atoms included.
std::vector<Formula> subformulas(const Formula& f);

/// Number of !, &, ||, ->, G, F and U nodes.
std::size_t count_operators(const Formula& f);

/// Formula skeleton: atoms become the placeholder φ and window bounds become I.
struct Template {
  enum class Kind { Placeholder, True, False, Not, And, Or, Implies, Always, Eventually, Until };

  Kind kind = Kind::Placeholder;
  bool bounded = false;  // temporal node carried a window
  std::vector<Template> children;

  friend bool operator==(const Template&, const Template&) = default;
};

Template extract_template(const Formula& f);

/// Same layout rules as format(const Formula&): "G[I] ( φ -> F[I] ( φ ) )".
std::string format(const Template& t);

}  // namespace stlkit::stl
