#pragma once

#include <string>

#include "stlkit/ast.hpp"

namespace stlkit::stl {

/// Canonical ASCII rendering. Tokens are separated by single spaces, a
/// temporal operator is glued to its window ("G[0,27]"), temporal operands
/// and both operands of U are always parenthesized, implication operands are
/// parenthesized unless they delimit themselves, and `&` / `||` only get the
/// parentheses precedence requires. parse(format(f)) == f.
std::string format(const Formula& f);
std::string format(const Expr& e);

/// Shortest decimal that reads back to the same double ("27", "1.5").
std::string format_number(double value);

}  // namespace stlkit::stl
