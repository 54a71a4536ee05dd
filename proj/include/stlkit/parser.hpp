#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stlkit/ast.hpp"
#include "stlkit/error.hpp"

namespace stlkit::stl {

/// Parses an STL formula.
///
/// Precedence, tightest first: `!`, temporal operators (`G`, `F` prefix and
/// infix `U`), `&`, `||`, `->`. Implication is right-associative, `&` and `||`
/// left-associative. Keyword and Unicode spellings are accepted (see
/// tokenize()). `x[t]` is read as the variable `x`; `|e|` and `abs(e)` are
/// absolute values.
///
/// Throws LexError, ParseError, or IntervalError (a ParseError subtype).
Formula parse(std::string_view text);

/// Parses a bare arithmetic expression, e.g. "x_1 + 2 * y".
Expr parse_expr(std::string_view text);

struct Diagnostic {
  Span span;
  std::string message;
};

struct SyntaxReport {
  bool ok() const { return diagnostics.empty(); }
  std::vector<Diagnostic> diagnostics;
};

/// Non-throwing front end to parse(): Ok iff the text parses and every
/// interval is well-formed.
SyntaxReport check_syntax(std::string_view text);

/// Warnings that do not make a formula invalid (for instance atoms comparing
/// two constants).
std::vector<std::string> lint(const Formula& f);

/// Renders a diagnostic as "line:col: message" relative to text.
std::string describe(const Diagnostic& d, std::string_view text);

}  // namespace stlkit::stl
