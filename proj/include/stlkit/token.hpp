#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stlkit/error.hpp"

namespace stlkit::stl {

enum class TokenKind {
  Globally,    // G, always, globally, □
  Finally,     // F, eventually, ◊
  Until,       // U, until
  Not,         // !, ~, not, ¬
  And,         // &, &&, and, ∧
  Or,          // ||, or, ∨
  Implies,     // ->, =>, implies, →
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Cmp,         // < <= > >= == != (plus ≤ ≥ ≠ and a lone =)
  Arith,       // + - * /
  AbsBar,      // |
  Ident,
  Number,
  True,        // true, ⊤
  False,       // false, ⊥
  Placeholder  // φ, only produced by template rendering
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;  // exactly as written in the input
  Span span;

  /// Metric-level equality: same kind and same lexeme.
  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.lexeme == b.lexeme;
  }
};

/// True for the Boolean, temporal, comparison and arithmetic operator kinds.
bool is_operator(TokenKind kind);

/// Splits text into tokens. Whitespace separates tokens and is dropped.
/// Throws LexError on the first character that starts no token.
std::vector<Token> tokenize(std::string_view text);

}  // namespace stlkit::stl
