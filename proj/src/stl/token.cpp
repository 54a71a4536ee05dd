#include "stlkit/token.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace stlkit::stl {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Globally: return "G";
    case TokenKind::Finally: return "F";
    case TokenKind::Until: return "U";
    case TokenKind::Not: return "NOT";
    case TokenKind::And: return "AND";
    case TokenKind::Or: return "OR";
    case TokenKind::Implies: return "IMPLIES";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Cmp: return "comparison";
    case TokenKind::Arith: return "arithmetic operator";
    case TokenKind::AbsBar: return "'|'";
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::True: return "true";
    case TokenKind::False: return "false";
    case TokenKind::Placeholder: return "placeholder";
  }
  return "?";
}

bool is_operator(TokenKind kind) {
  switch (kind) {
    case TokenKind::Globally:
    case TokenKind::Finally:
    case TokenKind::Until:
    case TokenKind::Not:
    case TokenKind::And:
    case TokenKind::Or:
    case TokenKind::Implies:
    case TokenKind::Cmp:
    case TokenKind::Arith:
      return true;
    default:
      return false;
  }
}

namespace {

struct Symbol {
  std::string_view text;
  TokenKind kind;
};

// Longest match first within each leading byte.
constexpr std::array kSymbols{
    Symbol{"->", TokenKind::Implies}, Symbol{"=>", TokenKind::Implies},
    Symbol{"<=", TokenKind::Cmp},     Symbol{">=", TokenKind::Cmp},
    Symbol{"==", TokenKind::Cmp},     Symbol{"!=", TokenKind::Cmp},
    Symbol{"&&", TokenKind::And},     Symbol{"||", TokenKind::Or},
    Symbol{"<", TokenKind::Cmp},      Symbol{">", TokenKind::Cmp},
    Symbol{"=", TokenKind::Cmp},      Symbol{"!", TokenKind::Not},
    Symbol{"~", TokenKind::Not},      Symbol{"&", TokenKind::And},
    Symbol{"|", TokenKind::AbsBar},   Symbol{"(", TokenKind::LParen},
    Symbol{")", TokenKind::RParen},   Symbol{"[", TokenKind::LBracket},
    Symbol{"]", TokenKind::RBracket}, Symbol{",", TokenKind::Comma},
    Symbol{"+", TokenKind::Arith},    Symbol{"-", TokenKind::Arith},
    Symbol{"*", TokenKind::Arith},    Symbol{"/", TokenKind::Arith},
    // UTF-8 aliases.
    Symbol{"∧", TokenKind::And},      Symbol{"∨", TokenKind::Or},
    Symbol{"¬", TokenKind::Not},      Symbol{"→", TokenKind::Implies},
    Symbol{"⇒", TokenKind::Implies},  Symbol{"□", TokenKind::Globally},
    Symbol{"◇", TokenKind::Finally},  Symbol{"◊", TokenKind::Finally},
    Symbol{"≤", TokenKind::Cmp},      Symbol{"≥", TokenKind::Cmp},
    Symbol{"≠", TokenKind::Cmp},      Symbol{"⊤", TokenKind::True},
    Symbol{"⊥", TokenKind::False},    Symbol{"φ", TokenKind::Placeholder},
    Symbol{"−", TokenKind::Arith},
};

constexpr std::array kKeywords{
    Symbol{"G", TokenKind::Globally},        Symbol{"F", TokenKind::Finally},
    Symbol{"U", TokenKind::Until},           Symbol{"always", TokenKind::Globally},
    Symbol{"globally", TokenKind::Globally}, Symbol{"eventually", TokenKind::Finally},
    Symbol{"until", TokenKind::Until},       Symbol{"not", TokenKind::Not},
    Symbol{"and", TokenKind::And},           Symbol{"or", TokenKind::Or},
    Symbol{"implies", TokenKind::Implies},   Symbol{"true", TokenKind::True},
    Symbol{"false", TokenKind::False},
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the UTF-8 sequence starting at text[pos], for error reporting.
std::size_t utf8_length(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t n = 1;
  if (lead >= 0xF0) n = 4;
  else if (lead >= 0xE0) n = 3;
  else if (lead >= 0xC0) n = 2;
  return std::min(n, text.size() - pos);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  auto push = [&](TokenKind kind, std::size_t len) {
    tokens.push_back(Token{kind, std::string(text.substr(pos, len)), Span{pos, pos + len}});
    pos += len;
  };

  while (pos < text.size()) {
    const char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }

    if (is_digit(c) || (c == '.' && pos + 1 < text.size() && is_digit(text[pos + 1]))) {
      std::size_t end = pos;
      while (end < text.size() && is_digit(text[end])) ++end;
      if (end < text.size() && text[end] == '.') {
        ++end;
        while (end < text.size() && is_digit(text[end])) ++end;
      }
      if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
        std::size_t exp = end + 1;
        if (exp < text.size() && (text[exp] == '+' || text[exp] == '-')) ++exp;
        if (exp < text.size() && is_digit(text[exp])) {
          end = exp;
          while (end < text.size() && is_digit(text[end])) ++end;
        }
      }
      push(TokenKind::Number, end - pos);
      continue;
    }

    if (is_ident_start(c)) {
      std::size_t end = pos;
      while (end < text.size() && is_ident_char(text[end])) ++end;
      const std::string_view word = text.substr(pos, end - pos);
      TokenKind kind = TokenKind::Ident;
      for (const auto& kw : kKeywords) {
        if (kw.text == word) {
          kind = kw.kind;
          break;
        }
      }
      push(kind, end - pos);
      continue;
    }

    bool matched = false;
    for (const auto& sym : kSymbols) {
      if (text.substr(pos, sym.text.size()) == sym.text) {
        push(sym.kind, sym.text.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw LexError(pos, std::string(text.substr(pos, utf8_length(text, pos))));
    }
  }
  return tokens;
}

}  // namespace stlkit::stl
