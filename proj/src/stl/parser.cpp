#include "stlkit/parser.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "stlkit/printer.hpp"
#include "stlkit/token.hpp"

namespace stlkit::stl {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens)
      : text_(text), tokens_(std::move(tokens)) {}

  Formula parse_formula_to_end() {
    Formula f = parse_implies();
    expect_end();
    return f;
  }

  Expr parse_expr_to_end() {
    Expr e = parse_sum();
    expect_end();
    return e;
  }

 private:
  // ---- token helpers -----------------------------------------------------

  bool at_end() const { return pos_ >= tokens_.size(); }

  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }

  bool check(TokenKind kind) const { return !at_end() && tokens_[pos_].kind == kind; }

  Span here() const {
    if (!at_end()) return tokens_[pos_].span;
    return Span{text_.size(), text_.size()};
  }

  [[noreturn]] void fail(std::string message, std::vector<std::string> expected) const {
    if (!at_end()) {
      message += ", found '" + tokens_[pos_].lexeme + "'";
    } else {
      message += " at end of input";
    }
    throw ParseError(here(), std::move(message), std::move(expected));
  }

  const Token& expect(TokenKind kind) {
    if (!check(kind)) {
      fail("expected " + std::string(to_string(kind)), {std::string(to_string(kind))});
    }
    return tokens_[pos_++];
  }

  void expect_end() {
    if (!at_end()) {
      throw ParseError(here(), "unexpected '" + tokens_[pos_].lexeme + "' after formula",
                       {"end of input"});
    }
  }

  double number_value(const Token& tok) const {
    double value = 0.0;
    const char* first = tok.lexeme.data();
    const char* last = first + tok.lexeme.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      throw ParseError(tok.span, "number '" + tok.lexeme + "' is not a finite decimal");
    }
    return value;
  }

  // ---- formulas ----------------------------------------------------------

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (check(TokenKind::Implies)) {
      ++pos_;
      return Formula::implication(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  // A lone '|' between two formulas can only mean disjunction.
  Formula parse_or() {
    Formula lhs = parse_and();
    while (check(TokenKind::Or) || check(TokenKind::AbsBar)) {
      ++pos_;
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (check(TokenKind::And)) {
      ++pos_;
      lhs = Formula::conjunction(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (check(TokenKind::Until)) {
      ++pos_;
      OptInterval interval = parse_optional_interval();
      return Formula::until(interval, std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    if (check(TokenKind::Not)) {
      ++pos_;
      return Formula::negation(parse_unary());
    }
    if (check(TokenKind::Globally)) {
      ++pos_;
      OptInterval interval = parse_optional_interval();
      return Formula::always(interval, parse_unary());
    }
    if (check(TokenKind::Finally)) {
      ++pos_;
      OptInterval interval = parse_optional_interval();
      return Formula::eventually(interval, parse_unary());
    }
    return parse_primary();
  }

  Formula parse_primary() {
    if (at_end()) {
      fail("expected formula", {"formula"});
    }
    switch (tokens_[pos_].kind) {
      case TokenKind::True:
        ++pos_;
        return Formula::top();
      case TokenKind::False:
        ++pos_;
        return Formula::bottom();
      case TokenKind::LParen:
        return parse_parenthesized();
      case TokenKind::Ident:
      case TokenKind::Number:
      case TokenKind::Arith:
      case TokenKind::AbsBar:
        return parse_atom();
      default:
        fail("expected formula", {"formula"});
    }
  }

  // '(' opens either a grouped formula or an arithmetic subexpression of an
  // atom. Try the atom reading first and keep whichever error got further.
  Formula parse_parenthesized() {
    const std::size_t start = pos_;
    try {
      return parse_atom();
    } catch (const IntervalError&) {
      throw;
    } catch (const ParseError& atom_error) {
      pos_ = start;
      try {
        expect(TokenKind::LParen);
        Formula inner = parse_implies();
        expect(TokenKind::RParen);
        return inner;
      } catch (const IntervalError&) {
        throw;
      } catch (const ParseError& group_error) {
        if (atom_error.span().begin > group_error.span().begin) throw atom_error;
        throw;
      }
    }
  }

  Formula parse_atom() {
    Expr lhs = parse_sum();
    if (!check(TokenKind::Cmp)) {
      fail("expected comparison", {"comparison"});
    }
    const CmpOp cmp = cmp_op(tokens_[pos_++].lexeme);
    Expr rhs = parse_sum();
    return Formula::atomic(std::move(lhs), cmp, std::move(rhs));
  }

  static CmpOp cmp_op(std::string_view lexeme) {
    if (lexeme == "<") return CmpOp::Lt;
    if (lexeme == "<=" || lexeme == "≤") return CmpOp::Le;
    if (lexeme == ">") return CmpOp::Gt;
    if (lexeme == ">=" || lexeme == "≥") return CmpOp::Ge;
    if (lexeme == "==" || lexeme == "=") return CmpOp::Eq;
    return CmpOp::Ne;
  }

  OptInterval parse_optional_interval() {
    if (!check(TokenKind::LBracket)) return std::nullopt;
    const Span open = tokens_[pos_++].span;
    const double lo = parse_bound();
    expect(TokenKind::Comma);
    const double hi = parse_bound();
    const Span close = expect(TokenKind::RBracket).span;
    const Span whole{open.begin, close.end};
    const std::string shown = "[" + format_number(lo) + "," + format_number(hi) + "]";
    if (lo < 0 || hi < 0) {
      throw IntervalError(whole, "negative interval bound " + shown);
    }
    if (lo == hi) {
      throw IntervalError(whole, "singular interval " + shown + ": lower bound must be below upper bound");
    }
    if (lo > hi) {
      throw IntervalError(whole, "empty interval " + shown + ": lower bound exceeds upper bound");
    }
    return Interval{lo, hi};
  }

  double parse_bound() {
    bool negative = false;
    if (check(TokenKind::Arith) && is_minus(tokens_[pos_].lexeme)) {
      negative = true;
      ++pos_;
    }
    if (!check(TokenKind::Number)) {
      fail("expected interval bound", {"number"});
    }
    const double v = number_value(tokens_[pos_++]);
    return negative ? -v : v;
  }

  // ---- arithmetic --------------------------------------------------------

  static bool is_minus(std::string_view lexeme) { return lexeme == "-" || lexeme == "−"; }

  bool check_arith(std::string_view a, std::string_view b = {}) const {
    if (!check(TokenKind::Arith)) return false;
    const std::string& lx = tokens_[pos_].lexeme;
    return lx == a || (!b.empty() && lx == b);
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (check_arith("+") || check_arith("-", "−")) {
      const bool add = tokens_[pos_++].lexeme == "+";
      Expr rhs = parse_product();
      lhs = add ? Expr::add(std::move(lhs), std::move(rhs))
                : Expr::sub(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_factor();
    while (check_arith("*", "/")) {
      const bool mul = tokens_[pos_++].lexeme == "*";
      Expr rhs = parse_factor();
      lhs = mul ? Expr::mul(std::move(lhs), std::move(rhs))
                : Expr::div(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_factor() {
    if (at_end()) {
      fail("expected expression", {"identifier", "number", "'('", "'|'", "'-'"});
    }
    const Token& tok = tokens_[pos_];
    switch (tok.kind) {
      case TokenKind::Number:
        ++pos_;
        return Expr::constant(number_value(tok));
      case TokenKind::Ident:
        return parse_variable();
      case TokenKind::Arith:
        if (is_minus(tok.lexeme)) {
          ++pos_;
          // A minus sign glued to a literal is part of the constant.
          if (check(TokenKind::Number)) {
            return Expr::constant(-number_value(tokens_[pos_++]));
          }
          return Expr::neg(parse_factor());
        }
        break;
      case TokenKind::AbsBar: {
        ++pos_;
        Expr inner = parse_sum();
        expect(TokenKind::AbsBar);
        return Expr::abs(std::move(inner));
      }
      case TokenKind::LParen: {
        ++pos_;
        Expr inner = parse_sum();
        expect(TokenKind::RParen);
        return inner;
      }
      default:
        break;
    }
    fail("expected expression", {"identifier", "number", "'('", "'|'", "'-'"});
  }

  Expr parse_variable() {
    const Token& name = tokens_[pos_++];
    if (name.lexeme == "abs" && check(TokenKind::LParen)) {
      ++pos_;
      Expr inner = parse_sum();
      expect(TokenKind::RParen);
      return Expr::abs(std::move(inner));
    }
    // Dataset notation x[t] names the signal x sampled at the current time.
    const Token* open = peek();
    const Token* t = peek(1);
    const Token* close = peek(2);
    if (open && t && close && open->kind == TokenKind::LBracket && t->kind == TokenKind::Ident &&
        t->lexeme == "t" && close->kind == TokenKind::RBracket) {
      pos_ += 3;
    }
    return Expr::var(name.lexeme);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_constant(const Expr& e) {
  return visit(overloaded{
                   [](const Var&) { return false; },
                   [](const Const&) { return true; },
                   [](const Neg& n) { return is_constant(n.operand); },
                   [](const Abs& a) { return is_constant(a.operand); },
                   [](const BinOp& b) { return is_constant(b.lhs) && is_constant(b.rhs); },
               },
               e);
}

void lint_into(const Formula& f, std::vector<std::string>& out) {
  visit(overloaded{
            [](const True&) {},
            [](const False&) {},
            [&](const Atomic& a) {
              if (is_constant(a.atom.lhs) && is_constant(a.atom.rhs)) {
                out.push_back("atom '" + format(f) + "' compares two constants");
              }
            },
            [&](const Not& n) { lint_into(n.operand, out); },
            [&](const Always& n) { lint_into(n.operand, out); },
            [&](const Eventually& n) { lint_into(n.operand, out); },
            [&](const auto& bin) {
              lint_into(bin.lhs, out);
              lint_into(bin.rhs, out);
            },
        },
        f);
}

}  // namespace

Formula parse(std::string_view text) {
  return Parser(text, tokenize(text)).parse_formula_to_end();
}

Expr parse_expr(std::string_view text) {
  return Parser(text, tokenize(text)).parse_expr_to_end();
}

SyntaxReport check_syntax(std::string_view text) {
  SyntaxReport report;
  try {
    (void)parse(text);
  } catch (const LexError& e) {
    report.diagnostics.push_back(
        {Span{e.position(), e.position() + e.offending().size()}, e.what()});
  } catch (const ParseError& e) {
    report.diagnostics.push_back({e.span(), e.what()});
  }
  return report;
}

std::vector<std::string> lint(const Formula& f) {
  std::vector<std::string> warnings;
  lint_into(f, warnings);
  return warnings;
}

std::string describe(const Diagnostic& d, std::string_view text) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < d.span.begin && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << line << ':' << col << ": " << d.message;
  return os.str();
}

}  // namespace stlkit::stl
