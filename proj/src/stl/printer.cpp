#include "stlkit/printer.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "stlkit/analysis.hpp"

namespace stlkit::stl {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

namespace {

enum ExprLevel { kSum = 1, kProduct = 2, kUnary = 3, kPrimary = 4 };

int level(const Expr& e) {
  return visit(overloaded{
                   [](const Var&) { return int{kPrimary}; },
                   [](const Const& c) { return std::signbit(c.value) ? int{kUnary} : int{kPrimary}; },
                   [](const Neg&) { return int{kUnary}; },
                   [](const Abs&) { return int{kPrimary}; },
                   [](const BinOp& b) {
                     return b.op == ArithOp::Add || b.op == ArithOp::Sub ? int{kSum} : int{kProduct};
                   },
               },
               e);
}

std::string paren(const std::string& s) { return "( " + s + " )"; }

std::string render(const Expr& e) {
  return visit(
      overloaded{
          [](const Var& v) { return v.name; },
          [](const Const& c) {
            if (std::signbit(c.value)) return "- " + format_number(-c.value);
            return format_number(c.value);
          },
          [](const Neg& n) {
            // "- 1" would read back as the constant -1, so literals get parentheses.
            const bool wrap = std::holds_alternative<BinOp>(n.operand.node()) ||
                              std::holds_alternative<Const>(n.operand.node());
            const std::string inner = render(n.operand);
            return "- " + (wrap ? paren(inner) : inner);
          },
          [](const Abs& a) { return "| " + render(a.operand) + " |"; },
          [](const BinOp& b) {
            const int own = b.op == ArithOp::Add || b.op == ArithOp::Sub ? kSum : kProduct;
            std::string lhs = render(b.lhs);
            std::string rhs = render(b.rhs);
            if (level(b.lhs) < own) lhs = paren(lhs);
            if (level(b.rhs) <= own) rhs = paren(rhs);
            static constexpr std::array<const char*, 4> kOps{" + ", " - ", " * ", " / "};
            return lhs + kOps[static_cast<int>(b.op)] + rhs;
          },
      },
      e);
}

std::string_view cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Formula layout, shared by formulas and templates
// ---------------------------------------------------------------------------

using Kind = Template::Kind;

// Atoms are laid out as Placeholder nodes whose leaf is the atom text.
struct Layout {
  Kind kind;
  std::string leaf;    // atom text, "φ", "true" or "false"
  std::string window;  // "[0,27]", "[I]" or empty
  std::vector<Layout> children;
};

std::string window_text(const OptInterval& interval) {
  if (!interval) return {};
  return "[" + format_number(interval->lo) + "," + format_number(interval->hi) + "]";
}

Layout layout(const Formula& f) {
  return visit(
      overloaded{
          [](const True&) { return Layout{Kind::True, "true", {}, {}}; },
          [](const False&) { return Layout{Kind::False, "false", {}, {}}; },
          [](const Atomic& a) {
            return Layout{Kind::Placeholder,
                          render(a.atom.lhs) + " " + std::string(cmp_text(a.atom.cmp)) + " " +
                              render(a.atom.rhs),
                          {},
                          {}};
          },
          [](const Not& n) { return Layout{Kind::Not, {}, {}, {layout(n.operand)}}; },
          [](const And& n) { return Layout{Kind::And, {}, {}, {layout(n.lhs), layout(n.rhs)}}; },
          [](const Or& n) { return Layout{Kind::Or, {}, {}, {layout(n.lhs), layout(n.rhs)}}; },
          [](const Implies& n) {
            return Layout{Kind::Implies, {}, {}, {layout(n.lhs), layout(n.rhs)}};
          },
          [](const Always& n) {
            return Layout{Kind::Always, {}, window_text(n.interval), {layout(n.operand)}};
          },
          [](const Eventually& n) {
            return Layout{Kind::Eventually, {}, window_text(n.interval), {layout(n.operand)}};
          },
          [](const Until& n) {
            return Layout{Kind::Until, {}, window_text(n.interval), {layout(n.lhs), layout(n.rhs)}};
          },
      },
      f);
}

Layout layout(const Template& t) {
  Layout out{t.kind, {}, t.bounded ? "[I]" : "", {}};
  switch (t.kind) {
    case Kind::Placeholder: out.leaf = "φ"; break;
    case Kind::True: out.leaf = "true"; break;
    case Kind::False: out.leaf = "false"; break;
    default: break;
  }
  for (const auto& c : t.children) out.children.push_back(layout(c));
  return out;
}

// Binding strength used to decide parentheses for & and ||.
int strength(Kind k) {
  switch (k) {
    case Kind::Implies: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    case Kind::Until: return 4;
    default: return 5;
  }
}

// Nodes whose rendering cannot be split by a surrounding operator.
bool self_delimited(const Layout& l) {
  switch (l.kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Always:
    case Kind::Eventually:
      return true;
    case Kind::Placeholder:
      return l.leaf == "φ";
    default:
      return false;
  }
}

std::string render(const Layout& l) {
  switch (l.kind) {
    case Kind::Placeholder:
    case Kind::True:
    case Kind::False:
      return l.leaf;
    case Kind::Not: {
      const Layout& c = l.children[0];
      const bool bare = self_delimited(c) || c.kind == Kind::Not;
      return "! " + (bare ? render(c) : paren(render(c)));
    }
    case Kind::Always:
      return "G" + l.window + " " + paren(render(l.children[0]));
    case Kind::Eventually:
      return "F" + l.window + " " + paren(render(l.children[0]));
    case Kind::Until:
      return paren(render(l.children[0])) + " U" + l.window + " " + paren(render(l.children[1]));
    case Kind::Implies: {
      auto side = [](const Layout& c) {
        return self_delimited(c) ? render(c) : paren(render(c));
      };
      return side(l.children[0]) + " -> " + side(l.children[1]);
    }
    case Kind::And:
    case Kind::Or: {
      const int own = strength(l.kind);
      std::string lhs = render(l.children[0]);
      std::string rhs = render(l.children[1]);
      if (strength(l.children[0].kind) < own) lhs = paren(lhs);
      if (strength(l.children[1].kind) <= own) rhs = paren(rhs);
      return lhs + (l.kind == Kind::And ? " & " : " || ") + rhs;
    }
  }
  return {};
}

}  // namespace

std::string format(const Expr& e) { return render(e); }

std::string format(const Formula& f) { return render(layout(f)); }

std::string format(const Template& t) { return render(layout(t)); }

}  // namespace stlkit::stl
