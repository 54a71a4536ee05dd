#include "stlkit/semantics.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "stlkit/printer.hpp"

namespace stlkit::stl {

namespace {

std::string num(double v) { return format_number(v); }

bool compare(double lhs, CmpOp op, double rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
  }
  return false;
}

bool holds(const Atom& atom, const Trace& trace, std::size_t i) {
  return compare(evaluate_expr(atom.lhs, trace, i), atom.cmp, evaluate_expr(atom.rhs, trace, i));
}

void require_variables(const Formula& f, const Trace& trace) {
  for (const auto& name : variables(f)) {
    if (!trace.has(name)) throw UnknownVariable(name);
  }
}

// Start and end of the window a temporal operator opens at time t.
struct Bounds {
  double from;
  double to;  // +inf for an operator without a window
};

Bounds bounds(const OptInterval& interval, double t) {
  if (!interval) return {t, HUGE_VAL};
  return {t + interval->lo, t + interval->hi};
}

bool exceeds(const OptInterval& interval, double t, const Trace& trace, const EvalOptions& opts) {
  return opts.horizon_policy == HorizonPolicy::Strict && interval &&
         t + interval->hi > trace.horizon();
}

// ---------------------------------------------------------------------------
// Reference evaluator. Quantifiers are plain loops over every sample; results
// are memoized per (node, sample) so nested windows stay polynomial.
// ---------------------------------------------------------------------------

class Oracle {
 public:
  Oracle(const Trace& trace, const EvalOptions& opts) : trace_(trace), opts_(opts) {}

  bool sat(const Formula& f, std::size_t i) {
    const auto key = std::make_pair(&f.node(), i);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool value = compute(f, i);
    memo_.emplace(key, value);
    return value;
  }

 private:
  bool in_window(std::size_t j, const Bounds& w) const {
    const double tj = trace_.timestamps()[j];
    return tj >= w.from && tj <= w.to;
  }

  void check_horizon(const OptInterval& interval, std::size_t i) const {
    const double t = trace_.timestamps()[i];
    if (exceeds(interval, t, trace_, opts_)) {
      throw HorizonExceeded(t, t + interval->hi, trace_.horizon());
    }
  }

  bool compute(const Formula& f, std::size_t i) {
    const std::size_t n = trace_.size();
    const double t = trace_.timestamps()[i];
    return visit(
        overloaded{
            [](const True&) { return true; },
            [](const False&) { return false; },
            [&](const Atomic& a) { return holds(a.atom, trace_, i); },
            [&](const Not& g) { return !sat(g.operand, i); },
            // Both operands are always evaluated so that strict-mode errors
            // do not depend on evaluation order.
            [&](const And& g) {
              const bool l = sat(g.lhs, i);
              const bool r = sat(g.rhs, i);
              return l && r;
            },
            [&](const Or& g) {
              const bool l = sat(g.lhs, i);
              const bool r = sat(g.rhs, i);
              return l || r;
            },
            [&](const Implies& g) {
              const bool l = sat(g.lhs, i);
              const bool r = sat(g.rhs, i);
              return !l || r;
            },
            [&](const Always& g) {
              check_horizon(g.interval, i);
              const Bounds w = bounds(g.interval, t);
              bool all = true;
              for (std::size_t j = 0; j < n; ++j) {
                if (in_window(j, w)) all = sat(g.operand, j) && all;
              }
              return all;
            },
            [&](const Eventually& g) {
              check_horizon(g.interval, i);
              const Bounds w = bounds(g.interval, t);
              bool any = false;
              for (std::size_t j = 0; j < n; ++j) {
                if (in_window(j, w)) any = sat(g.operand, j) || any;
              }
              return any;
            },
            [&](const Until& g) {
              check_horizon(g.interval, i);
              const Bounds w = bounds(g.interval, t);
              std::size_t last = n;
              for (std::size_t j = 0; j < n; ++j) {
                if (in_window(j, w)) last = j;
              }
              if (last == n) return false;
              // exists t' in window: rhs at t' and lhs at every sample of [t, t'].
              bool found = false;
              bool lhs_so_far = true;
              for (std::size_t k = i; k <= last; ++k) {
                lhs_so_far = sat(g.lhs, k) && lhs_so_far;
                if (in_window(k, w)) {
                  const bool rhs = sat(g.rhs, k);
                  if (rhs && lhs_so_far) found = true;
                }
              }
              return found;
            },
        },
        f);
  }

  const Trace& trace_;
  EvalOptions opts_;
  std::map<std::pair<const FormulaNode*, std::size_t>, bool> memo_;
};

// ---------------------------------------------------------------------------
// Windowed evaluator
// ---------------------------------------------------------------------------

struct Series {
  std::vector<char> value;
  std::vector<char> defined;
};

// Prefix counts: count(a, b) = number of set entries in [a, b].
class PrefixCount {
 public:
  template <class Pred>
  PrefixCount(std::size_t n, Pred pred) : sums_(n + 1, 0) {
    for (std::size_t i = 0; i < n; ++i) sums_[i + 1] = sums_[i] + (pred(i) ? 1 : 0);
  }
  std::size_t count(std::size_t a, std::size_t b) const { return sums_[b + 1] - sums_[a]; }

 private:
  std::vector<std::size_t> sums_;
};

class Windowed {
 public:
  Windowed(const Trace& trace, const EvalOptions& opts) : trace_(trace), opts_(opts) {}

  Series run(const Formula& f) const {
    const std::size_t n = trace_.size();
    return visit(
        overloaded{
            [&](const True&) { return constant(true); },
            [&](const False&) { return constant(false); },
            [&](const Atomic& a) {
              Series s = constant(false);
              for (std::size_t i = 0; i < n; ++i) s.value[i] = holds(a.atom, trace_, i);
              return s;
            },
            [&](const Not& g) {
              Series s = run(g.operand);
              for (auto& v : s.value) v = !v;
              return s;
            },
            [&](const And& g) {
              return pointwise(run(g.lhs), run(g.rhs), [](bool a, bool b) { return a && b; });
            },
            [&](const Or& g) {
              return pointwise(run(g.lhs), run(g.rhs), [](bool a, bool b) { return a || b; });
            },
            [&](const Implies& g) {
              return pointwise(run(g.lhs), run(g.rhs), [](bool a, bool b) { return !a || b; });
            },
            [&](const Always& g) { return window_unary(g.interval, run(g.operand), true); },
            [&](const Eventually& g) { return window_unary(g.interval, run(g.operand), false); },
            [&](const Until& g) { return window_until(g.interval, run(g.lhs), run(g.rhs)); },
        },
        f);
  }

 private:
  Series constant(bool v) const {
    const std::size_t n = trace_.size();
    return Series{std::vector<char>(n, v), std::vector<char>(n, 1)};
  }

  template <class Op>
  static Series pointwise(Series a, const Series& b, Op op) {
    for (std::size_t i = 0; i < a.value.size(); ++i) {
      a.value[i] = op(a.value[i], b.value[i]);
      a.defined[i] = a.defined[i] && b.defined[i];
    }
    return a;
  }

  // Sample index range [lo[i], hi[i]] of the window opened at each sample;
  // empty when lo[i] > hi[i]. Both ends move forward monotonically.
  struct Windows {
    std::vector<std::size_t> lo;
    std::vector<std::size_t> hi;  // one past the last index, i.e. exclusive
  };

  Windows windows(const OptInterval& interval) const {
    const auto ts = trace_.timestamps();
    const std::size_t n = ts.size();
    Windows w{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Bounds b = bounds(interval, ts[i]);
      while (lo < n && !(ts[lo] >= b.from)) ++lo;
      while (hi < n && ts[hi] <= b.to) ++hi;
      w.lo[i] = lo;
      w.hi[i] = hi;
    }
    return w;
  }

  Series window_unary(const OptInterval& interval, const Series& child, bool universal) const {
    const std::size_t n = trace_.size();
    const Windows w = windows(interval);
    const PrefixCount truths(n, [&](std::size_t j) { return child.value[j] != 0; });
    const PrefixCount undefined(n, [&](std::size_t j) { return child.defined[j] == 0; });
    Series out = constant(universal);
    for (std::size_t i = 0; i < n; ++i) {
      if (exceeds(interval, trace_.timestamps()[i], trace_, opts_)) {
        out.defined[i] = 0;
      }
      if (w.lo[i] >= w.hi[i]) continue;  // empty window: vacuous verdict
      const std::size_t a = w.lo[i];
      const std::size_t b = w.hi[i] - 1;
      const std::size_t hits = truths.count(a, b);
      out.value[i] = universal ? hits == b - a + 1 : hits > 0;
      if (undefined.count(a, b) > 0) out.defined[i] = 0;
    }
    return out;
  }

  Series window_until(const OptInterval& interval, const Series& lhs, const Series& rhs) const {
    const std::size_t n = trace_.size();
    const Windows w = windows(interval);
    const PrefixCount rhs_truths(n, [&](std::size_t j) { return rhs.value[j] != 0; });
    const PrefixCount lhs_undefined(n, [&](std::size_t j) { return lhs.defined[j] == 0; });
    const PrefixCount rhs_undefined(n, [&](std::size_t j) { return rhs.defined[j] == 0; });

    // first_false[i]: first index >= i where lhs fails (n if none).
    std::vector<std::size_t> first_false(n + 1, n);
    for (std::size_t i = n; i-- > 0;) first_false[i] = lhs.value[i] ? first_false[i + 1] : i;

    Series out = constant(false);
    for (std::size_t i = 0; i < n; ++i) {
      if (exceeds(interval, trace_.timestamps()[i], trace_, opts_)) {
        out.defined[i] = 0;
      }
      if (w.lo[i] >= w.hi[i]) continue;
      const std::size_t a = w.lo[i];
      const std::size_t b = w.hi[i] - 1;
      // A witness t' must satisfy rhs and keep lhs true on [i, t'].
      if (first_false[i] > a) {
        const std::size_t last_ok = std::min(b, first_false[i] - 1);
        out.value[i] = rhs_truths.count(a, last_ok) > 0;
      }
      if (lhs_undefined.count(i, b) > 0 || rhs_undefined.count(a, b) > 0) out.defined[i] = 0;
    }
    return out;
  }

  const Trace& trace_;
  EvalOptions opts_;
};

}  // namespace

HorizonExceeded::HorizonExceeded(double t, double window_end, double horizon)
    : Error("window ending at " + num(window_end) + " opened at t=" + num(t) +
            " exceeds the trace horizon " + num(horizon)) {}

NonSampleTime::NonSampleTime(double t)
    : Error("t=" + num(t) + " is not a sample timestamp of the trace") {}

double evaluate_expr(const Expr& e, const Trace& trace, std::size_t i) {
  return visit(overloaded{
                   [&](const Var& v) { return trace.samples(v.name)[i]; },
                   [](const Const& c) { return c.value; },
                   [&](const Neg& n) { return -evaluate_expr(n.operand, trace, i); },
                   [&](const Abs& a) { return std::fabs(evaluate_expr(a.operand, trace, i)); },
                   [&](const BinOp& b) {
                     const double l = evaluate_expr(b.lhs, trace, i);
                     const double r = evaluate_expr(b.rhs, trace, i);
                     switch (b.op) {
                       case ArithOp::Add: return l + r;
                       case ArithOp::Sub: return l - r;
                       case ArithOp::Mul: return l * r;
                       case ArithOp::Div: return l / r;
                     }
                     return 0.0;
                   },
               },
               e);
}

bool evaluate(const Formula& f, const Trace& trace, double t, const EvalOptions& opts) {
  require_variables(f, trace);
  const std::size_t i = trace.index_of(t);
  if (i == Trace::npos) throw NonSampleTime(t);
  return Oracle(trace, opts).sat(f, i);
}

Verdicts evaluate_all(const Formula& f, const Trace& trace, const EvalOptions& opts) {
  require_variables(f, trace);
  Verdicts out(trace.size());
  // Only completed verdicts are memoized, so an aborted evaluation leaves the
  // shared memo consistent.
  Oracle oracle(trace, opts);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    try {
      out[i] = oracle.sat(f, i);
    } catch (const HorizonExceeded&) {
      out[i] = std::nullopt;
    }
  }
  return out;
}

Verdicts evaluate_windowed(const Formula& f, const Trace& trace, const EvalOptions& opts) {
  require_variables(f, trace);
  const Series s = Windowed(trace, opts).run(f);
  Verdicts out(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (s.defined[i]) out[i] = s.value[i] != 0;
  }
  return out;
}

}  // namespace stlkit::stl
