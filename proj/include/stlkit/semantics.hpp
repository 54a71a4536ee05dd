#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlkit/ast.hpp"
#include "stlkit/trace.hpp"

namespace stlkit::stl {

// Boolean satisfaction (v, t) |= f over sampled traces.
//
// Quantifiers over a window [t+l, t+u] range over the sample timestamps that
// fall inside that closed window; nothing is interpolated. Over an empty
// window G holds and F and U fail. Until requires the left operand at every
// sample of [t, t'] for the witnessing t'. A temporal operator written
// without a window ranges over [t, horizon].

enum class HorizonPolicy {
  Clip,   // windows are truncated at the trace horizon
  Strict  // a window reaching past the horizon is an error
};

struct EvalOptions {
  HorizonPolicy horizon_policy = HorizonPolicy::Clip;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(std::string name)
      : Error("variable '" + name + "' is not present in the trace"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class HorizonExceeded : public Error {
 public:
  HorizonExceeded(double t, double window_end, double horizon);
};

class NonSampleTime : public Error {
 public:
  explicit NonSampleTime(double t);
};

/// Reference evaluator: a direct transcription of the satisfaction clauses.
/// t must be one of the trace timestamps.
bool evaluate(const Formula& f, const Trace& trace, double t, const EvalOptions& opts = {});

/// Element i is the verdict at timestamps[i]. Under the strict policy the
/// verdicts that would raise HorizonExceeded are std::nullopt (these trail
/// the trace, though a sample followed by a gap can stay defined).
using Verdicts = std::vector<std::optional<bool>>;

/// evaluate() at every timestamp.
Verdicts evaluate_all(const Formula& f, const Trace& trace, const EvalOptions& opts = {});

/// Bottom-up evaluator computing one verdict vector per subformula with
/// sliding windows over sample indices; O(|f| * n). Same results as
/// evaluate_all().
Verdicts evaluate_windowed(const Formula& f, const Trace& trace, const EvalOptions& opts = {});

/// Value of an arithmetic expression at sample index i.
double evaluate_expr(const Expr& e, const Trace& trace, std::size_t i);

}  // namespace stlkit::stl
