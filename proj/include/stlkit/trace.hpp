#pragma once

#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stlkit/error.hpp"

namespace stlkit::stl {

class TraceError : public Error {
 public:
  using Error::Error;
};

/// Finite sampled signal: strictly increasing, nonnegative timestamps and one
/// equally long sample sequence per variable. The horizon is the last
/// timestamp.
class Trace {
 public:
  /// Validates the invariants; throws TraceError.
  Trace(std::vector<double> timestamps, std::map<std::string, std::vector<double>> variables);

  std::span<const double> timestamps() const { return timestamps_; }
  std::size_t size() const { return timestamps_.size(); }
  double horizon() const { return timestamps_.back(); }

  bool has(const std::string& name) const { return variables_.count(name) != 0; }
  /// Throws TraceError for an unknown name.
  std::span<const double> samples(const std::string& name) const;
  const std::map<std::string, std::vector<double>>& variables() const { return variables_; }

  /// Index of a timestamp equal to t, or npos.
  std::size_t index_of(double t) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<double> timestamps_;
  std::map<std::string, std::vector<double>> variables_;
};

/// Reads CSV with header "time,var1,var2,..." and one sample per row.
/// Rejects NaN/inf, non-numeric cells, ragged rows and non-increasing times.
Trace read_trace_csv(std::istream& in);
Trace load_trace_csv(const std::string& path);

}  // namespace stlkit::stl
