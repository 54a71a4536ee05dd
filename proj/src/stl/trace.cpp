#include "stlkit/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stlkit::stl {

Trace::Trace(std::vector<double> timestamps,
             std::map<std::string, std::vector<double>> variables)
    : timestamps_(std::move(timestamps)), variables_(std::move(variables)) {
  if (timestamps_.empty()) throw TraceError("trace has no samples");
  for (std::size_t i = 0; i < timestamps_.size(); ++i) {
    if (!std::isfinite(timestamps_[i]) || timestamps_[i] < 0) {
      throw TraceError("timestamp " + std::to_string(i) + " is negative or not finite");
    }
    if (i > 0 && !(timestamps_[i] > timestamps_[i - 1])) {
      throw TraceError("timestamps are not strictly increasing at sample " + std::to_string(i));
    }
  }
  for (const auto& [name, values] : variables_) {
    if (values.size() != timestamps_.size()) {
      throw TraceError("variable '" + name + "' has " + std::to_string(values.size()) +
                       " samples, expected " + std::to_string(timestamps_.size()));
    }
  }
}

std::span<const double> Trace::samples(const std::string& name) const {
  auto it = variables_.find(name);
  if (it == variables_.end()) throw TraceError("unknown variable '" + name + "'");
  return it->second;
}

std::size_t Trace::index_of(double t) const {
  auto it = std::lower_bound(timestamps_.begin(), timestamps_.end(), t);
  if (it == timestamps_.end() || *it != t) return npos;
  return static_cast<std::size_t>(it - timestamps_.begin());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw TraceError("line " + std::to_string(line_no) + ": '" + cell +
                     "' is not a finite decimal");
  }
  return v;
}

}  // namespace

Trace read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty() || header[0] != "time") {
    throw TraceError("trace header must start with 'time'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw TraceError("empty column name in trace header");
    if (std::find(header.begin() + 1, header.begin() + c, header[c]) != header.begin() + c) {
      throw TraceError("duplicate column '" + header[c] + "' in trace header");
    }
  }

  std::vector<double> times;
  std::vector<std::vector<double>> columns(header.size() - 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw TraceError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    times.push_back(parse_cell(cells[0], line_no));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      columns[c - 1].push_back(parse_cell(cells[c], line_no));
    }
  }

  std::map<std::string, std::vector<double>> vars;
  for (std::size_t c = 1; c < header.size(); ++c) vars[header[c]] = std::move(columns[c - 1]);
  return Trace(std::move(times), std::move(vars));
}

Trace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace stlkit::stl
