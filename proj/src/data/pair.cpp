#include "stlkit/pair.hpp"

#include <sstream>

#include "stlkit/io.hpp"
#include "stlkit/parser.hpp"
#include "stlkit/printer.hpp"

namespace stlkit {

using nlohmann::json;

std::string to_string(PairSource s) {
  return s == PairSource::Handcrafted ? "handcrafted" : "generated";
}

std::string to_string(PairStatus s) {
  switch (s) {
    case PairStatus::Seed: return "seed";
    case PairStatus::Candidate: return "candidate";
    case PairStatus::Accepted: return "accepted";
    case PairStatus::Rejected: return "rejected";
  }
  return "seed";
}

PairSource parse_source(const std::string& s) {
  if (s == "handcrafted") return PairSource::Handcrafted;
  if (s == "generated") return PairSource::Generated;
  throw Error("unknown pair source '" + s + "'");
}

PairStatus parse_status(const std::string& s) {
  if (s == "seed") return PairStatus::Seed;
  if (s == "candidate") return PairStatus::Candidate;
  if (s == "accepted") return PairStatus::Accepted;
  if (s == "rejected") return PairStatus::Rejected;
  throw Error("unknown pair status '" + s + "'");
}

stl::Formula NLSTLPair::formula() const { return stl::parse(stl); }

bool in_pool(const NLSTLPair& p) {
  return p.status == PairStatus::Seed || p.status == PairStatus::Accepted;
}

void canonicalize(NLSTLPair& p) { p.stl = stl::format(stl::parse(p.stl)); }

void to_json(json& j, const NLSTLPair& p) {
  j = json{{"id", p.id},
           {"nl", p.nl},
           {"stl", p.stl},
           {"domain", p.domain},
           {"source", to_string(p.source)},
           {"round", p.round},
           {"status", to_string(p.status)}};
}

void from_json(const json& j, NLSTLPair& p) {
  p.id = j.at("id").get<std::string>();
  p.nl = j.at("nl").get<std::string>();
  p.stl = j.at("stl").get<std::string>();
  p.domain = j.value("domain", std::string("other"));
  p.source = parse_source(j.value("source", std::string("handcrafted")));
  p.round = j.value("round", 0);
  p.status = parse_status(j.value("status", std::string("seed")));
}

std::vector<NLSTLPair> parse_pairs(const std::string& text, const std::string& origin) {
  std::vector<NLSTLPair> pairs;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pairs.push_back(json::parse(line).get<NLSTLPair>());
    } catch (const std::exception& e) {
      throw Error(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

std::vector<NLSTLPair> load_pairs(const std::string& path) {
  return parse_pairs(read_file(path), path);
}

std::string dump_pairs(const std::vector<NLSTLPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += json(p).dump() + "\n";
  return out;
}

void save_pairs(const std::string& path, const std::vector<NLSTLPair>& pairs) {
  write_file_atomic(path, dump_pairs(pairs));
}

}  // namespace stlkit
