#include "stlkit/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "stlkit/io.hpp"
#include "stlkit/metrics.hpp"
#include "stlkit/parallel.hpp"
#include "stlkit/parser.hpp"

namespace stlkit::datagen {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Strips list markers and markdown decoration: "1. ", "- ", "**", "##".
std::string undecorate(std::string line) {
  line = trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) line = trim(line.substr(i + 1));
  while (!line.empty() && (line[0] == '-' || line[0] == '*' || line[0] == '#' || line[0] == '>')) {
    line = trim(line.substr(1));
  }
  return line;
}

// If line starts with `label` followed by ':' (case-insensitive, optional
// '**' around the label), returns the remainder.
std::optional<std::string> labelled(const std::string& line, const std::string& label) {
  std::string l = undecorate(line);
  if (l.size() < label.size()) return std::nullopt;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(l[i])) != label[i]) return std::nullopt;
  }
  std::size_t i = label.size();
  while (i < l.size() && l[i] == '*') ++i;
  if (i >= l.size() || l[i] != ':') return std::nullopt;
  ++i;
  while (i < l.size() && l[i] == '*') ++i;
  return trim(l.substr(i));
}

std::string strip_code(std::string s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '`' || s.front() == '$')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '`' || s.back() == '$')) s.pop_back();
  return trim(s);
}

std::string round_id(int round, std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "gen-r%d-%03zu", round, index);
  return buf;
}

}  // namespace

ParsedBlocks parse_blocks(const std::string& text) {
  ParsedBlocks out;
  std::optional<std::string> nl;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (auto rest = labelled(line, "NL")) {
      if (nl) ++out.dropped;
      nl = *rest;
    } else if (auto stl = labelled(line, "STL")) {
      const std::string formula = strip_code(*stl);
      if (nl && !trim(*nl).empty() && !formula.empty()) {
        out.blocks.push_back({trim(*nl), formula});
      } else {
        ++out.dropped;
      }
      nl.reset();
    } else if (nl && !trim(line).empty() && trim(line).rfind("```", 0) != 0) {
      *nl += " " + trim(line);
    }
  }
  if (nl) ++out.dropped;
  return out;
}

std::vector<NLSTLPair> select_exemplars(const retrieval::KnowledgeStore& pool, std::size_t k,
                                        std::uint64_t seed) {
  const auto clustering = retrieval::kmeans(pool, k, seed);
  const auto pairs = pool.pairs();
  std::vector<NLSTLPair> out;
  for (auto i : clustering.exemplar_indices) out.push_back(pairs[i]);
  return out;
}

std::string format_exemplars(const std::vector<NLSTLPair>& exemplars) {
  std::string out;
  for (const auto& e : exemplars) {
    if (!out.empty()) out += "\n";
    out += "NL: " + e.nl + "\nSTL: " + e.stl + "\n";
  }
  return out;
}

Generation generate_candidates(const std::vector<NLSTLPair>& exemplars, llm::Backend& backend,
                               std::size_t count, int round, const PromptSet& prompts,
                               std::size_t requests, std::size_t jobs) {
  requests = std::max<std::size_t>(requests, 1);
  const auto& tmpl = prompts.get("evolve");
  const std::string examples = format_exemplars(exemplars);

  Generation gen;
  for (std::size_t r = 0; r < requests; ++r) {
    const std::size_t share = count / requests + (r < count % requests ? 1 : 0);
    std::string user = render(tmpl.user, {{"exemplars", examples}, {"count", std::to_string(share)}});
    if (requests > 1) {
      user += "\n\n(Request " + std::to_string(r + 1) + " of " + std::to_string(requests) + ".)";
    }
    gen.prompts.push_back(std::move(user));
  }

  const auto responses = parallel_map(requests, jobs, [&](std::size_t r) {
    llm::ChatRequest req;
    req.system_prompt = tmpl.system;
    req.user_prompt = gen.prompts[r];
    req.tag = "evolve";
    req.temperature = 0.0;
    return backend.complete(req).text;
  });

  for (const auto& text : responses) {
    auto parsed = parse_blocks(text);
    gen.dropped += parsed.dropped;
    for (auto& b : parsed.blocks) {
      NLSTLPair p;
      p.id = round_id(round, gen.candidates.size() + 1);
      p.nl = std::move(b.nl);
      p.stl = std::move(b.stl);
      p.domain = "other";
      p.source = PairSource::Generated;
      p.round = round;
      p.status = PairStatus::Candidate;
      gen.candidates.push_back(std::move(p));
    }
  }
  if (gen.candidates.empty()) {
    throw MalformedResponse("no NL/STL block could be read from the model output (" +
                            std::to_string(gen.dropped) + " malformed)");
  }
  return gen;
}

FilterResult filter_syntax(const std::vector<NLSTLPair>& candidates) {
  FilterResult out;
  for (const auto& c : candidates) {
    const auto report = stl::check_syntax(c.stl);
    if (report.ok()) {
      NLSTLPair p = c;
      canonicalize(p);
      out.pass.push_back(std::move(p));
    } else {
      std::string reason = "syntax: ";
      for (std::size_t i = 0; i < report.diagnostics.size(); ++i) {
        if (i > 0) reason += "; ";
        reason += stl::describe(report.diagnostics[i], c.stl);
      }
      out.fail.push_back({c, reason, std::nullopt, 0.0});
    }
  }
  return out;
}

FilterResult filter_novelty(const std::vector<NLSTLPair>& candidates,
                            const std::vector<NLSTLPair>& pool, double threshold) {
  FilterResult out;
  for (const auto& c : candidates) {
    double best = 0;
    std::optional<std::string> nearest;
    auto consider = [&](const NLSTLPair& other) {
      const double s = metrics::rouge_l(c.nl, other.nl);
      if (!nearest || s > best) {
        best = s;
        nearest = other.id;
      }
    };
    for (const auto& p : pool) consider(p);
    for (const auto& p : out.pass) consider(p);
    if (nearest && best >= threshold) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "novelty: ROUGE-L %.4f >= %.4f", best, threshold);
      out.fail.push_back({c, buf, nearest, best});
    } else {
      out.pass.push_back(c);
    }
  }
  return out;
}

void to_json(json& j, const Rejection& r) {
  j = json{{"id", r.pair.id}, {"nl", r.pair.nl}, {"stl", r.pair.stl}, {"reason", r.reason}};
  if (r.nearest_id) {
    j["nearest_id"] = *r.nearest_id;
    j["score"] = r.score;
  }
}

void to_json(json& j, const RoundReport& r) {
  j = json{{"round", r.round},
           {"generated", r.generated},
           {"syntax_rejected", r.syntax_rejected},
           {"novelty_rejected", r.novelty_rejected},
           {"queued", r.queued},
           {"accepted", r.accepted},
           {"dropped_blocks", r.dropped_blocks},
           {"exemplar_ids", r.exemplar_ids},
           {"pool_ids", r.pool_ids},
           {"rejections", r.rejections}};
}

void from_json(const json& j, RoundReport& r) {
  r.round = j.at("round").get<int>();
  r.generated = j.at("generated").get<std::size_t>();
  r.syntax_rejected = j.at("syntax_rejected").get<std::size_t>();
  r.novelty_rejected = j.at("novelty_rejected").get<std::size_t>();
  r.queued = j.at("queued").get<std::size_t>();
  r.accepted = j.value("accepted", std::size_t{0});
  r.dropped_blocks = j.value("dropped_blocks", std::size_t{0});
  r.exemplar_ids = j.value("exemplar_ids", std::vector<std::string>{});
  r.pool_ids = j.value("pool_ids", std::vector<std::string>{});
  r.rejections.clear();
  for (const auto& x : j.value("rejections", json::array())) {
    Rejection rej;
    rej.pair.id = x.at("id").get<std::string>();
    rej.pair.nl = x.value("nl", "");
    rej.pair.stl = x.value("stl", "");
    rej.pair.source = PairSource::Generated;
    rej.pair.status = PairStatus::Rejected;
    rej.pair.round = r.round;
    rej.reason = x.value("reason", "");
    if (x.contains("nearest_id")) {
      rej.nearest_id = x.at("nearest_id").get<std::string>();
      rej.score = x.value("score", 0.0);
    }
    r.rejections.push_back(std::move(rej));
  }
}

void to_json(json& j, const ReviewDecision& d) {
  j = json{{"id", d.id},
           {"verdict", d.verdict == Verdict::Accept ? "accept" : "reject"},
           {"reason", d.reason},
           {"reviewer", d.reviewer}};
}

void from_json(const json& j, ReviewDecision& d) {
  d.id = j.at("id").get<std::string>();
  const auto v = j.at("verdict").get<std::string>();
  if (v == "accept") {
    d.verdict = Verdict::Accept;
  } else if (v == "reject") {
    d.verdict = Verdict::Reject;
  } else {
    throw Error("verdict must be accept or reject, got '" + v + "'");
  }
  d.reason = j.value("reason", "");
  d.reviewer = j.value("reviewer", "cli");
}

DatasetPaths DatasetPaths::in(const std::string& dir) {
  const std::filesystem::path d(dir);
  return {(d / "dataset.jsonl").string(), (d / "queue.jsonl").string(),
          (d / "decisions.jsonl").string(), (d / "rounds.jsonl").string(),
          (d / "knowledge.jsonl").string()};
}

Dataset::Dataset(std::vector<NLSTLPair> pairs, std::vector<NLSTLPair> queue,
                 std::vector<RoundReport> rounds)
    : pairs_(std::move(pairs)), queue_(std::move(queue)), rounds_(std::move(rounds)) {}

Dataset Dataset::from_seeds(std::vector<NLSTLPair> seeds) {
  std::set<std::string> ids;
  for (auto& s : seeds) {
    if (!ids.insert(s.id).second) throw Error("duplicate seed id '" + s.id + "'");
    try {
      canonicalize(s);
    } catch (const Error& e) {
      throw Error("seed '" + s.id + "' does not parse: " + e.what());
    }
    s.status = PairStatus::Seed;
    s.source = PairSource::Handcrafted;
    s.round = 0;
  }
  return Dataset(std::move(seeds));
}

Dataset Dataset::load(const DatasetPaths& paths) {
  namespace fs = std::filesystem;
  Dataset d;
  d.pairs_ = load_pairs(paths.dataset);
  if (fs::exists(paths.queue)) d.queue_ = load_pairs(paths.queue);
  if (fs::exists(paths.rounds)) {
    for (const auto& line : read_lines(paths.rounds)) {
      if (trim(line).empty()) continue;
      d.rounds_.push_back(json::parse(line).get<RoundReport>());
    }
  }
  return d;
}

void Dataset::save(const DatasetPaths& paths) {
  namespace fs = std::filesystem;
  std::string rounds;
  for (const auto& r : rounds_) rounds += json(r).dump() + "\n";
  std::string log = fs::exists(paths.decisions) ? read_file(paths.decisions) : "";
  if (!log.empty() && log.back() != '\n') log += "\n";
  for (const auto& d : new_decisions_) log += json(d).dump() + "\n";

  write_file_atomic(paths.queue, dump_pairs(queue_));
  write_file_atomic(paths.rounds, rounds);
  write_file_atomic(paths.decisions, log);
  pool_store().save(paths.knowledge);
  // The dataset file goes last: it is what marks the directory as updated.
  save_pairs(paths.dataset, pairs_);
  new_decisions_.clear();
}

std::vector<NLSTLPair> Dataset::pool() const {
  std::vector<NLSTLPair> out;
  for (const auto& p : pairs_) {
    if (in_pool(p)) out.push_back(p);
  }
  return out;
}

retrieval::KnowledgeStore Dataset::pool_store() const { return retrieval::KnowledgeStore(pool()); }

RoundReport Dataset::run_round(llm::Backend& backend, const RoundConfig& cfg,
                               const PromptSet& prompts) {
  RoundReport report;
  report.round = next_round();

  const auto store = pool_store();
  const auto exemplars = select_exemplars(store, cfg.exemplars, cfg.seed + report.round);
  for (const auto& e : exemplars) report.exemplar_ids.push_back(e.id);

  const auto gen = generate_candidates(exemplars, backend, cfg.candidates, report.round, prompts,
                                       cfg.requests, cfg.jobs);
  report.generated = gen.candidates.size();
  report.dropped_blocks = gen.dropped;

  auto syntax = filter_syntax(gen.candidates);
  report.syntax_rejected = syntax.fail.size();

  // Pending candidates from earlier rounds count as existing pairs too.
  auto novelty_pool = store.pairs();
  novelty_pool.insert(novelty_pool.end(), queue_.begin(), queue_.end());
  for (const auto& p : novelty_pool) report.pool_ids.push_back(p.id);
  auto novelty = filter_novelty(syntax.pass, novelty_pool, cfg.novelty_threshold);
  report.novelty_rejected = novelty.fail.size();
  report.queued = novelty.pass.size();

  report.rejections = std::move(syntax.fail);
  report.rejections.insert(report.rejections.end(), novelty.fail.begin(), novelty.fail.end());

  queue_.insert(queue_.end(), novelty.pass.begin(), novelty.pass.end());
  rounds_.push_back(report);
  return report;
}

void Dataset::apply_review(const std::vector<ReviewDecision>& decisions) {
  std::set<std::string> seen;
  for (const auto& d : decisions) {
    const bool queued = std::any_of(queue_.begin(), queue_.end(),
                                    [&](const NLSTLPair& p) { return p.id == d.id; });
    if (!queued || !seen.insert(d.id).second) throw UnknownCandidate(d.id);
  }
  for (const auto& d : decisions) {
    auto it = std::find_if(queue_.begin(), queue_.end(),
                           [&](const NLSTLPair& p) { return p.id == d.id; });
    NLSTLPair p = std::move(*it);
    queue_.erase(it);
    p.status = d.verdict == Verdict::Accept ? PairStatus::Accepted : PairStatus::Rejected;
    if (d.verdict == Verdict::Accept) {
      for (auto& r : rounds_) {
        if (r.round == p.round) ++r.accepted;
      }
    }
    pairs_.push_back(std::move(p));
    new_decisions_.push_back(d);
  }
}

}  // namespace stlkit::datagen
