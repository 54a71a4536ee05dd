// Command-line front end. Exit codes: 0 ok, 1 domain failure, 2 usage,
// 3 backend or I/O failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "settings.hpp"
#include "stlkit/analysis.hpp"
#include "stlkit/datagen.hpp"
#include "stlkit/io.hpp"
#include "stlkit/kgst.hpp"
#include "stlkit/metrics.hpp"
#include "stlkit/parser.hpp"
#include "stlkit/printer.hpp"
#include "stlkit/semantics.hpp"
#include "stlkit/stats.hpp"
#include "stlkit/store.hpp"
#include "stlkit/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stlkit;

namespace {

enum Exit { kOk = 0, kDomain = 1, kUsage = 2, kBackend = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Global {
  bool json_out = false;
  std::uint64_t seed = 42;
  std::size_t jobs = 4;
  std::string config;
  std::string prompts_dir;
  std::map<std::string, std::string> backend_flags;  // filled from --backend, --script, ...
};

Global g;

cli::Settings settings() {
  cli::Settings s;
  if (!g.config.empty()) s.set_file(cli::Settings::parse_file_text(read_file(g.config)));
  for (const auto& [k, v] : g.backend_flags) {
    if (!v.empty()) s.set_flag(k, v);
  }
  return s;
}

PromptSet prompt_set() {
  if (!g.prompts_dir.empty()) return PromptSet::from_directory(g.prompts_dir);
  if (auto dir = settings().get("prompts")) return PromptSet::from_directory(*dir);
  return {};
}

/// One backend instance per distinct configuration, so a single script file
/// can serve several roles.
class Backends {
 public:
  llm::Backend& get(const std::string& role) {
    const auto cfg = settings().backend(role);
    const std::string key = cfg.kind == llm::BackendKind::Scripted
                                ? "scripted:" + cfg.script_path
                                : "http:" + cfg.endpoint + "|" + cfg.model;
    auto& slot = cache_[key];
    if (!slot) slot = llm::make_backend(cfg);
    return *slot;
  }

 private:
  std::map<std::string, std::shared_ptr<llm::Backend>> cache_;
};

void add_backend_flags(CLI::App* cmd) {
  for (const char* key : {"backend", "script", "endpoint", "model", "credential_env"}) {
    const std::string flag = std::string("--") + key;
    std::string name = flag;
    for (auto& c : name) c = c == '_' ? '-' : c;
    cmd->add_option(name, g.backend_flags[key],
                    std::string("backend setting '") + key + "' for every role");
  }
  for (const char* role : {"generator", "refiner"}) {
    for (const char* key : {"backend", "script", "model"}) {
      const std::string k = std::string(role) + "." + key;
      cmd->add_option("--" + std::string(role) + "-" + key, g.backend_flags[k],
                      std::string(key) + " for the " + role);
    }
  }
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

bool blank_or_comment(const std::string& line) {
  const auto b = line.find_first_not_of(" \t");
  return b == std::string::npos || line[b] == '#';
}

std::vector<NLSTLPair> load_pairs_arg(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file '" + path + "'");
  return load_pairs(path);
}

retrieval::KnowledgeStore load_store(const std::string& path) {
  if (path.empty()) return retrieval::KnowledgeStore();
  if (!fs::exists(path)) throw IoError("no such file '" + path + "'");
  return retrieval::KnowledgeStore::load(path);
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::vector<std::string> exprs;
  std::vector<std::string> files;
};

int cmd_check(const CheckArgs& a) {
  if (a.exprs.empty() && a.files.empty()) throw UsageError("give -e EXPR or at least one file");
  struct Item {
    std::string origin;
    std::string text;
  };
  std::vector<Item> items;
  for (const auto& e : a.exprs) items.push_back({"", e});
  for (const auto& f : a.files) {
    const auto lines = f == "-" ? [] {
      std::vector<std::string> out;
      for (std::string l; std::getline(std::cin, l);) out.push_back(l);
      return out;
    }()
                                : read_lines(f);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (blank_or_comment(lines[i])) continue;
      items.push_back({f + ":" + std::to_string(i + 1), lines[i]});
    }
  }
  std::size_t bad = 0;
  json results = json::array();
  for (const auto& it : items) {
    const auto report = stl::check_syntax(it.text);
    json diags = json::array();
    for (const auto& d : report.diagnostics) {
      const std::string where =
          it.origin.empty() ? stl::describe(d, it.text) : it.origin + ":" + std::to_string(d.span.begin + 1) + ": " + d.message;
      diags.push_back(where);
      if (!g.json_out) std::cout << where << "\n";
    }
    if (!report.ok()) ++bad;
    results.push_back({{"input", it.text}, {"ok", report.ok()}, {"diagnostics", diags}});
  }
  if (g.json_out) {
    print_json({{"results", results}, {"invalid", bad}});
  } else if (bad == 0) {
    std::cout << "Ok\n";
  } else {
    std::cout << bad << " of " << items.size() << " invalid\n";
  }
  return bad == 0 ? kOk : kDomain;
}

// ---------------------------------------------------------------- format / template

int cmd_format(const std::vector<std::string>& exprs, bool as_template) {
  if (exprs.empty()) throw UsageError("give at least one -e EXPR");
  json out = json::array();
  for (const auto& e : exprs) {
    const auto f = stl::parse(e);
    const auto text = as_template ? stl::format(stl::extract_template(f)) : stl::format(f);
    if (g.json_out) {
      out.push_back({{"input", e}, {as_template ? "template" : "formula", text}});
    } else {
      std::cout << text << "\n";
    }
  }
  if (g.json_out) print_json(out);
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string expr;
  std::string trace;
  std::optional<double> at;
  bool strict = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto f = stl::parse(a.expr);
  if (!fs::exists(a.trace)) throw IoError("no such trace '" + a.trace + "'");
  const auto trace = stl::load_trace_csv(a.trace);
  stl::EvalOptions opts;
  opts.horizon_policy = a.strict ? stl::HorizonPolicy::Strict : stl::HorizonPolicy::Clip;
  if (a.at) {
    const bool v = stl::evaluate(f, trace, *a.at, opts);
    if (g.json_out) {
      print_json({{"formula", stl::format(f)}, {"t", *a.at}, {"value", v}});
    } else {
      std::cout << (v ? "true" : "false") << "\n";
    }
    return kOk;
  }
  const auto verdicts = stl::evaluate_windowed(f, trace, opts);
  const auto ts = trace.timestamps();
  json rows = json::array();
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (g.json_out) {
      rows.push_back({{"t", ts[i]}, {"value", verdicts[i] ? json(*verdicts[i]) : json(nullptr)}});
    } else {
      std::cout << stl::format_number(ts[i]) << "\t"
                << (verdicts[i] ? (*verdicts[i] ? "true" : "false") : "undefined") << "\n";
    }
  }
  if (g.json_out) print_json({{"formula", stl::format(f)}, {"verdicts", rows}});
  return kOk;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string refs;
  std::string preds;
  std::string report;
};

std::vector<std::string> reference_formulas(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file '" + path + "'");
  if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") {
    std::vector<std::string> out;
    for (const auto& p : load_pairs(path)) out.push_back(p.stl);
    return out;
  }
  return read_lines(path);
}

json eval_json(const metrics::EvalReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"formula_accuracy", p.formula_accuracy},
                     {"template_accuracy", p.template_accuracy},
                     {"diagnostics", p.diagnostics}});
  }
  return {{"pairs_evaluated", r.pairs.size()},
          {"formula_accuracy", r.formula_accuracy},
          {"template_accuracy", r.template_accuracy},
          {"bleu", r.bleu},
          {"error_buckets",
           {{"operator_token", r.buckets.operator_token},
            {"numeric_token", r.buckets.numeric_token},
            {"parse_failure", r.buckets.parse_failure},
            {"template_mismatch", r.buckets.template_mismatch}}},
          {"pairs", pairs}};
}

void print_score_table(const std::string& label, double af, double at, double bleu,
                       const metrics::ErrorBuckets& b, std::size_t n) {
  std::cout << "| " << std::left << std::setw(12) << "method" << " | A_F    | A_T    | BLEU   |\n"
            << "|--------------|--------|--------|--------|\n"
            << "| " << std::setw(12) << label << " | " << fmt(af) << " | " << fmt(at) << " | "
            << fmt(bleu) << " |\n"
            << std::right << "pairs " << n << "; errors: operator-token " << b.operator_token
            << ", numeric-token " << b.numeric_token << ", parse-failure " << b.parse_failure
            << ", template-mismatch " << b.template_mismatch << "\n";
}

int cmd_metrics(const MetricsArgs& a) {
  const auto refs = reference_formulas(a.refs);
  if (!fs::exists(a.preds)) throw IoError("no such file '" + a.preds + "'");
  const auto preds = read_lines(a.preds);
  if (refs.size() != preds.size() || refs.empty()) {
    throw UsageError("references (" + std::to_string(refs.size()) + ") and predictions (" +
                     std::to_string(preds.size()) + ") must be non-empty and of equal length");
  }
  const auto report = metrics::score_corpus(refs, preds);
  const auto j = eval_json(report);
  if (!a.report.empty()) write_file_atomic(a.report, j.dump(2) + "\n");
  if (g.json_out) {
    print_json(j);
  } else {
    print_score_table("predictions", report.formula_accuracy, report.template_accuracy, report.bleu,
                      report.buckets, report.pairs.size());
  }
  return kOk;
}

// ---------------------------------------------------------------- dataset

struct DatasetArgs {
  std::string dir = "stl-dataset";
  std::string seeds;
  bool force = false;
  std::size_t exemplars = 5;
  std::size_t candidates = 10;
  std::size_t requests = 1;
  double threshold = 0.5;
  bool accept_all = false;
  bool reject_all = false;
  std::string decisions;
  std::string reviewer = "cli";
  std::size_t k = 5;
  std::string report;
};

datagen::DatasetPaths paths_of(const DatasetArgs& a) {
  const auto p = datagen::DatasetPaths::in(a.dir);
  if (!fs::exists(p.dataset)) {
    throw IoError("no dataset in '" + a.dir + "' (run `stlkit dataset init` first)");
  }
  return p;
}

int cmd_dataset_init(const DatasetArgs& a) {
  if (a.seeds.empty()) throw UsageError("--seeds is required");
  const auto p = datagen::DatasetPaths::in(a.dir);
  if (fs::exists(p.dataset) && !a.force) {
    throw UsageError("'" + p.dataset + "' exists; pass --force to overwrite");
  }
  auto ds = datagen::Dataset::from_seeds(load_pairs_arg(a.seeds));
  fs::create_directories(a.dir);
  ds.save(p);
  if (g.json_out) {
    print_json({{"dir", a.dir}, {"pairs", ds.pairs().size()}});
  } else {
    std::cout << "initialized " << a.dir << " with " << ds.pairs().size() << " seed pairs\n";
  }
  return kOk;
}

void print_round(const datagen::RoundReport& r) {
  std::cout << "round " << r.round << ": generated " << r.generated << ", syntax-rejected "
            << r.syntax_rejected << ", novelty-rejected " << r.novelty_rejected << ", queued "
            << r.queued << " (malformed blocks " << r.dropped_blocks << ")\n";
  std::cout << "exemplars:";
  for (const auto& id : r.exemplar_ids) std::cout << " " << id;
  std::cout << "\n";
  for (const auto& rej : r.rejections) std::cout << "  " << rej.pair.id << ": " << rej.reason << "\n";
}

int cmd_dataset_round(const DatasetArgs& a) {
  const auto p = paths_of(a);
  auto ds = datagen::Dataset::load(p);
  Backends backends;
  datagen::RoundConfig cfg;
  cfg.exemplars = a.exemplars;
  cfg.candidates = a.candidates;
  cfg.requests = a.requests;
  cfg.jobs = g.jobs;
  cfg.seed = g.seed;
  cfg.novelty_threshold = a.threshold;
  const auto report = ds.run_round(backends.get("datagen"), cfg, prompt_set());
  ds.save(p);
  if (g.json_out) {
    print_json(report);
  } else {
    print_round(report);
  }
  return kOk;
}

// The four points a reviewer confirms before accepting a pair.
const char* const kReviewChecks[] = {
    "operators: the temporal and logical operators match the sentence",
    "values: numbers, thresholds and time bounds match the sentence",
    "syntax: the formula is well formed",
    "semantics: the formula as a whole says what the sentence says",
};

int cmd_dataset_review(const DatasetArgs& a) {
  const auto p = paths_of(a);
  auto ds = datagen::Dataset::load(p);
  std::vector<datagen::ReviewDecision> decisions;
  if (a.accept_all + a.reject_all + !a.decisions.empty() > 1) {
    throw UsageError("choose one of --accept-all, --reject-all and --decisions");
  }
  if (a.accept_all || a.reject_all) {
    for (const auto& q : ds.queue()) {
      decisions.push_back({q.id, a.accept_all ? datagen::Verdict::Accept : datagen::Verdict::Reject,
                           "bulk", a.reviewer});
    }
  } else if (!a.decisions.empty()) {
    for (const auto& line : read_lines(a.decisions)) {
      if (blank_or_comment(line)) continue;
      auto d = json::parse(line).get<datagen::ReviewDecision>();
      if (!json::parse(line).contains("reviewer")) d.reviewer = a.reviewer;
      decisions.push_back(std::move(d));
    }
  } else {
    const auto pool = ds.pool();
    std::size_t n = 0;
    for (const auto& q : ds.queue()) {
      ++n;
      std::cout << "\n[" << n << "/" << ds.queue().size() << "] " << q.id << "\n"
                << "  NL : " << q.nl << "\n"
                << "  STL: " << q.stl << "\n"
                << "  syntax check: " << (stl::check_syntax(q.stl).ok() ? "Ok" : "FAILED") << "\n";
      double best = 0;
      std::string nearest;
      for (const auto& other : pool) {
        const double s = metrics::rouge_l(q.nl, other.nl);
        if (s > best) {
          best = s;
          nearest = other.id;
        }
      }
      if (!nearest.empty()) std::cout << "  closest pool pair: " << nearest << " (ROUGE-L " << fmt(best, 3) << ")\n";
      std::cout << "  confirm before accepting:\n";
      for (const char* c : kReviewChecks) std::cout << "    - " << c << "\n";
      std::cout << "  [a]ccept, [r]eject, [s]kip, [q]uit > " << std::flush;
      std::string answer;
      if (!std::getline(std::cin, answer) || answer.empty() || answer[0] == 'q') break;
      if (answer[0] == 'a') {
        decisions.push_back({q.id, datagen::Verdict::Accept, "", a.reviewer});
      } else if (answer[0] == 'r') {
        std::cout << "  reason (optional) > " << std::flush;
        std::string reason;
        std::getline(std::cin, reason);
        decisions.push_back({q.id, datagen::Verdict::Reject, reason, a.reviewer});
      }
    }
    std::cout << "\n";
  }
  ds.apply_review(decisions);
  ds.save(p);
  std::size_t accepted = 0;
  for (const auto& d : decisions) accepted += d.verdict == datagen::Verdict::Accept ? 1 : 0;
  if (g.json_out) {
    print_json({{"accepted", accepted},
                {"rejected", decisions.size() - accepted},
                {"queue", ds.queue().size()},
                {"pairs", ds.pairs().size()}});
  } else {
    std::cout << "accepted " << accepted << ", rejected " << decisions.size() - accepted << ", "
              << ds.queue().size() << " left in queue, " << ds.pool().size() << " pairs in pool\n";
  }
  return kOk;
}

int print_stats(const std::vector<NLSTLPair>& pairs, const std::string& name,
                const std::string& report) {
  const auto s = stats::compute_stats(pairs);
  const auto j = stats::to_json(s);
  if (!report.empty()) write_file_atomic(report, j.dump(2) + "\n");
  if (g.json_out) {
    print_json(j);
  } else {
    std::cout << stats::render_table(s, name);
  }
  return kOk;
}

int cmd_dataset_stats(const DatasetArgs& a) {
  const auto ds = datagen::Dataset::load(paths_of(a));
  return print_stats(ds.pool(), fs::path(a.dir).filename().string(), a.report);
}

int cmd_dataset_cluster(const DatasetArgs& a) {
  const auto ds = datagen::Dataset::load(paths_of(a));
  const auto store = ds.pool_store();
  const auto c = retrieval::kmeans(store, a.k, g.seed);
  const auto pairs = store.pairs();
  if (g.json_out) {
    json clusters = json::array();
    for (std::size_t i = 0; i < c.k; ++i) {
      json members = json::array();
      for (std::size_t j = 0; j < c.assignments.size(); ++j) {
        if (c.assignments[j] == i) members.push_back(pairs[j].id);
      }
      clusters.push_back({{"exemplar", c.exemplar_ids[i]}, {"members", members}});
    }
    print_json({{"k", c.k}, {"iterations", c.iterations}, {"clusters", clusters}});
  } else {
    for (std::size_t i = 0; i < c.k; ++i) {
      std::cout << c.exemplar_ids[i] << "\t" << pairs[c.exemplar_indices[i]].nl << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- retrieve

struct RetrieveArgs {
  std::string knowledge;
  std::string nl;
  std::size_t k = 5;
};

int cmd_retrieve(const RetrieveArgs& a) {
  const auto store = load_store(a.knowledge);
  const auto refs = kgst::retrieve_references(a.nl, store, a.k);
  if (g.json_out) {
    json out = json::array();
    for (const auto& r : refs) {
      out.push_back({{"id", r.pair.id}, {"score", r.score}, {"nl", r.pair.nl}, {"stl", r.pair.stl}});
    }
    print_json(out);
  } else {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      std::cout << i + 1 << "\t" << fmt(refs[i].score) << "\t" << refs[i].pair.id << "\t"
                << refs[i].pair.nl << "\t" << refs[i].pair.stl << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- transform / bench

struct TransformArgs {
  std::string nl;
  std::string batch;
  std::string knowledge;
  std::string mode = "kgst";
  std::size_t k = 5;
  std::size_t iterations = 1;
  bool verbose = false;
  bool no_transcript = false;
  std::string dataset;
  std::string report;
};

void dump_transcript(const std::vector<kgst::Exchange>& t) {
  for (const auto& e : t) {
    std::cerr << "=== " << e.stage << " ===\n--- system\n" << e.system_prompt << "\n--- user\n"
              << e.user_prompt << "\n--- response\n" << e.response << "\n";
  }
}

std::vector<std::string> batch_sentences(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& line : read_lines(path)) {
    if (blank_or_comment(line)) continue;
    const auto b = line.find_first_not_of(" \t");
    if (line[b] == '{') {
      out.push_back(json::parse(line).at("nl").get<std::string>());
    } else {
      out.push_back(line.substr(b));
    }
  }
  return out;
}

int cmd_transform(const TransformArgs& a) {
  if (a.nl.empty() == a.batch.empty()) throw UsageError("give exactly one of --nl and --batch");
  const auto mode = kgst::parse_mode(a.mode);
  const auto store = load_store(a.knowledge);
  const auto prompts = prompt_set();
  Backends backends;
  auto& generator = backends.get(mode == kgst::Mode::NoFinetune ? "refiner" : "generator");
  auto& refiner = mode == kgst::Mode::NoRefine ? generator : backends.get("refiner");

  if (!a.nl.empty()) {
    try {
      const auto r = kgst::transform({a.nl, a.k, a.iterations, mode}, generator, refiner, store, prompts);
      if (a.verbose) dump_transcript(r.transcript);
      if (g.json_out) {
        auto j = kgst::result_json(r, !a.no_transcript);
        j["nl"] = a.nl;
        print_json(j);
      } else {
        std::cout << stl::format(r.final) << "\n";
      }
      return kOk;
    } catch (const kgst::TransformError& e) {
      if (a.verbose) dump_transcript(e.transcript());
      throw;
    }
  }

  int status = kOk;
  for (const auto& nl : batch_sentences(a.batch)) {
    json line;
    try {
      const auto r = kgst::transform({nl, a.k, a.iterations, mode}, generator, refiner, store, prompts);
      line = kgst::result_json(r, !a.no_transcript);
    } catch (const kgst::TransformError& e) {
      line = {{"error", e.what()}};
      if (!a.no_transcript) line["transcript"] = e.transcript();
      status = std::max(status, e.backend() ? int{kBackend} : int{kDomain});
    }
    line["nl"] = nl;
    std::cout << line.dump() << "\n";
  }
  return status;
}

int cmd_bench(const TransformArgs& a) {
  const auto data = load_pairs_arg(a.dataset);
  const auto store = load_store(a.knowledge);
  kgst::BenchOptions opts;
  opts.mode = kgst::parse_mode(a.mode);
  opts.k = a.k;
  opts.iterations = a.iterations;
  opts.jobs = g.jobs;
  Backends backends;
  auto& generator = backends.get(opts.mode == kgst::Mode::NoFinetune ? "refiner" : "generator");
  auto& refiner = opts.mode == kgst::Mode::NoRefine ? generator : backends.get("refiner");
  const auto report = kgst::bench(data, opts, generator, refiner, store, prompt_set());
  const auto j = kgst::bench_json(report);
  if (!a.report.empty()) write_file_atomic(a.report, j.dump(2) + "\n");
  if (g.json_out) {
    print_json(j);
  } else {
    print_score_table(kgst::to_string(opts.mode), report.eval.formula_accuracy,
                      report.eval.template_accuracy, report.eval.bleu, report.eval.buckets,
                      report.records.size());
    std::size_t failed = 0;
    for (const auto& r : report.records) failed += r.error ? 1 : 0;
    if (failed > 0) std::cout << failed << " pair(s) without a valid formula\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stlkit: Signal Temporal Logic toolkit for NL-to-STL datasets and translation"};
  app.require_subcommand(1);
  app.add_flag("--json", g.json_out, "machine-readable output");
  app.add_option("--seed", g.seed, "random seed for clustering and exemplar selection")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "maximum concurrent backend calls")->capture_default_str();
  app.add_option("--config", g.config, "key = value settings file");
  app.add_option("--prompts", g.prompts_dir, "directory with prompt template overrides");

  std::function<int()> run;

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "syntax-check formulas");
  c_check->add_option("-e,--expr", check.exprs, "formula text (repeatable)");
  c_check->add_option("files", check.files, "files with one formula per line ('-' for stdin)");
  c_check->callback([&] { run = [&] { return cmd_check(check); }; });

  std::vector<std::string> fmt_exprs;
  auto* c_format = app.add_subcommand("format", "print formulas in canonical form");
  c_format->add_option("-e,--expr", fmt_exprs, "formula text (repeatable)")->required();
  c_format->callback([&] { run = [&] { return cmd_format(fmt_exprs, false); }; });
  auto* c_template = app.add_subcommand("template", "print the template of formulas");
  c_template->add_option("-e,--expr", fmt_exprs, "formula text (repeatable)")->required();
  c_template->callback([&] { run = [&] { return cmd_format(fmt_exprs, true); }; });

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "evaluate a formula on a CSV trace");
  c_eval->add_option("-e,--expr", ev.expr, "formula text")->required();
  c_eval->add_option("--trace", ev.trace, "CSV trace: time column then one column per signal")
      ->required();
  c_eval->add_option("--at", ev.at, "single timestamp; omit for every timestamp");
  c_eval->add_flag("--strict", ev.strict, "fail when a window reaches past the trace end");
  c_eval->callback([&] { run = [&] { return cmd_eval(ev); }; });

  MetricsArgs mx;
  auto* c_metrics = app.add_subcommand("metrics", "score predictions against references");
  c_metrics->add_option("--refs", mx.refs, "pairs JSON Lines or one formula per line")->required();
  c_metrics->add_option("--preds", mx.preds, "one predicted formula per line")->required();
  c_metrics->add_option("--report", mx.report, "write a JSON report here");
  c_metrics->callback([&] { run = [&] { return cmd_metrics(mx); }; });

  DatasetArgs ds;
  auto* c_dataset = app.add_subcommand("dataset", "build a dataset in rounds");
  c_dataset->require_subcommand(1);
  auto dir_opt = [&](CLI::App* cmd) {
    cmd->add_option("--dir", ds.dir, "dataset directory")->capture_default_str();
  };
  auto* d_init = c_dataset->add_subcommand("init", "create a dataset from seed pairs");
  dir_opt(d_init);
  d_init->add_option("--seeds", ds.seeds, "seed pairs (JSON Lines)")->required();
  d_init->add_flag("--force", ds.force, "overwrite an existing dataset");
  d_init->callback([&] { run = [&] { return cmd_dataset_init(ds); }; });

  auto* d_round = c_dataset->add_subcommand("round", "generate and filter one round of candidates");
  dir_opt(d_round);
  d_round->add_option("--exemplars", ds.exemplars, "exemplars per prompt")->capture_default_str();
  d_round->add_option("--candidates", ds.candidates, "pairs requested per round")->capture_default_str();
  d_round->add_option("--requests", ds.requests, "backend requests per round")->capture_default_str();
  d_round->add_option("--novelty-threshold", ds.threshold, "ROUGE-L rejection threshold")
      ->capture_default_str();
  add_backend_flags(d_round);
  d_round->callback([&] { run = [&] { return cmd_dataset_round(ds); }; });

  auto* d_review = c_dataset->add_subcommand("review", "accept or reject queued candidates");
  dir_opt(d_review);
  d_review->add_flag("--accept-all", ds.accept_all, "accept the whole queue");
  d_review->add_flag("--reject-all", ds.reject_all, "reject the whole queue");
  d_review->add_option("--decisions", ds.decisions, "JSON Lines of {id, verdict, reason}");
  d_review->add_option("--reviewer", ds.reviewer, "name stored with each decision")
      ->capture_default_str();
  d_review->callback([&] { run = [&] { return cmd_dataset_review(ds); }; });

  auto* d_stats = c_dataset->add_subcommand("stats", "statistics of the current pool");
  dir_opt(d_stats);
  d_stats->add_option("--report", ds.report, "write a JSON report here");
  d_stats->callback([&] { run = [&] { return cmd_dataset_stats(ds); }; });

  auto* d_cluster = c_dataset->add_subcommand("cluster", "k-means exemplars of the pool");
  dir_opt(d_cluster);
  d_cluster->add_option("-k", ds.k, "number of clusters")->capture_default_str();
  d_cluster->callback([&] { run = [&] { return cmd_dataset_cluster(ds); }; });

  RetrieveArgs rt;
  auto* c_retrieve = app.add_subcommand("retrieve", "nearest pairs for a sentence");
  c_retrieve->add_option("--knowledge", rt.knowledge, "pairs JSON Lines")->required();
  c_retrieve->add_option("--nl", rt.nl, "query sentence")->required();
  c_retrieve->add_option("-k", rt.k, "number of results")->capture_default_str();
  c_retrieve->callback([&] { run = [&] { return cmd_retrieve(rt); }; });

  TransformArgs tr;
  auto mode_opts = [&](CLI::App* cmd) {
    cmd->add_option("--knowledge", tr.knowledge, "reference pairs JSON Lines");
    cmd->add_option("--mode", tr.mode, "kgst, no-finetune, no-refine or self-refine")
        ->capture_default_str();
    cmd->add_option("-k", tr.k, "references per sentence")->capture_default_str();
    cmd->add_option("--iterations", tr.iterations, "refinement passes")->capture_default_str();
    add_backend_flags(cmd);
  };
  auto* c_transform = app.add_subcommand("transform", "translate sentences into formulas");
  c_transform->add_option("--nl", tr.nl, "sentence to translate");
  c_transform->add_option("--batch", tr.batch, "file of sentences, plain or JSON Lines with nl");
  c_transform->add_flag("--verbose", tr.verbose, "write every backend exchange to stderr");
  c_transform->add_flag("--no-transcript", tr.no_transcript, "leave transcripts out of JSON output");
  mode_opts(c_transform);
  c_transform->callback([&] { run = [&] { return cmd_transform(tr); }; });

  auto* c_bench = app.add_subcommand("bench", "translate and score a labelled split");
  c_bench->add_option("--dataset", tr.dataset, "pairs JSON Lines")->required();
  c_bench->add_option("--report", tr.report, "write a JSON report here");
  mode_opts(c_bench);
  c_bench->callback([&] { run = [&] { return cmd_bench(tr); }; });

  std::string stats_file, stats_report;
  auto* c_stats = app.add_subcommand("stats", "corpus statistics of a pairs file");
  c_stats->add_option("pairs", stats_file, "pairs JSON Lines")->required();
  c_stats->add_option("--report", stats_report, "write a JSON report here");
  c_stats->callback([&] {
    run = [&] {
      return print_stats(load_pairs_arg(stats_file), fs::path(stats_file).stem().string(), stats_report);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const metrics::LengthMismatch& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const llm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const kgst::TransformError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.backend() ? kBackend : kDomain;
  } catch (const llm::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kBackend;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
}
