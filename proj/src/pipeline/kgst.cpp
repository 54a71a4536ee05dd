#include "stlkit/kgst.hpp"

#include <sstream>

#include "stlkit/parallel.hpp"
#include "stlkit/parser.hpp"
#include "stlkit/printer.hpp"

namespace stlkit::kgst {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_decoration(std::string s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '`' || s.front() == '$' || s.front() == '*')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '`' || s.back() == '$' || s.back() == '*' || s.back() == '.')) {
    s.pop_back();
  }
  return trim(s);
}

// The line as is, and the part after a "Label:" prefix when there is one.
std::vector<std::string> line_candidates(const std::string& line) {
  std::vector<std::string> out{strip_decoration(line)};
  const auto colon = line.find(':');
  if (colon != std::string::npos) out.push_back(strip_decoration(line.substr(colon + 1)));
  return out;
}

std::optional<std::string> first_valid(const std::vector<std::string>& lines) {
  for (const auto& line : lines) {
    for (const auto& c : line_candidates(line)) {
      if (!c.empty() && stl::check_syntax(c).ok()) return c;
    }
  }
  return std::nullopt;
}

bool valid(const std::string& formula) { return stl::check_syntax(formula).ok(); }

std::string call(llm::Backend& backend, const std::string& stage, const PromptTemplate& tmpl,
                 const std::map<std::string, std::string>& values,
                 std::vector<Exchange>& transcript) {
  llm::ChatRequest req;
  req.system_prompt = tmpl.system;
  req.user_prompt = render(tmpl.user, values);
  req.tag = stage;
  req.temperature = 0.0;
  const auto text = backend.complete(req).text;
  transcript.push_back({stage, req.system_prompt, req.user_prompt, text});
  return text;
}

Refinement validate_or_fallback(const std::string& response, const std::string& input) {
  if (auto f = extract_formula(response)) return {*f, false};
  return {input, true};
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Kgst: return "kgst";
    case Mode::NoFinetune: return "no-finetune";
    case Mode::NoRefine: return "no-refine";
    case Mode::SelfRefine: return "self-refine";
  }
  return "kgst";
}

Mode parse_mode(const std::string& text) {
  for (auto m : {Mode::Kgst, Mode::NoFinetune, Mode::NoRefine, Mode::SelfRefine}) {
    if (to_string(m) == text) return m;
  }
  throw Error("unknown mode '" + text + "' (kgst, no-finetune, no-refine, self-refine)");
}

AllRetriesInvalid::AllRetriesInvalid(std::string last_output, std::vector<Exchange> transcript)
    : Error("no valid formula after " + std::to_string(transcript.size()) + " generation attempts"),
      last_output_(std::move(last_output)),
      transcript_(std::move(transcript)) {}

TransformError::TransformError(const std::string& what, bool backend,
                               std::vector<Exchange> transcript)
    : Error(what), backend_(backend), transcript_(std::move(transcript)) {}

std::optional<std::string> extract_formula(const std::string& text) {
  std::vector<std::string> fenced, plain;
  bool in_fence = false;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (trim(line).rfind("```", 0) == 0) {
      in_fence = !in_fence;
      continue;
    }
    (in_fence ? fenced : plain).push_back(line);
  }
  if (auto f = first_valid(fenced)) return f;
  return first_valid(plain);
}

std::string generate_preliminary(const std::string& nl, llm::Backend& generator,
                                 std::vector<Exchange>& transcript, const PromptSet& prompts,
                                 std::size_t attempts) {
  const auto& tmpl = prompts.get("generate");
  std::vector<Exchange> own;
  std::string last;
  for (std::size_t i = 0; i < std::max<std::size_t>(attempts, 1); ++i) {
    last = call(generator, "generate", tmpl, {{"nl", nl}}, own);
    transcript.push_back(own.back());
    if (auto f = extract_formula(last)) return *f;
  }
  throw AllRetriesInvalid(last, std::move(own));
}

std::vector<retrieval::ScoredPair> retrieve_references(const std::string& nl,
                                                       const retrieval::KnowledgeStore& store,
                                                       std::size_t k) {
  if (k == 0 || store.size() == 0) return {};
  return store.top_k(nl, k);
}

std::string format_references(const std::vector<retrieval::ScoredPair>& refs) {
  std::string out;
  for (const auto& r : refs) {
    if (!out.empty()) out += "\n";
    out += "NL: " + r.pair.nl + "\nSTL: " + r.pair.stl + "\n";
  }
  return out.empty() ? "(none)\n" : out;
}

Refinement refine(const std::string& nl, const std::string& preliminary,
                  const std::vector<retrieval::ScoredPair>& references, llm::Backend& refiner,
                  std::vector<Exchange>& transcript, const PromptSet& prompts) {
  const auto text = call(refiner, "refine", prompts.get("refine"),
                         {{"nl", nl},
                          {"preliminary", preliminary},
                          {"references", format_references(references)}},
                         transcript);
  return validate_or_fallback(text, preliminary);
}

Refinement self_refine(const std::string& nl, const std::string& preliminary,
                       llm::Backend& backend, std::vector<Exchange>& transcript,
                       const PromptSet& prompts) {
  const auto feedback = call(backend, "feedback", prompts.get("feedback"),
                             {{"nl", nl}, {"preliminary", preliminary}}, transcript);
  const auto text =
      call(backend, "self_refine", prompts.get("self_refine"),
           {{"nl", nl}, {"preliminary", preliminary}, {"feedback", trim(feedback)}}, transcript);
  return validate_or_fallback(text, preliminary);
}

TransformResult transform(const TransformRequest& req, llm::Backend& generator,
                          llm::Backend& refiner, const retrieval::KnowledgeStore& store,
                          const PromptSet& prompts) {
  TransformResult r;
  try {
    if (req.mode == Mode::NoFinetune) {
      r.references = retrieve_references(req.nl, store, req.k);
      const auto text = call(refiner, "in_context", prompts.get("in_context"),
                             {{"nl", req.nl}, {"references", format_references(r.references)}},
                             r.transcript);
      const auto f = extract_formula(text);
      r.preliminary = f.value_or(trim(text));
      r.preliminary_valid = f.has_value();
      r.refined = r.preliminary;
    } else {
      try {
        r.preliminary = generate_preliminary(req.nl, generator, r.transcript, prompts);
      } catch (const AllRetriesInvalid& e) {
        r.preliminary = trim(e.last_output());
        r.preliminary_valid = false;
      }
      r.refined = r.preliminary;
      if (req.mode == Mode::Kgst) r.references = retrieve_references(req.nl, store, req.k);
      if (req.mode == Mode::Kgst || req.mode == Mode::SelfRefine) {
        for (std::size_t i = 0; i < req.iterations; ++i) {
          const auto step =
              req.mode == Mode::Kgst
                  ? refine(req.nl, r.refined, r.references, refiner, r.transcript, prompts)
                  : self_refine(req.nl, r.refined, refiner, r.transcript, prompts);
          r.refined = step.formula;
          r.fallback_used = r.fallback_used || step.fallback;
        }
      }
    }
  } catch (const llm::BackendError& e) {
    throw TransformError(std::string("backend failure: ") + e.what(), true, r.transcript);
  }
  if (!valid(r.refined)) {
    throw TransformError("no valid formula for '" + req.nl + "'", false, r.transcript);
  }
  r.final = stl::parse(r.refined);
  return r;
}

void to_json(json& j, const Exchange& e) {
  j = json{{"stage", e.stage},
           {"system", e.system_prompt},
           {"user", e.user_prompt},
           {"response", e.response}};
}

json result_json(const TransformResult& r, bool include_transcript) {
  json refs = json::array();
  for (const auto& s : r.references) {
    refs.push_back({{"id", s.pair.id}, {"nl", s.pair.nl}, {"stl", s.pair.stl}, {"score", s.score}});
  }
  json j{{"preliminary", r.preliminary},
         {"preliminary_valid", r.preliminary_valid},
         {"references", refs},
         {"refined", r.refined},
         {"final", stl::format(r.final)},
         {"fallback_used", r.fallback_used}};
  if (include_transcript) j["transcript"] = r.transcript;
  return j;
}

BenchReport bench(const std::vector<NLSTLPair>& dataset, const BenchOptions& opts,
                  llm::Backend& generator, llm::Backend& refiner,
                  const retrieval::KnowledgeStore& store, const PromptSet& prompts) {
  BenchReport report;
  report.options = opts;
  report.records = parallel_map(dataset.size(), opts.jobs, [&](std::size_t i) {
    const auto& pair = dataset[i];
    BenchRecord rec{pair.id, pair.nl, pair.stl, "", false, std::nullopt};
    try {
      const auto result = transform({pair.nl, opts.k, opts.iterations, opts.mode}, generator,
                                    refiner, store, prompts);
      rec.prediction = stl::format(result.final);
      rec.fallback_used = result.fallback_used;
    } catch (const Error& e) {
      rec.error = e.what();
    }
    return rec;
  });
  std::vector<std::string> refs, preds;
  for (const auto& r : report.records) {
    refs.push_back(r.reference);
    preds.push_back(r.prediction);
  }
  report.eval = metrics::score_corpus(refs, preds);
  return report;
}

json bench_json(const BenchReport& report) {
  const auto& ev = report.eval;
  json pairs = json::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = report.records[i];
    const auto& score = ev.pairs[i];
    json p{{"id", rec.id},
           {"reference", rec.reference},
           {"prediction", rec.prediction},
           {"formula_accuracy", score.formula_accuracy},
           {"template_accuracy", score.template_accuracy},
           {"fallback_used", rec.fallback_used},
           {"diagnostics", score.diagnostics},
           {"buckets",
            {{"operator_token", score.buckets.operator_token},
             {"numeric_token", score.buckets.numeric_token},
             {"parse_failure", score.buckets.parse_failure},
             {"template_mismatch", score.buckets.template_mismatch}}}};
    if (rec.error) p["error"] = *rec.error;
    pairs.push_back(std::move(p));
  }
  return json{{"mode", to_string(report.options.mode)},
              {"k", report.options.k},
              {"iterations", report.options.iterations},
              {"pairs_evaluated", report.records.size()},
              {"formula_accuracy", ev.formula_accuracy},
              {"template_accuracy", ev.template_accuracy},
              {"bleu", ev.bleu},
              {"error_buckets",
               {{"operator_token", ev.buckets.operator_token},
                {"numeric_token", ev.buckets.numeric_token},
                {"parse_failure", ev.buckets.parse_failure},
                {"template_mismatch", ev.buckets.template_mismatch}}},
              {"pairs", pairs}};
}

}  // namespace stlkit::kgst
