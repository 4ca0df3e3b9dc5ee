#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/llm/client.hpp"
#include "scopt/llm/prompts.hpp"
#include "scopt/pipeline/metrics.hpp"
#include "scopt/pipeline/splice.hpp"
#include "scopt/retrieval/index.hpp"
#include "scopt/util/parallel.hpp"
#include "scopt/util/rng.hpp"
#include "scopt/verify/verifier.hpp"

namespace scopt {

struct PipelineConfig {
  int k = 7;  // candidates per round
  RetrievalConfig retrieval;
  std::uint64_t seed = 0;
  int jobs = 1;  // concurrent verifications within a step
  VerifyConfig verify;
  std::string model;
  double temperature = 0;
};

/// One generated candidate. Steps: 1 demonstration prompt, 2 its compile
/// feedback regeneration, 3 the rank feedback round, 4 that round's compile
/// feedback regeneration.
struct GenerationAttempt {
  int id = 0;
  int step = 1;
  int candidate = 0;  // index within its round
  PromptKind prompt = PromptKind::Base;
  std::string prompt_hash;
  std::vector<std::string> demo_ids;
  std::optional<int> regenerated_from;
  std::string region;            // generated region, without markers
  std::string program;           // the candidate program
  std::string generation_error;  // set when the model produced no usable code
  Verdict verdict;               // meaningful iff generated()
  std::optional<int> rank;       // among all passing attempts, 1 = fastest

  bool generated() const { return generation_error.empty(); }
  bool passed() const { return generated() && verdict.pass(); }
  int round() const { return step <= 2 ? 1 : 2; }
};

struct PipelineResult {
  std::string name;
  std::string provider;
  std::string program;  // the selected candidate, or the original
  std::optional<int> selected;
  std::vector<GenerationAttempt> attempts;
  std::vector<std::string> retrieved;  // top-n record ids
  std::string feedback_rank;           // rank line of the second round's prompt
  CoverageReport coverage;
  std::size_t inputs = 0;
  std::optional<double> original_time;
  PipelineConfig config;

  bool improved() const { return selected.has_value(); }
  const GenerationAttempt* attempt(int id) const {
    for (const auto& a : attempts)
      if (a.id == id) return &a;
    return nullptr;
  }
  std::optional<double> final_time() const {
    if (!selected) return original_time;
    return attempt(*selected)->verdict.scop_time;
  }
  BenchmarkResult benchmark() const {
    return {name, selected.has_value(), original_time.value_or(0), improved() ? final_time() : std::nullopt};
  }
};

namespace detail {

inline std::string marked(const std::string& region) { return "#pragma scop\n" + region + "#pragma endscop"; }

class PipelineRun {
 public:
  PipelineRun(const std::string& target, const RetrievalIndex* index, LlmProvider& llm, const PipelineConfig& cfg,
              std::string name)
      : target_(target), index_(index), llm_(llm), cfg_(cfg), verifier_(target, cfg.verify) {
    result_.name = std::move(name);
    result_.provider = llm.name();
    result_.config = cfg;
  }

  PipelineResult run() {
    if (cfg_.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    verifier_.prepare();
    result_.coverage = verifier_.coverage().report;
    result_.inputs = verifier_.inputs().size();
    if (cfg_.verify.measure_time) result_.original_time = verifier_.original_time();
    target_code_ = marked(verifier_.parsed().region.scop);
    retrieve();

    const std::size_t k = static_cast<std::size_t>(cfg_.k);
    std::vector<ChatTranscript> first(k), second(k);

    // Step 1: demonstration prompts.
    std::vector<int> round1;
    for (std::size_t c = 0; c < k; ++c) {
      Rng rng = Rng::stream(cfg_.seed, "demonstrations", c);
      auto demos = hits_.empty() ? std::vector<RetrievalHit>{} : pick_demonstrations(hits_, cfg_.retrieval, rng);
      PromptSlots slots;
      slots.target_code = target_code_;
      std::vector<std::string> ids;
      for (const auto& h : demos) {
        slots.demonstrations.push_back(
            {marked(scop_text(h.record->example_source)), marked(scop_text(h.record->optimized_source))});
        ids.push_back(h.record->id);
      }
      auto kind = demos.empty() ? PromptKind::Base : PromptKind::WithDemonstration;
      round1.push_back(generate(1, c, kind, slots, first[c], ids, std::nullopt));
    }
    verify(round1);

    // Step 2: one compile feedback regeneration per failing candidate.
    auto final1 = regenerate(2, round1, first);

    // Step 3: a fresh round carrying the results of the first.
    PromptSlots rank_slots;
    rank_slots.target_code = target_code_;
    std::vector<TimedAttempt> timed{{0, result_.original_time.value_or(0)}};
    for (int id : final1) {
      const auto& a = at(id);
      if (a.passed()) timed.push_back({id, a.verdict.scop_time.value_or(0)});
    }
    if (timed.size() > 1) {
      auto ranked = rank_performance(timed);
      rank_slots.rank = ranked.text;
      result_.feedback_rank = ranked.text;
      for (int id : ranked.order)
        if (id != 0) rank_slots.available.push_back({id, marked(at(id).region)});
    }
    for (int id : final1) {
      const auto& a = at(id);
      if (a.generated() && !a.passed()) rank_slots.failed.push_back({id, marked(a.region)});
    }
    std::vector<int> round2;
    for (std::size_t c = 0; c < k; ++c) {
      auto kind = effective_kind(PromptKind::TestAndRankFeedback, rank_slots);
      round2.push_back(generate(3, c, kind, rank_slots, second[c], {}, std::nullopt));
    }
    verify(round2);

    // Step 4: compile feedback for the second round, then selection.
    regenerate(4, round2, second);
    select();
    return std::move(result_);
  }

 private:
  GenerationAttempt& at(int id) { return result_.attempts[static_cast<std::size_t>(id - 1)]; }

  void retrieve() {
    if (!index_ || index_->records().empty()) return;
    hits_ = retrieve_top_n(make_query(target_), *index_, cfg_.retrieval).hits;
    for (const auto& h : hits_) result_.retrieved.push_back(h.record->id);
  }

  // Asks the model once; failures to produce code become failed attempts,
  // environment problems propagate.
  int generate(int step, std::size_t candidate, PromptKind kind, const PromptSlots& slots, ChatTranscript& chat,
               std::vector<std::string> demo_ids, std::optional<int> from) {
    GenerationAttempt a;
    a.id = static_cast<int>(result_.attempts.size()) + 1;
    a.step = step;
    a.candidate = static_cast<int>(candidate);
    a.prompt = kind;
    a.demo_ids = std::move(demo_ids);
    a.regenerated_from = from;
    chat.model = cfg_.model;
    chat.temperature = cfg_.temperature;
    chat.user(render_prompt(kind, slots));
    a.prompt_hash = request_hash(chat);
    try {
      std::string reply = llm_.complete(chat);
      a.region = generated_region(extract_code_block(reply));
      a.program = splice_scop(target_, a.region);
    } catch (const Error& e) {
      if (is_environment_error(e.kind())) throw;
      a.generation_error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    result_.attempts.push_back(std::move(a));
    return result_.attempts.back().id;
  }

  void verify(const std::vector<int>& ids) {
    std::vector<int> todo;
    for (int id : ids)
      if (at(id).generated()) todo.push_back(id);
    parallel_for(todo.size(), cfg_.jobs, [&](std::size_t k) {
      auto& a = at(todo[k]);
      a.verdict = verifier_.check(a.program, "attempt" + std::to_string(a.id));
    });
  }

  // Regenerates each compile failure of `ids` once, continuing its chat.
  // Returns the latest attempt per candidate.
  std::vector<int> regenerate(int step, const std::vector<int>& ids, std::vector<ChatTranscript>& chats) {
    std::vector<int> latest = ids, fresh;
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const auto& a = at(ids[c]);
      if (!a.generated() || a.verdict.cls != VerdictClass::CE) continue;
      PromptSlots slots;
      slots.last_code = marked(a.region);
      slots.error = a.verdict.detail;
      int id = generate(step, c, PromptKind::CompileFeedback, slots, chats[c], {}, a.id);
      latest[c] = id;
      fresh.push_back(id);
    }
    verify(fresh);
    return latest;
  }

  void select() {
    std::vector<TimedAttempt> passing;
    for (const auto& a : result_.attempts)
      if (a.passed()) passing.push_back({a.id, a.verdict.scop_time.value_or(0)});
    if (passing.empty()) {
      result_.program = target_;
      return;
    }
    auto ranked = rank_performance(passing);
    for (std::size_t r = 0; r < ranked.order.size(); ++r) at(ranked.order[r]).rank = static_cast<int>(r) + 1;
    result_.selected = ranked.order.front();
    result_.program = at(ranked.order.front()).program;
  }

  const std::string& target_;
  const RetrievalIndex* index_;
  LlmProvider& llm_;
  const PipelineConfig& cfg_;
  Verifier verifier_;
  std::string target_code_;
  std::vector<RetrievalHit> hits_;
  PipelineResult result_;
};

}  // namespace detail

/// The four-step generation loop on one target. Returns the original
/// program (selected unset) when no candidate passes.
inline PipelineResult run_pipeline(const std::string& target, const RetrievalIndex* index, LlmProvider& llm,
                                   const PipelineConfig& cfg = {}, std::string name = "target") {
  return detail::PipelineRun(target, index, llm, cfg, std::move(name)).run();
}

/// The run report: everything except measured times, so identical runs
/// give identical bytes. Times go to timing_json().
inline json report_json(const PipelineResult& r) {
  json doc = document("run-report");
  doc["target"] = r.name;
  doc["provider"] = r.provider;
  doc["k"] = r.config.k;
  doc["top_n"] = r.config.retrieval.top_n;
  doc["demos"] = r.config.retrieval.demos;
  doc["seed"] = r.config.seed;
  doc["retrieved"] = r.retrieved;
  doc["inputs"] = {{"retained", r.inputs}, {"coverage", to_json(r.coverage)}};
  json attempts = json::array();
  for (const auto& a : r.attempts) {
    json j = {{"id", a.id},
              {"step", a.step},
              {"candidate", a.candidate},
              {"prompt", to_string(a.prompt)},
              {"prompt_hash", a.prompt_hash},
              {"demos", a.demo_ids},
              {"regenerated_from", a.regenerated_from ? json(*a.regenerated_from) : json(nullptr)}};
    if (a.generated()) {
      j["verdict"] = to_string(a.verdict.cls);
      j["detail"] = a.verdict.detail;
      j["region_hash"] = hex64(fnv1a64(a.region));
    } else {
      j["verdict"] = "no-code";
      j["detail"] = a.generation_error;
    }
    j["rank"] = a.rank ? json(*a.rank) : json(nullptr);
    attempts.push_back(j);
  }
  doc["attempts"] = attempts;
  doc["feedback_rank"] = r.feedback_rank;
  doc["selected"] = r.selected ? json(*r.selected) : json(nullptr);
  doc["status"] = r.improved() ? "selected" : "no-improvement";
  return doc;
}

inline json timing_json(const PipelineResult& r) {
  json doc = document("run-timing");
  doc["target"] = r.name;
  doc["original_time"] = r.original_time ? json(*r.original_time) : json(nullptr);
  json attempts = json::array();
  for (const auto& a : r.attempts)
    if (a.passed() && a.verdict.scop_time)
      attempts.push_back({{"id", a.id}, {"scop_time", *a.verdict.scop_time}, {"run_times", a.verdict.run_times}});
  doc["attempts"] = attempts;
  auto final_time = r.final_time();
  doc["final_time"] = final_time ? json(*final_time) : json(nullptr);
  doc["speedup"] = speedup_of(r.benchmark());
  return doc;
}

}  // namespace scopt
