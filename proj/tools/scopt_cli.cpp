#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "scopt/scopt.hpp"

using namespace scopt;

namespace {

int exit_code_for(ErrorKind k) { return is_environment_error(k) ? 2 : 1; }

void print_error(ErrorKind kind, const std::string& message) {
  json doc = document("error");
  doc["error"] = to_string(kind);
  doc["message"] = message;
  std::cerr << doc.dump() << std::endl;
}

void print(const json& doc) { std::cout << dump_document(doc); }

std::vector<std::string> read_outputs(const fs::path& sidecar) {
  std::vector<std::string> names;
  if (!fs::exists(sidecar)) return names;
  std::stringstream ss(read_file(sidecar));
  for (std::string w; ss >> w;) names.push_back(w);
  return names;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  return out.string() + suffix;
}

std::unique_ptr<RetrievalIndex> open_index(const Config& cfg) {
  if (cfg.index.empty()) return nullptr;
  return std::make_unique<RetrievalIndex>(load_index(cfg.index));
}

struct OptimizeOutcome {
  PipelineResult result;
  fs::path program, report, timing;
};

OptimizeOutcome optimize_one(const Config& cfg, const fs::path& target, const fs::path& out, const RetrievalIndex* index,
                             const std::string& fixture, const std::vector<std::string>& outputs) {
  std::string source = read_file(target);
  PipelineConfig pc = cfg.pipeline_config();
  pc.verify.output_arrays = outputs.empty() ? read_outputs(with_suffix(target, ".outputs")) : outputs;
  auto llm = cfg.make_provider(source, fixture);
  OptimizeOutcome o{run_pipeline(source, index, *llm, pc, target.filename().string()), out, with_suffix(out, ".report.json"),
                    with_suffix(out, ".timing.json")};
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file(o.program, o.result.program);
  write_file(o.report, dump_document(report_json(o.result)));
  write_file(o.timing, dump_document(timing_json(o.result)));
  return o;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scopt: retrieval-guided loop optimization with differential verification"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  std::string config_file;
  std::vector<std::string> settings;
  std::map<std::string, std::string> flags;  // key -> value, only when given
  app.add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", settings, "key=value setting (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  flag("--cc", "cc", "C compiler");
  flag("--cflags", "cflags", "compiler flags, space separated");
  flag("--run-limit", "run_limit", "seconds per candidate run");
  flag("--provider", "llm.provider", "http, replay or stub");
  flag("--fixture", "llm.fixture", "replay fixture");
  flag("--model", "llm.model", "model name");
  flag("--audit-log", "llm.audit_log", "JSONL log of every model exchange");
  flag("--k", "k", "candidates per round");
  flag("--top-n", "retrieval.top_n", "retrieved examples");
  flag("--demos", "retrieval.demos", "demonstrations per prompt");
  flag("--seed", "seed", "seed");
  flag("--jobs", "jobs", "parallel workers");
  flag("--index", "index", "index directory");
  flag("--dataset", "dataset", "dataset directory");
  flag("--backend", "backend", "builtin or external");
  app.add_flag_callback("--no-timing", [&flags] { flags["timing"] = "false"; }, "skip timing runs");

  // synth
  auto* synth = app.add_subcommand("synth", "generate example programs");
  int count = 10;
  std::string synth_out;
  synth->add_option("--count", count, "examples")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", synth_out, "output directory")->required();

  // dataset build
  auto* dataset = app.add_subcommand("dataset", "dataset operations");
  dataset->require_subcommand(1);
  auto* dataset_build = dataset->add_subcommand("build", "optimize, verify and describe examples");
  std::string examples_dir, dataset_out;
  dataset_build->add_option("--examples", examples_dir, "example directory")->required();
  dataset_build->add_option("--out", dataset_out, "dataset directory")->required();

  // index build
  auto* index_cmd = app.add_subcommand("index", "index operations");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "build the retrieval index of a dataset");
  std::string index_out;
  index_build->add_option("--out", index_out, "index directory")->required();

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "rank dataset examples for a target");
  std::string retrieve_target;
  bool explain = false;
  retrieve->add_option("target", retrieve_target, "target program")->required()->check(CLI::ExistingFile);
  retrieve->add_flag("--explain", explain, "print score breakdowns");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "run the four-step generation loop on a target");
  std::string optimize_target, optimize_out;
  std::vector<std::string> outputs;
  optimize->add_option("target", optimize_target, "target program")->required()->check(CLI::ExistingFile);
  optimize->add_option("--out", optimize_out, "optimized program (default: <target>.opt.c)");
  optimize->add_option("--outputs", outputs, "output arrays to compare")->delimiter(',');

  // verify
  auto* verify = app.add_subcommand("verify", "differential test of two programs");
  std::string verify_a, verify_b;
  verify->add_option("original", verify_a, "original program")->required()->check(CLI::ExistingFile);
  verify->add_option("candidate", verify_b, "candidate program")->required()->check(CLI::ExistingFile);
  verify->add_option("--outputs", outputs, "output arrays to compare")->delimiter(',');

  // bench
  auto* bench = app.add_subcommand("bench", "optimize every program of a suite and report metrics");
  std::string suite_dir, bench_out;
  bench->add_option("suite", suite_dir, "suite directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--out", bench_out, "output directory")->required();

  // config
  auto* show_config = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(ErrorKind::InvalidArgument, e.what());
    return 1;
  }

  try {
    if (!config_file.empty()) cfg.apply_file(read_file(config_file));
    for (const auto& [key, value] : flags) cfg.set(key, value);
    for (const auto& s : settings) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--set expects key=value, got " + s);
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.apply_env();
    if (cfg.jobs < 1) cfg.jobs = 1;

    if (*show_config) {
      print(cfg.to_json());
      return 0;
    }

    if (*synth) {
      int infeasible = write_examples(synth_out, cfg.seed, count, {}, cfg.jobs);
      json doc = document("synth-summary");
      doc["seed"] = cfg.seed;
      doc["requested"] = count;
      doc["written"] = count - infeasible;
      doc["infeasible"] = infeasible;
      print(doc);
      return 0;
    }

    if (*dataset_build) {
      auto summary = build_dataset(read_examples(examples_dir), dataset_out, cfg.dataset_config());
      json doc = document("dataset-summary");
      doc["admitted"] = summary.admitted.size();
      json excluded = json::array();
      for (const auto& [id, why] : summary.excluded) excluded.push_back({{"id", id}, {"reason", why}});
      doc["excluded"] = excluded;
      doc["backend_fell_back"] = summary.fell_back;
      print(doc);
      return 0;
    }

    if (*index_build) {
      if (cfg.dataset.empty()) throw Error(ErrorKind::InvalidArgument, "index build needs --dataset");
      bool rebuilt = false;
      fs::create_directories(index_out);
      auto index = build_index(cfg.dataset, index_out, {cfg.retrieval_config().bm25_k1, cfg.retrieval_config().bm25_b},
                               &rebuilt);
      json doc = document("index-summary");
      doc["records"] = index.records().size();
      doc["content_hash"] = index.content_hash();
      doc["rebuilt"] = rebuilt;
      print(doc);
      return 0;
    }

    if (*retrieve) {
      auto index = open_index(cfg);
      if (!index) throw Error(ErrorKind::InvalidArgument, "retrieve needs --index");
      auto result = retrieve_top_n(make_query(read_file(retrieve_target)), *index, cfg.retrieval_config());
      json doc = document("retrieval");
      doc["corpus_smaller_than_n"] = result.corpus_smaller_than_n;
      json hits = json::array();
      for (const auto& h : result.hits) {
        json j = {{"id", h.record->id}, {"score", h.score.la}};
        if (explain)
          j["breakdown"] = {{"s_b", h.score.s_b},   {"s_f", h.score.s_f},         {"s_m", h.score.s_m},
                            {"s_w", h.score.s_w},   {"reward", h.score.reward}, {"penalty", h.score.penalty}};
        hits.push_back(j);
      }
      doc["hits"] = hits;
      print(doc);
      return 0;
    }

    if (*optimize) {
      auto index = open_index(cfg);
      fs::path target = optimize_target;
      fs::path out = optimize_out.empty() ? with_suffix(target, ".opt.c") : fs::path(optimize_out);
      auto o = optimize_one(cfg, target, out, index.get(), "", outputs);
      json doc = document("optimize-summary");
      doc["program"] = o.program.string();
      doc["report"] = o.report.string();
      doc["status"] = o.result.improved() ? "selected" : "no-improvement";
      doc["selected"] = o.result.selected ? json(*o.result.selected) : json(nullptr);
      doc["speedup"] = speedup_of(o.result.benchmark());
      print(doc);
      if (!o.result.improved()) {
        print_error(ErrorKind::NoImprovement, "no candidate passed; the original program was written");
        return 1;
      }
      return 0;
    }

    if (*verify) {
      VerifyConfig vc = cfg.verify_config();
      vc.output_arrays = outputs;
      Verifier v(read_file(verify_a), vc);
      Verdict verdict = v.check(read_file(verify_b));
      json doc = document("verification");
      doc["verdict"] = to_json(verdict);
      doc["inputs"] = v.inputs().size();
      doc["coverage"] = to_json(v.coverage().report);
      if (verdict.pass() && vc.measure_time) doc["original_time"] = v.original_time();
      print(doc);
      if (!verdict.pass()) {
        print_error(ErrorKind::VerificationFailed, std::string(to_string(verdict.cls)) + ": " + verdict.detail);
        return 1;
      }
      return 0;
    }

    if (*bench) {
      auto index = open_index(cfg);
      std::vector<fs::path> targets;
      for (const auto& e : fs::directory_iterator(suite_dir))
        if (e.is_regular_file() && e.path().extension() == ".c") targets.push_back(e.path());
      std::sort(targets.begin(), targets.end());
      if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "suite " + suite_dir + " has no programs");
      fs::create_directories(bench_out);
      std::vector<std::optional<PipelineResult>> results(targets.size());
      // Targets run one after another; each pipeline uses the job bound.
      for (std::size_t k = 0; k < targets.size(); ++k) {
        std::string fixture;
        if (cfg.llm_provider == "replay") {
          fs::path f = with_suffix(targets[k], ".fixture.json");
          if (!fs::exists(f)) throw Error(ErrorKind::InvalidArgument, "no replay fixture " + f.string());
          fixture = f.string();
        }
        fs::path out = fs::path(bench_out) / (targets[k].stem().string() + ".opt.c");
        results[k] = optimize_one(cfg, targets[k], out, index.get(), fixture, {}).result;
      }
      json doc = document("bench-report");
      json timing = document("bench-timing");
      json rows = json::array(), trows = json::array();
      std::vector<BenchmarkResult> bench_results;
      for (const auto& r : results) {
        json verdicts = json::array();
        for (const auto& a : r->attempts) verdicts.push_back(a.generated() ? to_string(a.verdict.cls) : "no-code");
        rows.push_back({{"name", r->name},
                        {"status", r->improved() ? "selected" : "no-improvement"},
                        {"selected", r->selected ? json(*r->selected) : json(nullptr)},
                        {"retained_inputs", r->inputs},
                        {"verdicts", verdicts}});
        bench_results.push_back(r->benchmark());
        trows.push_back({{"name", r->name},
                         {"original_time", r->original_time ? json(*r->original_time) : json(nullptr)},
                         {"speedup", speedup_of(bench_results.back())}});
      }
      auto metrics = compute_metrics(bench_results);
      doc["benchmarks"] = rows;
      doc["pass_at_k"] = metrics.pass_at_k;
      timing["benchmarks"] = trows;
      timing["metrics"] = to_json(metrics);
      write_file(fs::path(bench_out) / "bench.json", dump_document(doc));
      write_file(fs::path(bench_out) / "bench_timing.json", dump_document(timing));

      std::cout << std::left << std::setw(24) << "benchmark" << std::setw(16) << "status" << "speedup\n";
      for (std::size_t k = 0; k < results.size(); ++k)
        std::cout << std::setw(24) << results[k]->name << std::setw(16)
                  << (results[k]->improved() ? "selected" : "no-improvement") << fixed(metrics.speedups[k], 2) << "x\n";
      std::cout << "pass@" << cfg.k << " " << fixed(100 * metrics.pass_at_k, 1) << "%  mean speedup "
                << fixed(metrics.mean_speedup, 2) << "x  faster " << fixed(100 * metrics.faster, 1) << "%";
      if (metrics.outliers) std::cout << "  (" << metrics.outliers << " outliers above 600x excluded)";
      std::cout << "\n";
      return 0;
    }
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    print_error(ErrorKind::EnvironmentError, e.what());
    return 2;
  }
  return 0;
}
