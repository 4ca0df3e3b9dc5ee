#pragma once

#include <algorithm>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/optimize/backend.hpp"
#include "scopt/retrieval/record.hpp"
#include "scopt/synth/synthesizer.hpp"
#include "scopt/util/parallel.hpp"
#include "scopt/verify/verifier.hpp"

namespace scopt {

/// An example program on disk: NAME.c, with NAME.params.json beside it when
/// it was synthesized.
struct ExampleFile {
  std::string id;
  std::string source;
  std::optional<LoopParameters> params;
};

inline json synth_sidecar(const SynthExample& ex) {
  json doc = document("synth-example");
  doc["seed"] = ex.seed;
  doc["used_seed"] = ex.used_seed;
  doc["attempts"] = ex.attempts;
  doc["params"] = to_json(ex.params);
  return doc;
}

/// Writes `count` examples for seeds seed, seed+1, ... Names carry the
/// requested seed. Returns the number of seeds that stayed infeasible.
inline int write_examples(const fs::path& dir, std::uint64_t seed, int count, const SynthConfig& cfg = {}, int jobs = 1) {
  fs::create_directories(dir);
  std::atomic<int> infeasible{0};
  parallel_for(static_cast<std::size_t>(std::max(0, count)), jobs, [&](std::size_t k) {
    std::uint64_t s = seed + k;
    auto out = synthesize(s, cfg);
    if (!out.example) {
      ++infeasible;
      return;
    }
    std::string name = "ex" + std::to_string(s);
    write_file(dir / (name + ".c"), out.example->program);
    write_file(dir / (name + ".params.json"), dump_document(synth_sidecar(*out.example)));
  });
  return infeasible;
}

inline std::vector<ExampleFile> read_examples(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, "no example directory " + dir.string());
  std::vector<ExampleFile> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".c") continue;
    ExampleFile f;
    f.id = e.path().stem().string();
    f.source = read_file(e.path());
    fs::path side = dir / (f.id + ".params.json");
    if (fs::exists(side)) f.params = parameters_from_json(parse_document(read_file(side), "synth-example").at("params"));
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

struct DatasetConfig {
  BackendKind backend = BackendKind::Builtin;
  ExternalBackendConfig external;
  VerifyConfig verify;
  int jobs = 1;
};

struct DatasetSummary {
  std::vector<std::string> admitted;
  std::vector<std::pair<std::string, std::string>> excluded;  // id, reason
  int fell_back = 0;                                          // external backend missing
};

/// Optimizes one example and gates it on the differential test. Throws
/// VerificationFailed when the optimized version does not pass.
inline DatasetRecord build_record(const ExampleFile& ex, const DatasetConfig& cfg, bool* fell_back = nullptr) {
  OptimizeResult opt = optimize_example(ex.source, cfg.backend, cfg.external);
  if (fell_back) *fell_back = opt.fell_back;
  // An unchanged program passes against itself; only rewrites are run.
  if (opt.program != ex.source) {
    VerifyConfig vc = cfg.verify;
    vc.measure_time = false;
    Verifier v(ex.source, vc);
    Verdict verdict = v.check(opt.program, "optimized");
    if (!verdict.pass())
      throw Error(ErrorKind::VerificationFailed,
                  ex.id + ": optimized version is " + to_string(verdict.cls) + ": " + verdict.detail.substr(0, 500));
  }
  return make_record(ex.id, ex.source, opt.program, ex.params, opt.backend);
}

/// Writes one record sidecar per admitted example into `out`.
inline DatasetSummary build_dataset(const std::vector<ExampleFile>& examples, const fs::path& out,
                                    const DatasetConfig& cfg) {
  fs::create_directories(out);
  DatasetSummary summary;
  std::mutex mu;
  parallel_for(examples.size(), cfg.jobs, [&](std::size_t k) {
    const auto& ex = examples[k];
    bool fb = false;
    try {
      DatasetRecord r = build_record(ex, cfg, &fb);
      write_file(out / (ex.id + ".json"), dump_document(to_json(r)));
      std::lock_guard lock(mu);
      summary.admitted.push_back(ex.id);
      summary.fell_back += fb;
    } catch (const Error& e) {
      if (is_environment_error(e.kind())) throw;
      std::lock_guard lock(mu);
      summary.excluded.push_back({ex.id, std::string(to_string(e.kind())) + ": " + e.what()});
    }
  });
  std::sort(summary.admitted.begin(), summary.admitted.end());
  std::sort(summary.excluded.begin(), summary.excluded.end());
  return summary;
}

}  // namespace scopt
