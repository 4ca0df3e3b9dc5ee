#pragma once

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/scop/program.hpp"
#include "scopt/util/process.hpp"
#include "scopt/verify/compiler.hpp"
#include "scopt/verify/coverage.hpp"
#include "scopt/verify/harness.hpp"
#include "scopt/verify/inputs.hpp"

namespace scopt {

enum class VerdictClass { CE, IA, RE, ET, Pass };

inline const char* to_string(VerdictClass c) {
  switch (c) {
    case VerdictClass::CE: return "CE";
    case VerdictClass::IA: return "IA";
    case VerdictClass::RE: return "RE";
    case VerdictClass::ET: return "ET";
    case VerdictClass::Pass: return "Pass";
  }
  return "?";
}

struct Verdict {
  VerdictClass cls = VerdictClass::CE;
  std::string detail;
  std::optional<double> scop_time;  // present iff Pass and timing ran
  std::vector<double> run_times;

  bool pass() const { return cls == VerdictClass::Pass; }
};

struct VerifyConfig {
  CompilerConfig compiler;
  CoverageConfig coverage;
  double run_limit_seconds = 120;       // candidate runs
  double baseline_limit_seconds = 600;  // runs of the original
  int timing_runs = 5;
  int warmup_runs = 1;
  bool measure_time = true;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  std::vector<std::string> output_arrays;  // empty: the arrays the region writes
  std::string omp_threads;                  // empty: hardware concurrency
  fs::path workdir;                         // empty: a private temporary directory
};

/// What one run of an instrumented binary printed.
struct RunOutput {
  struct Array {
    char type = 'd';
    std::string checksum;
    std::vector<double> values;
  };
  std::map<std::string, Array> arrays;
  std::optional<double> time;
};

inline RunOutput parse_run_output(const std::string& text) {
  RunOutput out;
  std::stringstream ss(text);
  RunOutput::Array* current = nullptr;
  for (std::string line; std::getline(ss, line);) {
    if (line.rfind("array ", 0) == 0) {
      std::stringstream ls(line.substr(6));
      std::string name, type, checksum;
      long total = 0;
      ls >> name >> type >> total >> checksum;
      current = &out.arrays[name];
      current->type = type.empty() ? 'd' : type[0];
      current->checksum = checksum;
      current->values.reserve(static_cast<std::size_t>(std::max(0L, total)));
    } else if (line.rfind("time ", 0) == 0) {
      out.time = std::strtod(line.c_str() + 5, nullptr);
      current = nullptr;
    } else if (current && !line.empty()) {
      current->values.push_back(std::strtod(line.c_str(), nullptr));
    }
  }
  return out;
}

/// First difference between two dumps beyond tolerance (integers exact), or
/// nullopt when they agree.
inline std::optional<std::string> compare_outputs(const RunOutput& expected, const RunOutput& actual, double rel_tol,
                                                  double abs_tol) {
  for (const auto& [name, e] : expected.arrays) {
    auto it = actual.arrays.find(name);
    if (it == actual.arrays.end()) return "array " + name + " missing from candidate output";
    const auto& a = it->second;
    if (a.values.size() != e.values.size())
      return "array " + name + " has " + std::to_string(a.values.size()) + " elements, expected " +
             std::to_string(e.values.size());
    const bool exact = e.type == 'i' || e.type == 'l';
    for (std::size_t k = 0; k < e.values.size(); ++k) {
      double x = e.values[k], y = a.values[k];
      if (std::isnan(x) && std::isnan(y)) continue;
      bool same = exact ? x == y : std::fabs(x - y) <= std::max(abs_tol, rel_tol * std::max(std::fabs(x), std::fabs(y)));
      if (!same) {
        std::ostringstream msg;
        msg.precision(17);
        msg << name << " element " << k << ": expected " << x << ", got " << y;
        if (e.checksum != a.checksum) msg << " (checksum " << e.checksum << " vs " << a.checksum << ")";
        return msg.str();
      }
    }
  }
  return std::nullopt;
}

namespace detail {

inline std::mutex& timing_mutex() {
  static std::mutex m;
  return m;
}

inline std::string describe_failure(const ProcessResult& r) {
  if (r.signal) return "terminated by signal " + std::to_string(r.signal) + " (" + strsignal(r.signal) + ")";
  std::string msg = "exit code " + std::to_string(r.exit_code);
  if (!r.err.empty()) msg += ": " + r.err.substr(0, 2000);
  return msg;
}

}  // namespace detail

/// Differential verifier bound to one original program. prepare() compiles
/// the original, selects inputs by coverage and records reference outputs;
/// check() classifies a candidate. check() may run concurrently from
/// several threads; timing runs are serialised process-wide.
class Verifier {
 public:
  Verifier(std::string original, VerifyConfig cfg) : original_(std::move(original)), cfg_(std::move(cfg)) {
    if (cfg_.workdir.empty()) {
      scratch_ = std::make_unique<ScratchDir>("scopt_verify");
      root_ = scratch_->path();
    } else {
      root_ = cfg_.workdir;
      fs::create_directories(root_);
    }
    if (cfg_.omp_threads.empty())
      cfg_.omp_threads = std::to_string(std::max(1u, std::thread::hardware_concurrency()));
  }

  /// Seeds default to the builtin catalog.
  void prepare(std::optional<std::vector<TestInput>> seeds = std::nullopt) {
    std::lock_guard lock(prepare_mu_);
    if (prepared_) return;
    parsed_ = parse_program(original_);
    arrays_ = harness_arrays(parsed_, cfg_.output_arrays);
    compiler_path(cfg_.compiler);
    seeds_ = seeds ? *seeds : builtin_seed_inputs(arrays_);
    select_inputs();

    fs::path dir = root_ / "original";
    auto built = compile_instrumented(original_, arrays_, dir, cfg_.compiler, false);
    if (!built.ok) throw Error(ErrorKind::BaselineFailed, "original does not compile:\n" + built.diagnostics);
    original_bin_ = built.binary;
    for (const auto& input : inputs_) {
      auto r = run(original_bin_, dir, input, true, cfg_.baseline_limit_seconds);
      if (!r.first.ok())
        throw Error(ErrorKind::BaselineFailed, "original fails on input " + std::to_string(input.id) + ": " +
                                                   (r.first.timed_out ? "timeout" : detail::describe_failure(r.first)));
      reference_.push_back(std::move(r.second));
    }
    prepared_ = true;
  }

  /// Mean region time of the original under the timing protocol.
  double original_time() {
    prepare();
    std::lock_guard lock(prepare_mu_);
    if (!original_time_) {
      auto t = time_binary(original_bin_, root_ / "original", cfg_.baseline_limit_seconds);
      if (!t) throw Error(ErrorKind::BaselineFailed, "original exceeds the baseline limit");
      original_time_ = mean(*t);
    }
    return *original_time_;
  }

  Verdict check(const std::string& candidate, const std::string& label = "candidate") {
    prepare();
    fs::path dir;
    {
      std::lock_guard lock(mu_);
      dir = root_ / (label + "_" + std::to_string(counter_++));
    }
    Verdict v;
    // Diagnostics come from the candidate exactly as written, so they never
    // mention the harness.
    CompilerConfig syntax = cfg_.compiler;
    syntax.cflags.push_back("-fsyntax-only");
    auto checked = compile_syntax(candidate, dir, syntax);
    if (!checked.empty()) {
      v.cls = VerdictClass::CE;
      v.detail = checked;
      return v;
    }
    CompileResult built;
    try {
      built = compile_instrumented(candidate, arrays_, dir, cfg_.compiler, false);
    } catch (const Error& e) {
      built.diagnostics = e.what();
    }
    if (!built.ok) {
      v.cls = VerdictClass::CE;
      v.detail = built.diagnostics;
      return v;
    }
    for (std::size_t k = 0; k < inputs_.size(); ++k) {
      auto [proc, output] = run(built.binary, dir, inputs_[k], true, cfg_.run_limit_seconds);
      if (proc.timed_out) {
        v.cls = VerdictClass::ET;
        v.detail = "exceeded " + number(cfg_.run_limit_seconds) + " s";
        return v;
      }
      if (!proc.ok()) {
        v.cls = VerdictClass::RE;
        v.detail = detail::describe_failure(proc);
        return v;
      }
      if (auto diff = compare_outputs(reference_[k], output, cfg_.rel_tol, cfg_.abs_tol)) {
        v.cls = VerdictClass::IA;
        v.detail = "input " + std::to_string(inputs_[k].id) + ": " + *diff;
        return v;
      }
    }
    v.cls = VerdictClass::Pass;
    if (cfg_.measure_time) {
      auto times = time_binary(built.binary, dir, cfg_.run_limit_seconds);
      if (!times) {
        v.cls = VerdictClass::ET;
        v.detail = "timed run exceeded " + number(cfg_.run_limit_seconds) + " s";
        return v;
      }
      v.run_times = *times;
      v.scop_time = mean(*times);
    }
    return v;
  }

  const std::vector<TestInput>& inputs() const { return inputs_; }
  const CoverageOutcome& coverage() const { return coverage_; }
  const std::vector<HarnessArray>& arrays() const { return arrays_; }
  const ParsedProgram& parsed() const { return parsed_; }
  const VerifyConfig& config() const { return cfg_; }

 private:
  static double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0 : s / static_cast<double>(xs.size());
  }
  static std::string number(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
  }

  // Empty on success, else the compiler's stderr.
  static std::string compile_syntax(const std::string& program, const fs::path& dir, const CompilerConfig& cfg) {
    fs::create_directories(dir);
    write_file(dir / "program.c", program);
    std::vector<std::string> argv{compiler_path(cfg).string()};
    argv.insert(argv.end(), cfg.cflags.begin(), cfg.cflags.end());
    argv.push_back("program.c");
    ProcessOptions opts;
    opts.cwd = dir;
    opts.timeout_seconds = cfg.timeout_seconds;
    auto r = run_process(argv, opts);
    if (r.ok()) return "";
    return r.timed_out ? "compiler timed out\n" + r.err : (r.err.empty() ? "compilation failed\n" : r.err);
  }

  std::pair<ProcessResult, RunOutput> run(const fs::path& bin, const fs::path& dir, const TestInput& input, bool dump,
                                          double limit) {
    std::string tag = std::to_string(input.id);
    fs::path in = dir / ("input_" + tag + ".txt"), out = dir / ("output_" + tag + ".txt");
    write_file(in, input.text());
    std::error_code ec;
    fs::remove(out, ec);
    ProcessOptions opts;
    opts.cwd = dir;
    opts.timeout_seconds = limit;
    opts.env = {{"SCOPT_INPUT", in.string()}, {"SCOPT_OUTPUT", out.string()}, {"OMP_NUM_THREADS", cfg_.omp_threads}};
    if (dump) opts.env["SCOPT_DUMP"] = "1";
    auto proc = run_process({bin.string()}, opts);
    RunOutput parsed;
    if (proc.ok()) {
      if (fs::exists(out))
        parsed = parse_run_output(read_file(out));
      else
        proc.exit_code = 125;  // region never reached the harness exit
    }
    fs::remove(out, ec);
    return {std::move(proc), std::move(parsed)};
  }

  // Region times of `timing_runs` runs after `warmup_runs`; nullopt on a
  // timeout.
  std::optional<std::vector<double>> time_binary(const fs::path& bin, const fs::path& dir, double limit) {
    std::lock_guard lock(detail::timing_mutex());
    std::vector<double> times;
    const TestInput& input = inputs_.front();
    for (int k = 0; k < cfg_.warmup_runs + cfg_.timing_runs; ++k) {
      auto [proc, out] = run(bin, dir, input, false, limit);
      if (proc.timed_out) return std::nullopt;
      if (!proc.ok() || !out.time) throw Error(ErrorKind::EnvironmentError, "timed run failed: " + detail::describe_failure(proc));
      if (k >= cfg_.warmup_runs) times.push_back(*out.time);
    }
    return times;
  }

  void select_inputs() {
    fs::path dir = root_ / "coverage";
    auto gcov = find_executable(cfg_.coverage.gcov);
    if (!gcov) {
      coverage_ = capped_inputs(seeds_, cfg_.coverage);
      inputs_ = coverage_.retained;
      return;
    }
    auto built = compile_instrumented(original_, arrays_, dir, cfg_.compiler, true);
    if (!built.ok) throw Error(ErrorKind::BaselineFailed, "original does not compile for coverage:\n" + built.diagnostics);
    auto [first, last] = marker_lines(original_);
    auto runner = [&](const TestInput& input) {
      return run(built.binary, dir, input, false, cfg_.coverage.run_limit_seconds).first.ok();
    };
    auto probe = [&, first = first, last = last] {
      ProcessOptions opts;
      opts.cwd = dir;
      opts.timeout_seconds = 60;
      auto r = run_process({gcov->string(), "-b", "-c", "-o", ".", "program_instr.c"}, opts);
      fs::path annotated = dir / "program.c.gcov";
      if (!r.ok() || !fs::exists(annotated)) return CoverageReport::of(0, 0);
      return parse_gcov(read_file(annotated), first, last);
    };
    coverage_ = coverage_loop(seeds_, runner, probe, cfg_.coverage);
    inputs_ = coverage_.retained;
    if (inputs_.empty()) inputs_ = {seeds_.front()};
  }

  std::string original_;
  VerifyConfig cfg_;
  std::unique_ptr<ScratchDir> scratch_;
  fs::path root_;
  bool prepared_ = false;
  ParsedProgram parsed_;
  std::vector<HarnessArray> arrays_;
  std::vector<TestInput> seeds_;
  std::vector<TestInput> inputs_;
  CoverageOutcome coverage_;
  fs::path original_bin_;
  std::vector<RunOutput> reference_;
  std::optional<double> original_time_;
  std::mutex mu_;
  std::mutex prepare_mu_;
  int counter_ = 0;
};

inline json to_json(const Verdict& v) {
  json j = {{"verdict", to_string(v.cls)}, {"detail", v.detail}};
  if (v.scop_time) j["scop_time_seconds"] = *v.scop_time;
  return j;
}

inline json to_json(const CoverageReport& c) {
  return {{"branch_total", c.branch_total},
          {"branch_taken", c.branch_taken},
          {"percent", c.percent},
          {"tool_available", c.tool_available}};
}

}  // namespace scopt
