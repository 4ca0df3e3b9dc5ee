#pragma once

#include <string>
#include <vector>

#include "scopt/util/process.hpp"
#include "scopt/verify/harness.hpp"

namespace scopt {

struct CompilerConfig {
  std::string cc = "gcc";
  std::vector<std::string> cflags{"-O3", "-fopenmp"};
  std::vector<std::string> coverage_flags{"-O0", "--coverage", "-fopenmp"};
  double timeout_seconds = 300;
};

struct CompileResult {
  bool ok = false;
  fs::path binary;
  std::string diagnostics;  // compiler stderr, verbatim
};

inline fs::path compiler_path(const CompilerConfig& cfg) {
  auto p = find_executable(cfg.cc);
  if (!p) throw Error(ErrorKind::CompilerNotFound, "C compiler '" + cfg.cc + "' not found");
  return *p;
}

namespace detail {

inline CompileResult run_compiler(const CompilerConfig& cfg, const std::vector<std::string>& flags,
                                  std::vector<std::string> args, const fs::path& workdir, const fs::path& binary) {
  std::vector<std::string> argv{compiler_path(cfg).string()};
  argv.insert(argv.end(), flags.begin(), flags.end());
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessOptions opts;
  opts.cwd = workdir;
  opts.timeout_seconds = cfg.timeout_seconds;
  auto res = run_process(argv, opts);
  CompileResult out;
  out.diagnostics = res.timed_out ? "compiler timed out\n" + res.err : res.err;
  out.ok = res.ok() && fs::exists(binary);
  if (out.ok) out.binary = binary;
  return out;
}

}  // namespace detail

/// Compiles a standalone program with the configured flags.
inline CompileResult compile(const std::string& program, const fs::path& workdir, const CompilerConfig& cfg = {},
                             const std::string& name = "program") {
  fs::create_directories(workdir);
  write_file(workdir / (name + ".c"), program);
  fs::path bin = workdir / name;
  return detail::run_compiler(cfg, cfg.cflags, {name + ".c", "-o", bin.string(), "-lm"}, workdir, bin);
}

/// Compiles a program with the harness linked in. The uninstrumented text
/// is written beside it as <name>.c so diagnostics and coverage refer to
/// its lines.
inline CompileResult compile_instrumented(const std::string& program, const std::vector<HarnessArray>& arrays,
                                          const fs::path& workdir, const CompilerConfig& cfg, bool coverage,
                                          const std::string& name = "program") {
  fs::create_directories(workdir);
  write_file(workdir / (name + ".c"), program);
  write_file(workdir / (name + "_instr.c"), instrument_program(program, arrays, name + ".c"));
  write_file(workdir / "scopt_harness.c", kHarnessSource);
  fs::path bin = workdir / name;
  const auto& flags = coverage ? cfg.coverage_flags : cfg.cflags;
  if (!coverage)
    return detail::run_compiler(cfg, flags, {name + "_instr.c", "scopt_harness.c", "-o", bin.string(), "-lm"},
                                workdir, bin);
  // The harness is compiled without instrumentation so only the program
  // contributes branches.
  std::vector<std::string> plain;
  for (const auto& f : flags)
    if (f != "--coverage" && f != "-fprofile-arcs" && f != "-ftest-coverage") plain.push_back(f);
  auto h = detail::run_compiler(cfg, plain, {"-c", "scopt_harness.c", "-o", "scopt_harness.o"}, workdir,
                                workdir / "scopt_harness.o");
  if (!h.ok) return h;
  auto o = detail::run_compiler(cfg, flags, {"-c", name + "_instr.c", "-o", name + "_instr.o"}, workdir,
                                workdir / (name + "_instr.o"));
  if (!o.ok) return o;
  return detail::run_compiler(cfg, flags, {name + "_instr.o", "scopt_harness.o", "-o", bin.string(), "-lm"},
                              workdir, bin);
}

}  // namespace scopt
