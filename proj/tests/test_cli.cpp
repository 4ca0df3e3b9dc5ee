#include <gtest/gtest.h>

#include <set>

#include "scopt/io/document.hpp"
#include "scopt/scop/region.hpp"
#include "scopt/synth/synthesizer.hpp"
#include "scopt/util/process.hpp"

using namespace scopt;

namespace {

const fs::path kSuite = fs::path(SCOPT_TEST_DATA) / "suite";

ProcessResult cli(std::vector<std::string> args, const std::map<std::string, std::string>& env = {},
                  const fs::path& cwd = {}) {
  args.insert(args.begin(), SCOPT_CLI_PATH);
  ProcessOptions opts;
  opts.env = env;
  opts.cwd = cwd;
  opts.timeout_seconds = 600;
  return run_process(args, opts);
}

json error_doc(const ProcessResult& r) {
  auto doc = json::parse(r.err);
  EXPECT_EQ(doc["schema"], "scopt/1");
  EXPECT_EQ(doc["kind"], "error");
  return doc;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

std::string squeeze(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

}  // namespace

TEST(Cli, SynthIsDeterministicPerSeed) {
  ScratchDir a("cli_synth"), b("cli_synth");
  auto ra = cli({"--seed", "1", "synth", "--count", "5", "--out", a.path().string()});
  auto rb = cli({"--seed", "1", "synth", "--count", "5", "--out", b.path().string()});
  ASSERT_TRUE(ra.ok()) << ra.err;
  ASSERT_TRUE(rb.ok()) << rb.err;
  auto doc = json::parse(ra.out);
  EXPECT_EQ(doc["kind"], "synth-summary");
  EXPECT_EQ(doc["written"].get<int>() + doc["infeasible"].get<int>(), 5);
  EXPECT_EQ(dir_contents(a.path()), dir_contents(b.path()));
  EXPECT_EQ(dir_contents(a.path()).size(), 2u * doc["written"].get<std::size_t>());
}

TEST(Cli, VerifyOfAProgramAgainstItselfPasses) {
  auto r = cli({"--no-timing", "verify", (kSuite / "prefix.c").string(), (kSuite / "prefix.c").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto doc = json::parse(r.out);
  EXPECT_EQ(doc["kind"], "verification");
  EXPECT_EQ(doc["verdict"]["verdict"], "Pass");
}

TEST(Cli, VerifyFailureExitsOneWithAnErrorDocument) {
  ScratchDir d("cli_verify");
  std::string src = read_file(kSuite / "prefix.c");
  std::string bad = src;
  auto at = bad.find("s[i - 1] + x[i]");
  ASSERT_NE(at, std::string::npos);
  bad.replace(at, 15, "s[i - 1] - x[i]");
  write_file(d.path() / "bad.c", bad);
  auto r = cli({"--no-timing", "verify", (kSuite / "prefix.c").string(), (d.path() / "bad.c").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.out)["verdict"]["verdict"], "IA");
  EXPECT_EQ(error_doc(r)["error"], "VerificationFailed");
}

TEST(Cli, MissingCompilerIsAnEnvironmentError) {
  auto r = cli({"--cc", "/nonexistent/cc", "verify", (kSuite / "prefix.c").string(), (kSuite / "prefix.c").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_doc(r)["error"], "CompilerNotFound");
}

TEST(Cli, UsageErrorsExitOne) {
  auto unknown = cli({"--set", "no.such.key=1", "config"});
  EXPECT_EQ(unknown.exit_code, 1);
  EXPECT_EQ(error_doc(unknown)["error"], "InvalidArgument");

  auto missing = cli({"optimize"});
  EXPECT_EQ(missing.exit_code, 1);
  EXPECT_EQ(error_doc(missing)["error"], "InvalidArgument");

  auto no_fixture = cli({"--provider", "replay", "optimize", (kSuite / "prefix.c").string()});
  EXPECT_EQ(no_fixture.exit_code, 1);
  EXPECT_EQ(error_doc(no_fixture)["error"], "InvalidArgument");
}

TEST(Cli, ConfigLayersFileThenFlagsThenEnvironment) {
  ScratchDir d("cli_config");
  write_file(d.path() / "c.json", R"({"k": 3, "retrieval": {"top_n": 4, "wr": [2, 1, 1]}, "llm": {"api_key": "s3cret"}})");
  std::string file = (d.path() / "c.json").string();

  auto base = json::parse(cli({"--config", file, "config"}).out);
  EXPECT_EQ(base["k"], 3);
  EXPECT_EQ(base["retrieval"]["top_n"], 4);
  EXPECT_EQ(base["retrieval"]["wr"], json::parse("[2.0, 1.0, 1.0]"));
  EXPECT_EQ(base["llm"]["api_key"], "<set>");
  EXPECT_EQ(base["seed"], 0);

  auto flagged = json::parse(cli({"--config", file, "--k", "5", "--set", "retrieval.top_n=6", "config"}).out);
  EXPECT_EQ(flagged["k"], 5);
  EXPECT_EQ(flagged["retrieval"]["top_n"], 6);

  auto env = json::parse(cli({"--config", file, "--k", "5", "config"}, {{"SCOPT_K", "9"}, {"SCOPT_RETRIEVAL_DEMOS", "2"}}).out);
  EXPECT_EQ(env["k"], 9);
  EXPECT_EQ(env["retrieval"]["demos"], 2);
}

TEST(Cli, DatasetIndexAndRetrieveRoundTrip) {
  ScratchDir d("cli_data");
  auto ex = d.path() / "examples", data = d.path() / "dataset", idx = d.path() / "index";
  ASSERT_TRUE(cli({"--seed", "3", "synth", "--count", "6", "--out", ex.string()}).ok());
  auto built = cli({"--no-timing", "dataset", "build", "--examples", ex.string(), "--out", data.string()});
  ASSERT_TRUE(built.ok()) << built.err;
  auto summary = json::parse(built.out);
  std::size_t examples = dir_contents(ex).size() / 2;
  EXPECT_EQ(summary["admitted"].get<std::size_t>() + summary["excluded"].size(), examples);
  EXPECT_GE(summary["admitted"].get<std::size_t>(), 1u);

  auto indexed = cli({"--dataset", data.string(), "index", "build", "--out", idx.string()});
  ASSERT_TRUE(indexed.ok()) << indexed.err;
  EXPECT_EQ(json::parse(indexed.out)["records"], summary["admitted"]);

  // An admitted example retrieved against itself matches every feature type.
  std::string id = fs::directory_iterator(data)->path().stem().string();
  auto got = cli({"--index", idx.string(), "--top-n", "3", "retrieve", (ex / (id + ".c")).string(), "--explain"});
  ASSERT_TRUE(got.ok()) << got.err;
  auto hits = json::parse(got.out)["hits"];
  ASSERT_FALSE(hits.empty());
  bool found = false;
  for (const auto& h : hits)
    if (h["id"] == id) {
      found = true;
      EXPECT_DOUBLE_EQ(h["breakdown"]["s_w"].get<double>(), 3.0);
    }
  EXPECT_TRUE(found);
  for (std::size_t k = 1; k < hits.size(); ++k) EXPECT_GE(hits[k - 1]["score"], hits[k]["score"]);
}

TEST(Cli, DatasetExcludesExamplesWhoseOptimizationFailsVerification) {
  ScratchDir d("cli_gate");
  auto ex = d.path() / "examples", data = d.path() / "dataset";
  ASSERT_TRUE(cli({"--seed", "7", "synth", "--count", "3", "--out", ex.string()}).ok());
  // A stand-in tool that empties the region body: never a correct rewrite.
  write_file(d.path() / "breaker",
             "#!/bin/sh\nsed '/#pragma scop/,/#pragma endscop/{/#pragma/!d}' in.c > out.c\n");
  fs::permissions(d.path() / "breaker", fs::perms::owner_all);
  auto r = cli({"--no-timing", "--backend", "external", "--set", "backend_path=" + (d.path() / "breaker").string(),
                "dataset", "build", "--examples", ex.string(), "--out", data.string()});
  ASSERT_TRUE(r.ok()) << r.err;
  auto summary = json::parse(r.out);
  EXPECT_EQ(summary["admitted"], 0);
  ASSERT_EQ(summary["excluded"].size(), dir_contents(ex).size() / 2);
  for (const auto& e : summary["excluded"])
    EXPECT_EQ(e["reason"].get<std::string>().rfind("VerificationFailed", 0), 0u) << e["reason"];
  EXPECT_TRUE(fs::is_empty(data));
}

TEST(Cli, OptimizeWritesProgramAndReports) {
  ScratchDir d("cli_opt");
  auto out = d.path() / "atx.opt.c";
  auto r = cli({"--provider", "replay", "--fixture", (kSuite / "atx.fixture.json").string(), "optimize",
                (kSuite / "atx.c").string(), "--out", out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto doc = json::parse(r.out);
  EXPECT_EQ(doc["status"], "selected");
  EXPECT_GT(doc["speedup"].get<double>(), 1.0);
  auto report = parse_document(read_file(d.path() / "atx.opt.report.json"), "run-report");
  EXPECT_EQ(report["selected"], 8);
  EXPECT_EQ(report["attempts"][7]["step"], 2);
  EXPECT_EQ(report["attempts"][7]["regenerated_from"], 1);
  auto timing = parse_document(read_file(d.path() / "atx.opt.timing.json"), "run-timing");
  EXPECT_GT(timing["original_time"].get<double>(), timing["final_time"].get<double>());
  EXPECT_NE(read_file(out).find("for (j = 0; j < N; j++)\n    for (i = 0; i < N; i++)"), std::string::npos);
}

TEST(Cli, OptimizeWithoutAPassingCandidateExitsOne) {
  ScratchDir d("cli_opt");
  auto out = d.path() / "prefix.opt.c";
  auto r = cli({"--no-timing", "--provider", "replay", "--fixture", (kSuite / "prefix.fixture.json").string(),
                "optimize", (kSuite / "prefix.c").string(), "--out", out.string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(error_doc(r)["error"], "NoImprovement");
  EXPECT_EQ(read_file(out), read_file(kSuite / "prefix.c"));
}

TEST(Cli, BenchMatchesTheGoldenReport) {
  ScratchDir d("cli_bench");
  auto r = cli({"--provider", "replay", "bench", kSuite.string(), "--out", d.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_file(d.path() / "bench.json"), read_file(fs::path(SCOPT_SOURCE_DIR) / "tests/golden/bench_report.json"));

  auto timing = parse_document(read_file(d.path() / "bench_timing.json"), "bench-timing");
  const auto& m = timing["metrics"];
  EXPECT_DOUBLE_EQ(m["pass_at_k"].get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(m["percent_faster"].get<double>(), 75.0);
  // Measured: gemm about 2x, the other two about 4x, prefix 0.
  auto speedups = m["speedups"];
  ASSERT_EQ(speedups.size(), 4u);
  EXPECT_GT(speedups[0].get<double>(), 2.0);
  EXPECT_GT(speedups[1].get<double>(), 2.0);
  EXPECT_GT(speedups[2].get<double>(), 1.3);
  EXPECT_EQ(speedups[3].get<double>(), 0.0);
  double mean = (speedups[0].get<double>() + speedups[1].get<double>() + speedups[2].get<double>()) / 4;
  EXPECT_NEAR(m["mean_speedup"].get<double>(), mean, 1e-9);
  EXPECT_NE(r.out.find("pass@7 75.0%"), std::string::npos) << r.out;
}

TEST(Suite, NoSynthesizedProgramEqualsABundledKernel) {
  std::set<std::string> kernels;
  for (const auto& e : fs::directory_iterator(kSuite))
    if (e.path().extension() == ".c") kernels.insert(squeeze(extract_scop_region(read_file(e.path())).scop));
  ASSERT_EQ(kernels.size(), 4u);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto ex = synthesize(seed).example;
    if (!ex) continue;
    EXPECT_FALSE(kernels.count(squeeze(extract_scop_region(ex->program).scop))) << "seed " << seed;
  }
}
