#pragma once

#include <algorithm>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scopt/util/process.hpp"
#include "scopt/util/rng.hpp"
#include "scopt/verify/inputs.hpp"

namespace scopt {

struct CoverageReport {
  int branch_total = 0;
  int branch_taken = 0;
  double percent = 100.0;
  bool tool_available = true;

  static CoverageReport of(int total, int taken) {
    return {total, taken, total == 0 ? 100.0 : 100.0 * taken / total, true};
  }
};

/// Branch counts of the lines strictly between `first` and `last` in a
/// .gcov file produced with `gcov -b -c`.
inline CoverageReport parse_gcov(const std::string& text, int first, int last) {
  int total = 0, taken = 0, line = 0;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) {
    if (l.rfind("branch", 0) == 0) {
      if (line <= first || line >= last) continue;
      ++total;
      auto pos = l.find("taken ");
      if (pos != std::string::npos && std::atol(l.c_str() + pos + 6) > 0) ++taken;
      continue;
    }
    auto c1 = l.find(':');
    if (c1 == std::string::npos) continue;
    auto c2 = l.find(':', c1 + 1);
    if (c2 == std::string::npos) continue;
    try {
      line = std::stoi(l.substr(c1 + 1, c2 - c1 - 1));
    } catch (const std::exception&) {
    }
  }
  return CoverageReport::of(total, taken);
}

struct CoverageConfig {
  int saturation = 50;   // consecutive non-improving mutants before stopping
  int max_inputs = 600;  // inputs tried at most
  int fallback_cap = 8;  // inputs kept when gcov is missing
  std::string gcov = "gcov";
  double run_limit_seconds = 600;
  std::uint64_t seed = 0;
};

struct CoverageOutcome {
  std::vector<TestInput> retained;
  CoverageReport report;
  std::vector<double> history;  // cumulative percent after each tried input
  int tried = 0;
};

/// Runs one input through the coverage binary; returns false on a failed
/// run (the input is then ignored).
using CoverageRunner = std::function<bool(const TestInput&)>;
/// Reads cumulative coverage so far.
using CoverageProbe = std::function<CoverageReport()>;

/// Greedy selection: seeds first, then mutants of retained inputs. An input
/// is kept iff it raises the number of taken branches (the first one is
/// always kept). Stops at 100% or after `saturation` fruitless mutants.
inline CoverageOutcome coverage_loop(const std::vector<TestInput>& seeds, const CoverageRunner& run,
                                     const CoverageProbe& probe, const CoverageConfig& cfg) {
  CoverageOutcome out;
  Rng rng = Rng::stream(cfg.seed, "coverage-mutation");
  int best = -1, fruitless = 0, next_id = 0;
  for (const auto& s : seeds) next_id = std::max(next_id, s.id + 1);
  std::size_t seed_pos = 0;
  while (out.tried < cfg.max_inputs) {
    TestInput input;
    if (seed_pos < seeds.size()) {
      input = seeds[seed_pos++];
    } else {
      if (out.retained.empty()) break;
      const auto& base = out.retained[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(out.retained.size()) - 1))];
      auto kind = static_cast<MutationKind>(rng.uniform(0, 2));
      input = mutate(base, kind, rng);
      input.id = next_id++;
    }
    ++out.tried;
    bool ran = run(input);
    CoverageReport now = probe();
    out.history.push_back(now.percent);
    if (ran && now.branch_taken > best) {
      best = now.branch_taken;
      out.retained.push_back(input);
      fruitless = 0;
    } else if (seed_pos >= seeds.size()) {
      ++fruitless;
    }
    out.report = now;
    if (ran && !out.retained.empty() && now.percent >= 100.0) break;
    if (fruitless >= cfg.saturation) break;
  }
  return out;
}

/// Without a coverage tool: the seeds followed by mutants, up to a cap.
inline CoverageOutcome capped_inputs(const std::vector<TestInput>& seeds, const CoverageConfig& cfg) {
  CoverageOutcome out;
  out.report.tool_available = false;
  out.report.percent = 0;
  Rng rng = Rng::stream(cfg.seed, "coverage-mutation");
  int next_id = 0;
  for (const auto& s : seeds) next_id = std::max(next_id, s.id + 1);
  for (const auto& s : seeds)
    if (static_cast<int>(out.retained.size()) < cfg.fallback_cap) out.retained.push_back(s);
  while (static_cast<int>(out.retained.size()) < cfg.fallback_cap && !seeds.empty()) {
    const auto& base = seeds[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(seeds.size()) - 1))];
    TestInput m = mutate(base, static_cast<MutationKind>(rng.uniform(0, 2)), rng);
    m.id = next_id++;
    out.retained.push_back(std::move(m));
  }
  out.tried = static_cast<int>(out.retained.size());
  return out;
}

}  // namespace scopt
