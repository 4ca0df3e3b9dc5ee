#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

struct TimedAttempt {
  int id = 0;
  double time = 0;
};

struct RankResult {
  std::vector<int> order;  // fastest first
  std::string text;        // "2 > 1 > 3"
};

/// Orders passing attempts by mean region time, lower id first on ties.
inline RankResult rank_performance(std::vector<TimedAttempt> passing) {
  if (passing.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to rank");
  std::stable_sort(passing.begin(), passing.end(), [](const TimedAttempt& a, const TimedAttempt& b) {
    return a.time != b.time ? a.time < b.time : a.id < b.id;
  });
  RankResult r;
  for (const auto& p : passing) {
    if (!r.text.empty()) r.text += " > ";
    r.text += std::to_string(p.id);
    r.order.push_back(p.id);
  }
  return r;
}

/// One target's outcome as the suite metrics see it.
struct BenchmarkResult {
  std::string name;
  bool passed = false;  // some generated candidate passed
  double original_time = 0;
  std::optional<double> final_time;
};

inline constexpr double kSpeedupOutlier = 600;

struct SuiteMetrics {
  std::size_t benchmarks = 0;
  double pass_at_k = 0;     // fraction of targets with a passing candidate
  double mean_speedup = 0;  // failures count as 0, outliers excluded
  double faster = 0;        // fraction with speedup > 1
  int outliers = 0;
  std::vector<double> speedups;
};

inline double speedup_of(const BenchmarkResult& b) {
  if (!b.passed || !b.final_time || *b.final_time <= 0) return 0;
  return b.original_time / *b.final_time;
}

inline SuiteMetrics compute_metrics(const std::vector<BenchmarkResult>& results) {
  SuiteMetrics m;
  m.benchmarks = results.size();
  if (results.empty()) return m;
  int passed = 0, faster = 0, counted = 0;
  double sum = 0;
  for (const auto& b : results) {
    double s = speedup_of(b);
    m.speedups.push_back(s);
    passed += b.passed;
    faster += s > 1;
    if (s > kSpeedupOutlier) {
      ++m.outliers;
      continue;
    }
    sum += s;
    ++counted;
  }
  const double n = static_cast<double>(results.size());
  m.pass_at_k = passed / n;
  m.faster = faster / n;
  m.mean_speedup = counted ? sum / counted : 0;
  return m;
}

inline json to_json(const SuiteMetrics& m) {
  return {{"benchmarks", m.benchmarks},     {"pass_at_k", m.pass_at_k}, {"mean_speedup", m.mean_speedup},
          {"percent_faster", 100 * m.faster}, {"outliers_excluded", m.outliers}, {"speedups", m.speedups}};
}

}  // namespace scopt
