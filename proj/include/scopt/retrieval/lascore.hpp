#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>
#include <vector>

#include "scopt/features/features.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

struct RetrievalConfig {
  std::array<double, kFeatureTypes> wr{1.0, 1.0, 1.0};  // reward weight per feature type
  std::array<double, kFeatureTypes> wp{1.0, 1.0, 1.0};  // penalty weight per feature type
  std::size_t top_n = 10;
  std::size_t demos = 3;
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;

  void validate() const {
    for (std::size_t j = 0; j < kFeatureTypes; ++j)
      if (wr[j] < 0 || wp[j] < 0) throw Error(ErrorKind::InvalidArgument, "retrieval weights must be nonnegative");
    if (demos < 1 || top_n < demos) throw Error(ErrorKind::InvalidArgument, "need top_n >= demos >= 1");
  }
};

struct ScoreBreakdown {
  double s_b = 0;  // text similarity
  double s_m = 0;  // statement-count mismatch penalty
  double s_f = 0;  // feature score over paired statements
  double s_w = 0;  // (s_f - s_m) / target statements
  double la = 0;   // s_b + s_w
  std::vector<std::array<double, kFeatureTypes>> reward;   // per paired statement
  std::vector<std::array<double, kFeatureTypes>> penalty;
};

/// Size of the multiset intersection.
inline std::size_t intersection_count(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t n = 0;
  for (auto i = a.begin(), j = b.begin(); i != a.end() && j != b.end();) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline double statement_mismatch(const FeatureSet& target, const FeatureSet& example, const RetrievalConfig& cfg) {
  double wp = 0;
  for (double w : cfg.wp) wp += w;
  auto a = static_cast<long long>(target.nstmts()), b = static_cast<long long>(example.nstmts());
  return static_cast<double>(std::llabs(a - b)) * wp;
}

inline double feature_reward(const StatementFeatures& t, const StatementFeatures& e, FeatureType j,
                             const RetrievalConfig& cfg) {
  return static_cast<double>(intersection_count(t.items(j), e.items(j))) * cfg.wr[static_cast<std::size_t>(j)];
}

/// Penalty for example features the target does not have; never negative.
inline double feature_penalty(const StatementFeatures& t, const StatementFeatures& e, FeatureType j,
                              const RetrievalConfig& cfg) {
  auto common = intersection_count(t.items(j), e.items(j));
  auto extra = e.count(j) > common ? e.count(j) - common : 0;
  return static_cast<double>(extra) * cfg.wp[static_cast<std::size_t>(j)];
}

/// Loop-feature part of the score. Statements pair positionally in
/// schedule order. A feature type the target statement lacks contributes
/// only its (unnormalised) penalty. s_b is left for the caller.
inline ScoreBreakdown weighted_score(const FeatureSet& target, const FeatureSet& example, const RetrievalConfig& cfg) {
  ScoreBreakdown out;
  out.s_m = statement_mismatch(target, example, cfg);
  const std::size_t paired = std::min(target.nstmts(), example.nstmts());
  for (std::size_t i = 0; i < paired; ++i) {
    const auto& t = target.statements[i];
    const auto& e = example.statements[i];
    std::array<double, kFeatureTypes> r{}, p{};
    for (std::size_t j = 0; j < kFeatureTypes; ++j) {
      auto type = static_cast<FeatureType>(j);
      r[j] = feature_reward(t, e, type, cfg);
      p[j] = feature_penalty(t, e, type, cfg);
      auto nf = t.count(type);
      out.s_f += nf == 0 ? -p[j] : (r[j] - p[j]) / static_cast<double>(nf);
    }
    out.reward.push_back(r);
    out.penalty.push_back(p);
  }
  out.s_w = target.nstmts() == 0 ? 0.0 : (out.s_f - out.s_m) / static_cast<double>(target.nstmts());
  out.la = out.s_w;
  return out;
}

}  // namespace scopt
