#pragma once

// Brute-force scorer written straight from the score definitions, sharing
// nothing with the library beyond the feature items and token strings.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "scopt/features/features.hpp"

namespace scopt::test {

struct OracleDoc {
  std::string id;
  std::vector<std::string> tokens;
  FeatureSet features;
};

inline double oracle_bm25(const std::vector<std::string>& query, const OracleDoc& doc,
                          const std::vector<OracleDoc>& corpus, double k1 = 1.2, double b = 0.75) {
  double avg = 0;
  for (const auto& d : corpus) avg += static_cast<double>(d.tokens.size());
  avg /= static_cast<double>(corpus.size());
  std::map<std::string, bool> distinct;
  for (const auto& t : query) distinct[t] = true;
  double s = 0;
  for (const auto& [t, unused] : distinct) {
    double n = 0;
    for (const auto& d : corpus)
      for (const auto& x : d.tokens)
        if (x == t) {
          n += 1;
          break;
        }
    if (n == 0) continue;
    double tf = 0;
    for (const auto& x : doc.tokens) tf += x == t;
    double N = static_cast<double>(corpus.size());
    double idf = std::log((N - n + 0.5) / (n + 0.5) + 1);
    s += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * static_cast<double>(doc.tokens.size()) / avg));
  }
  return s;
}

inline int oracle_common(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, int> ca, cb;
  for (const auto& x : a) ca[x]++;
  for (const auto& x : b) cb[x]++;
  int n = 0;
  for (const auto& [k, v] : ca)
    if (cb.count(k)) n += std::min(v, cb[k]);
  return n;
}

inline double oracle_sw(const FeatureSet& t, const FeatureSet& e, const std::vector<double>& wr,
                        const std::vector<double>& wp) {
  double nst = static_cast<double>(t.statements.size()), nse = static_cast<double>(e.statements.size());
  double sm = std::fabs(nst - nse) * (wp[0] + wp[1] + wp[2]);
  double sf = 0;
  for (std::size_t i = 0; i < t.statements.size() && i < e.statements.size(); ++i) {
    const auto& ts = t.statements[i];
    const auto& es = e.statements[i];
    std::vector<std::vector<std::string>> ft{{ts.schedule_item()}, ts.write_features, ts.read_features};
    std::vector<std::vector<std::string>> fe{{es.schedule_item()}, es.write_features, es.read_features};
    for (int j = 0; j < 3; ++j) {
      int common = oracle_common(ft[j], fe[j]);
      double r = common * wr[j];
      int surplus = static_cast<int>(fe[j].size()) - common;
      double p = (surplus > 0 ? surplus : 0) * wp[j];
      if (ft[j].empty()) sf -= p;
      else sf += (r - p) / static_cast<double>(ft[j].size());
    }
  }
  return (sf - sm) / nst;
}

/// Ids ranked by S_B + S_W, best first, ties by id.
inline std::vector<std::string> oracle_ranking(const OracleDoc& target, const std::vector<OracleDoc>& corpus,
                                               const std::vector<double>& wr = {1, 1, 1},
                                               const std::vector<double>& wp = {1, 1, 1}) {
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& d : corpus)
    scored.push_back({oracle_bm25(target.tokens, d, corpus) + oracle_sw(target.features, d.features, wr, wp), d.id});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return std::fabs(a.first - b.first) > 1e-9 ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> ids;
  for (const auto& s : scored) ids.push_back(s.second);
  return ids;
}

}  // namespace scopt::test
