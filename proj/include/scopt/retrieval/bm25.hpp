#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scopt/scop/lexer.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

/// Token multiset of code: identifiers, keywords, numbers and operators.
/// Comments and whitespace vanish in the lexer.
using TokenCounts = std::map<std::string, int>;

inline std::vector<std::string> tokenize(std::string_view code) {
  std::vector<std::string> out;
  for (auto& t : lex_c(code))
    if (t.kind != Token::Kind::End) out.push_back(std::move(t.text));
  return out;
}

inline TokenCounts token_counts(std::string_view code) {
  TokenCounts c;
  for (auto& t : tokenize(code)) ++c[t];
  return c;
}

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Okapi BM25 over an in-memory inverted index. idf uses the
/// ln(1 + (N - n + 0.5) / (n + 0.5)) form, which stays positive.
class Bm25Index {
 public:
  explicit Bm25Index(Bm25Params params = {}) : params_(params) {}

  std::size_t add(const TokenCounts& doc) {
    std::size_t id = lengths_.size();
    int len = 0;
    for (const auto& [term, tf] : doc) {
      postings_[term].push_back({id, tf});
      len += tf;
    }
    lengths_.push_back(len);
    total_length_ += len;
    return id;
  }

  std::size_t size() const { return lengths_.size(); }

  double idf(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0.0;
    double n = static_cast<double>(it->second.size());
    double N = static_cast<double>(size());
    return std::log(1.0 + (N - n + 0.5) / (n + 0.5));
  }

  /// Scores of every document for the query's distinct terms.
  std::vector<double> score_all(const TokenCounts& query) const {
    std::vector<double> scores(size(), 0.0);
    if (size() == 0) return scores;
    double avgdl = static_cast<double>(total_length_) / static_cast<double>(size());
    for (const auto& [term, qtf] : query) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      double w = idf(term);
      for (const auto& [doc, tf] : it->second) {
        double norm = params_.k1 * (1 - params_.b + params_.b * lengths_[doc] / (avgdl > 0 ? avgdl : 1.0));
        scores[doc] += w * tf * (params_.k1 + 1) / (tf + norm);
      }
    }
    return scores;
  }

  double score(const TokenCounts& query, std::size_t doc) const {
    if (doc >= size()) throw Error(ErrorKind::UnknownDoc, "document " + std::to_string(doc));
    return score_all(query)[doc];
  }

 private:
  struct Posting {
    std::size_t doc;
    int tf;
  };
  Bm25Params params_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::vector<int> lengths_;
  long long total_length_ = 0;
};

}  // namespace scopt
