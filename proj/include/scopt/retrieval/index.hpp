#pragma once

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/retrieval/bm25.hpp"
#include "scopt/retrieval/lascore.hpp"
#include "scopt/retrieval/record.hpp"
#include "scopt/scop/region.hpp"
#include "scopt/util/process.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// Text of the SCoP between the markers; BM25 compares SCoPs, not whole files.
inline std::string scop_text(std::string_view program) { return extract_scop_region(program).scop; }

/// Immutable after construction: records plus the BM25 statistics over
/// their SCoP tokens.
class RetrievalIndex {
 public:
  RetrievalIndex(std::vector<DatasetRecord> records, Bm25Params bm25 = {}, std::string content_hash = "")
      : records_(std::move(records)), bm25_(bm25), params_(bm25), hash_(std::move(content_hash)) {
    for (const auto& r : records_) bm25_.add(token_counts(scop_text(r.example_source)));
  }

  const std::vector<DatasetRecord>& records() const { return records_; }
  const Bm25Index& bm25() const { return bm25_; }
  Bm25Params bm25_params() const { return params_; }
  const std::string& content_hash() const { return hash_; }

 private:
  std::vector<DatasetRecord> records_;
  Bm25Index bm25_;
  Bm25Params params_;
  std::string hash_;
};

struct RetrievalHit {
  const DatasetRecord* record = nullptr;
  ScoreBreakdown score;
};

struct RetrievalResult {
  std::vector<RetrievalHit> hits;
  bool corpus_smaller_than_n = false;
};

/// The query side of retrieval: a target's features and SCoP tokens.
struct RetrievalQuery {
  FeatureSet features;
  TokenCounts tokens;
};

inline RetrievalQuery make_query(std::string_view program) {
  RetrievalQuery q;
  q.features = analyze_program(program).features;
  q.tokens = token_counts(scop_text(program));
  return q;
}

inline std::vector<RetrievalHit> score_all(const RetrievalQuery& q, const RetrievalIndex& index,
                                           const RetrievalConfig& cfg) {
  auto bm = index.bm25().score_all(q.tokens);
  std::vector<RetrievalHit> hits;
  for (std::size_t d = 0; d < index.records().size(); ++d) {
    RetrievalHit h;
    h.record = &index.records()[d];
    h.score = weighted_score(q.features, h.record->features, cfg);
    h.score.s_b = bm[d];
    h.score.la = h.score.s_b + h.score.s_w;
    hits.push_back(std::move(h));
  }
  return hits;
}

/// Top-n records by LAScore, ties broken by record id.
inline RetrievalResult retrieve_top_n(const RetrievalQuery& q, const RetrievalIndex& index, const RetrievalConfig& cfg) {
  cfg.validate();
  if (index.records().empty()) throw Error(ErrorKind::EmptyCorpus, "the index holds no records");
  RetrievalResult out;
  out.hits = score_all(q, index, cfg);
  std::sort(out.hits.begin(), out.hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score.la != b.score.la) return a.score.la > b.score.la;
    return a.record->id < b.record->id;
  });
  out.corpus_smaller_than_n = out.hits.size() < cfg.top_n;
  if (out.hits.size() > cfg.top_n) out.hits.resize(cfg.top_n);
  return out;
}

/// Draws cfg.demos hits uniformly without replacement, keeping rank order.
inline std::vector<RetrievalHit> pick_demonstrations(const std::vector<RetrievalHit>& ranked,
                                                     const RetrievalConfig& cfg, Rng& rng) {
  std::vector<std::size_t> order(ranked.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  order.resize(std::min(order.size(), cfg.demos));
  std::sort(order.begin(), order.end());
  std::vector<RetrievalHit> out;
  for (auto k : order) out.push_back(ranked[k]);
  return out;
}

// ---------------------------------------------------------------- persistence

inline constexpr const char* kIndexFile = "index.json";

/// Hash over the record sidecars (name and content) of a dataset directory.
inline std::string dataset_hash(const fs::path& dataset) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dataset))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a64("");
  for (const auto& f : files) {
    h = fnv1a64(f.filename().string(), h);
    h = fnv1a64(read_file(f), h);
  }
  return hex64(h);
}

/// Records of a dataset directory (one "record" document per sidecar),
/// sorted by id. Each is validated against its example source.
inline std::vector<DatasetRecord> load_dataset(const fs::path& dataset, bool validate = true) {
  if (!fs::is_directory(dataset)) throw Error(ErrorKind::IoError, "no dataset directory " + dataset.string());
  std::vector<DatasetRecord> records;
  for (const auto& e : fs::directory_iterator(dataset)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    json doc = parse_document(read_file(e.path()), "");
    if (doc.value("kind", "") != "record") continue;
    records.push_back(record_from_json(doc));
    if (validate) validate_record(records.back());
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return records;
}

inline void save_index(const RetrievalIndex& index, const fs::path& dir) {
  json doc = document("index");
  doc["content_hash"] = index.content_hash();
  doc["bm25"] = {{"k1", index.bm25_params().k1}, {"b", index.bm25_params().b}};
  json records = json::array();
  for (const auto& r : index.records()) records.push_back(to_json(r));
  doc["records"] = records;
  write_file(dir / kIndexFile, dump_document(doc));
}

inline RetrievalIndex load_index(const fs::path& dir) {
  json doc = parse_document(read_file(dir / kIndexFile), "index");
  std::vector<DatasetRecord> records;
  for (const auto& r : doc.at("records")) records.push_back(record_from_json(r));
  Bm25Params p{doc.at("bm25").at("k1").get<double>(), doc.at("bm25").at("b").get<double>()};
  return RetrievalIndex(std::move(records), p, doc.at("content_hash").get<std::string>());
}

/// Builds (or reuses, when the stored hash matches the dataset) the index.
/// Returns true in `rebuilt` when the index was written anew.
inline RetrievalIndex build_index(const fs::path& dataset, const fs::path& out, Bm25Params bm25 = {},
                                  bool* rebuilt = nullptr) {
  std::string hash = dataset_hash(dataset);
  if (fs::exists(out / kIndexFile)) {
    RetrievalIndex existing = load_index(out);
    if (existing.content_hash() == hash && existing.bm25_params().k1 == bm25.k1 &&
        existing.bm25_params().b == bm25.b) {
      if (rebuilt) *rebuilt = false;
      return existing;
    }
  }
  RetrievalIndex index(load_dataset(dataset), bm25, hash);
  if (index.records().empty()) throw Error(ErrorKind::EmptyCorpus, "dataset " + dataset.string() + " has no records");
  save_index(index, out);
  if (rebuilt) *rebuilt = true;
  return index;
}

}  // namespace scopt
