#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "scopt/features/features.hpp"
#include "scopt/io/document.hpp"
#include "scopt/scop/dependence.hpp"
#include "scopt/scop/program.hpp"
#include "scopt/synth/params.hpp"

namespace scopt {

/// One corpus entry: an example program, its optimized version and the
/// loop information retrieval needs without re-parsing C.
struct DatasetRecord {
  std::string id;
  std::string example_source;
  std::string optimized_source;
  FeatureSet features;
  std::vector<Dependence> dependence_summary;
  std::optional<LoopParameters> params;  // absent for external corpora
  std::string backend;                   // optimizer that produced optimized_source
};

/// Loop information of a program: its SCoP text, features and dependences.
struct AnalyzedProgram {
  ParsedProgram parsed;
  std::vector<Dependence> deps;
  bool best_effort = false;
  FeatureSet features;
};

inline AnalyzedProgram analyze_program(std::string_view source) {
  AnalyzedProgram a;
  a.parsed = parse_program(source);
  auto r = compute_dependences(a.parsed.scop);
  a.deps = std::move(r.deps);
  a.best_effort = r.best_effort;
  a.features = extract_features(a.parsed.scop, a.deps);
  return a;
}

inline DatasetRecord make_record(std::string id, std::string example_source, std::string optimized_source,
                                 std::optional<LoopParameters> params = std::nullopt, std::string backend = "") {
  DatasetRecord r;
  AnalyzedProgram a = analyze_program(example_source);
  r.id = std::move(id);
  r.example_source = std::move(example_source);
  r.optimized_source = std::move(optimized_source);
  r.features = std::move(a.features);
  r.dependence_summary = std::move(a.deps);
  r.params = params;
  r.backend = std::move(backend);
  return r;
}

/// Ingest check: the stored features must be those of the example source.
inline void validate_record(const DatasetRecord& r) {
  AnalyzedProgram a = analyze_program(r.example_source);
  if (a.features != r.features)
    throw Error(ErrorKind::InvalidArgument, "record " + r.id + ": stored features differ from its example source");
}

inline json to_json(const DatasetRecord& r) {
  json doc = document("record");
  doc["id"] = r.id;
  doc["backend"] = r.backend;
  if (r.params) doc["params"] = to_json(*r.params);
  doc["features"] = to_json(r.features);
  doc["dependences"] = to_json(r.dependence_summary);
  doc["example_source"] = r.example_source;
  doc["optimized_source"] = r.optimized_source;
  return doc;
}

inline DatasetRecord record_from_json(const json& doc) {
  DatasetRecord r;
  r.id = doc.at("id").get<std::string>();
  r.backend = doc.value("backend", "");
  if (doc.contains("params")) r.params = parameters_from_json(doc.at("params"));
  r.features = features_from_json(doc.at("features"));
  r.dependence_summary = dependences_from_json(doc.at("dependences"));
  r.example_source = doc.at("example_source").get<std::string>();
  r.optimized_source = doc.at("optimized_source").get<std::string>();
  return r;
}

}  // namespace scopt
