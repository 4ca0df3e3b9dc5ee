#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scopt/scop/dependence.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/synth/params.hpp"
#include "scopt/util/error.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

using json = nlohmann::ordered_json;

/// Every report, sidecar and index file is one JSON document carrying this
/// schema tag.
inline constexpr const char* kSchema = "scopt/1";

inline json document(const std::string& kind) { return json{{"schema", kSchema}, {"kind", kind}}; }

inline std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

inline json parse_document(const std::string& text, const std::string& kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != kSchema)
    throw Error(ErrorKind::InvalidArgument, "document without schema " + std::string(kSchema));
  if (!kind.empty() && doc.value("kind", "") != kind)
    throw Error(ErrorKind::InvalidArgument, "expected a '" + kind + "' document, got '" + doc.value("kind", "") + "'");
  return doc;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json to_json(const LoopParameters& p) {
  return json{{"iterator_bounds_prob", p.iterator_bounds_prob},
              {"loop_depth", p.loop_depth},
              {"statement_index", p.statement_index},
              {"num_statements", p.num_statements},
              {"dep_distance", p.dep_distance},
              {"read_dep", p.read_dep},
              {"write_dep_prob", p.write_dep_prob},
              {"array_list", p.array_list},
              {"read_array", p.read_array},
              {"array_indexes", p.array_indexes},
              {"rng_seed", p.rng_seed}};
}

inline LoopParameters parameters_from_json(const json& j) {
  LoopParameters p;
  p.iterator_bounds_prob = j.at("iterator_bounds_prob").get<int>();
  p.loop_depth = j.at("loop_depth").get<int>();
  p.statement_index = j.at("statement_index").get<int>();
  p.num_statements = j.at("num_statements").get<int>();
  p.dep_distance = j.at("dep_distance").get<int>();
  p.read_dep = j.at("read_dep").get<int>();
  p.write_dep_prob = j.at("write_dep_prob").get<int>();
  p.array_list = j.at("array_list").get<int>();
  p.read_array = j.at("read_array").get<int>();
  p.array_indexes = j.at("array_indexes").get<int>();
  p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return p;
}

inline json to_json(const Dependence& d) {
  return json{{"type", to_string(d.type)},  {"source", d.source_stmt}, {"source_ref", d.source_ref},
              {"target", d.target_stmt},    {"target_ref", d.target_ref}, {"array", d.array},
              {"level", d.level},           {"distance", d.distance}};
}

inline Dependence dependence_from_json(const json& j) {
  Dependence d;
  std::string t = j.at("type").get<std::string>();
  d.type = t == "RAW" ? DepType::RAW : t == "WAW" ? DepType::WAW : DepType::WAR;
  d.source_stmt = j.at("source").get<int>();
  d.source_ref = j.at("source_ref").get<int>();
  d.target_stmt = j.at("target").get<int>();
  d.target_ref = j.at("target_ref").get<int>();
  d.array = j.at("array").get<std::string>();
  d.level = j.at("level").get<int>();
  d.distance = j.at("distance").get<std::vector<std::int64_t>>();
  return d;
}

inline json to_json(const std::vector<Dependence>& deps) {
  json out = json::array();
  for (const auto& d : deps) out.push_back(to_json(d));
  return out;
}

inline std::vector<Dependence> dependences_from_json(const json& j) {
  std::vector<Dependence> out;
  for (const auto& d : j) out.push_back(dependence_from_json(d));
  return out;
}

/// Schedules and access matrices of every statement, for sidecars.
inline json scop_summary(const Scop& scop) {
  json stmts = json::array();
  for (const auto& s : scop.statements) {
    json accesses = json::array();
    auto iters = scop.iterators_of(s);
    for (int ref = 0; ref < s.access_count(); ++ref) {
      const ArrayAccess* a = s.access(ref);
      if (!a) continue;
      IndexMatrix m = index_matrix(*a, iters);
      accesses.push_back({{"array", a->array},
                          {"kind", a->kind == AccessKind::Write ? "write" : "read"},
                          {"columns", m.columns},
                          {"rows", m.rows}});
    }
    stmts.push_back({{"id", s.id}, {"schedule", s.schedule.to_string()}, {"accesses", accesses}});
  }
  json params = json::object();
  for (const auto& p : scop.params) params[p.name] = p.value;
  return json{{"params", params}, {"statements", stmts}};
}

}  // namespace scopt
