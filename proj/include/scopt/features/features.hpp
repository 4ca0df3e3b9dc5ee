#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "scopt/scop/dependence.hpp"
#include "scopt/scop/model.hpp"

namespace scopt {

/// Feature types compared per statement: the schedule, the write index
/// matrices and the read index matrices.
enum class FeatureType { Schedule = 0, Write = 1, Read = 2 };
inline constexpr std::size_t kFeatureTypes = 3;

struct StatementFeatures {
  std::vector<int> schedule_const;
  std::vector<std::string> schedule_iters;
  std::vector<std::string> write_features;  // canonical matrices
  std::vector<std::string> read_features;

  /// The schedule as one comparable item, e.g. "0,1,0,0|i,k,j".
  std::string schedule_item() const {
    std::string s;
    for (std::size_t k = 0; k < schedule_const.size(); ++k) s += (k ? "," : "") + std::to_string(schedule_const[k]);
    s += "|";
    for (std::size_t k = 0; k < schedule_iters.size(); ++k) s += (k ? "," : "") + schedule_iters[k];
    return s;
  }

  std::vector<std::string> items(FeatureType t) const {
    switch (t) {
      case FeatureType::Schedule: return {schedule_item()};
      case FeatureType::Write: return write_features;
      case FeatureType::Read: return read_features;
    }
    return {};
  }

  std::size_t count(FeatureType t) const {
    return t == FeatureType::Schedule ? 1 : items(t).size();
  }

  friend bool operator==(const StatementFeatures&, const StatementFeatures&) = default;
};

struct FeatureSet {
  std::vector<StatementFeatures> statements;  // schedule order

  std::size_t nstmts() const { return statements.size(); }
  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
};

/// Column groups an access keeps, decided by the dependences it takes part in.
struct ColumnSelection {
  bool iterators = true;
  bool constant = true;
};

namespace detail {

inline std::map<std::pair<int, int>, ColumnSelection> column_selection(const std::vector<Dependence>& deps) {
  // An access in loop-independent dependences only keeps its constant
  // column; loop-carried ones keep both. Accesses in no dependence keep both.
  std::map<std::pair<int, int>, std::pair<bool, bool>> seen;  // (any dep, any carried)
  for (const auto& d : deps)
    for (auto key : {std::pair{d.source_stmt, d.source_ref}, std::pair{d.target_stmt, d.target_ref}}) {
      auto& [any, carried] = seen[key];
      any = true;
      carried = carried || d.loop_carried();
    }
  std::map<std::pair<int, int>, ColumnSelection> out;
  for (const auto& [key, v] : seen) out[key] = ColumnSelection{v.second, true};
  return out;
}

}  // namespace detail

/// Canonical text of an index matrix after column selection and removal of
/// all-zero columns: "RxC:r0c0,r0c1;r1c0,..." for the iterator and parameter
/// block, then "|c:k0;k1..." for a surviving constant column.
inline std::string canonical_matrix(const IndexMatrix& m, ColumnSelection keep) {
  const std::size_t rows = m.rows.size();
  const std::size_t cols = m.columns.size();
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c + 1 < cols; ++c) {
    if (!keep.iterators) break;
    bool nonzero = false;
    for (const auto& r : m.rows) nonzero = nonzero || r[c] != 0;
    if (nonzero) kept.push_back(c);
  }
  std::string out = std::to_string(rows) + "x" + std::to_string(kept.size()) + ":";
  for (std::size_t r = 0; r < rows; ++r) {
    if (r) out += ";";
    for (std::size_t k = 0; k < kept.size(); ++k) out += (k ? "," : "") + std::to_string(m.rows[r][kept[k]]);
  }
  bool constant = false;
  if (keep.constant && cols > 0)
    for (const auto& r : m.rows) constant = constant || r[cols - 1] != 0;
  if (constant) {
    out += "|c:";
    for (std::size_t r = 0; r < rows; ++r) out += (r ? ";" : "") + std::to_string(m.rows[r][cols - 1]);
  }
  return out;
}

inline FeatureSet extract_features(const Scop& scop, const std::vector<Dependence>& deps) {
  auto selection = detail::column_selection(deps);
  FeatureSet fs;
  for (const auto& s : scop.statements) {
    StatementFeatures f;
    f.schedule_const = s.schedule.constants;
    f.schedule_iters = s.schedule.iterators;
    if (!s.opaque) {
      auto iters = scop.iterators_of(s);
      for (int ref = 0; ref < s.access_count(); ++ref) {
        const ArrayAccess* a = s.access(ref);
        auto it = selection.find({s.id, ref});
        ColumnSelection keep = it == selection.end() ? ColumnSelection{} : it->second;
        std::string m = canonical_matrix(index_matrix(*a, iters), keep);
        (ref == 0 ? f.write_features : f.read_features).push_back(std::move(m));
      }
    }
    fs.statements.push_back(std::move(f));
  }
  return fs;
}

inline nlohmann::ordered_json to_json(const FeatureSet& fs) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& s : fs.statements)
    out.push_back({{"schedule_const", s.schedule_const},
                   {"schedule_iters", s.schedule_iters},
                   {"write", s.write_features},
                   {"read", s.read_features}});
  return out;
}

inline FeatureSet features_from_json(const nlohmann::ordered_json& j) {
  FeatureSet fs;
  for (const auto& s : j) {
    StatementFeatures f;
    f.schedule_const = s.at("schedule_const").get<std::vector<int>>();
    f.schedule_iters = s.at("schedule_iters").get<std::vector<std::string>>();
    f.write_features = s.at("write").get<std::vector<std::string>>();
    f.read_features = s.at("read").get<std::vector<std::string>>();
    fs.statements.push_back(std::move(f));
  }
  return fs;
}

}  // namespace scopt
