#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "scopt/scop/dependence.hpp"
#include "scopt/scop/model.hpp"

namespace scopt {

/// The eight loop properties used to judge corpus diversity, each sorted
/// into four clusters A..D (0..3).
enum class LoopProperty { NStmts, Bound, Depth, Schedule, NDeps, DepType, NArrays, ArraySize };

inline constexpr std::array<LoopProperty, 8> kLoopProperties{
    LoopProperty::NStmts, LoopProperty::Bound,   LoopProperty::Depth,   LoopProperty::Schedule,
    LoopProperty::NDeps,  LoopProperty::DepType, LoopProperty::NArrays, LoopProperty::ArraySize};

inline const char* to_string(LoopProperty p) {
  switch (p) {
    case LoopProperty::NStmts: return "NStmts";
    case LoopProperty::Bound: return "Bound";
    case LoopProperty::Depth: return "Depth";
    case LoopProperty::Schedule: return "Schedule";
    case LoopProperty::NDeps: return "NDeps";
    case LoopProperty::DepType: return "DepType";
    case LoopProperty::NArrays: return "NArrays";
    case LoopProperty::ArraySize: return "ArraySize";
  }
  return "?";
}

struct PropertyValues {
  std::int64_t nstmts = 0;
  std::int64_t bound = 0;     // loops whose bounds mention another iterator or differ from [0, size)
  std::int64_t depth = 0;
  std::int64_t schedule = 0;  // loops in the schedule tree
  std::int64_t ndeps = 0;
  std::int64_t dep_types = 0;
  std::int64_t narrays = 0;
  std::int64_t array_size = 0;  // total elements over all arrays
};

inline PropertyValues loop_properties(const Scop& scop, const std::vector<Dependence>& deps) {
  PropertyValues v;
  auto env = scop.param_values();
  v.nstmts = static_cast<std::int64_t>(scop.statements.size());
  v.depth = static_cast<std::int64_t>(scop.max_depth());
  v.schedule = static_cast<std::int64_t>(scop.loops.size());
  for (const auto& l : scop.loops) {
    bool plain = l.lower.size() == 1 && l.lower[0].is_constant() && l.lower[0].constant == 0 && l.upper.size() == 1 &&
                 l.upper[0].constant == 0 && l.upper[0].coeffs.size() == 1;
    if (plain) {
      const auto& [name, c] = *l.upper[0].coeffs.begin();
      plain = c == 1 && env.count(name);
    }
    if (!plain) ++v.bound;
  }
  v.ndeps = static_cast<std::int64_t>(deps.size());
  std::set<DepType> types;
  for (const auto& d : deps) types.insert(d.type);
  v.dep_types = static_cast<std::int64_t>(types.size());
  v.narrays = static_cast<std::int64_t>(scop.arrays.size());
  for (const auto& [name, info] : scop.arrays) {
    std::int64_t n = 1;
    for (const auto& d : info.dims) n *= d.evaluate(env);
    v.array_size += n;
  }
  return v;
}

/// Cluster 0..3 of a property value. NDeps follows 0-2 / 3-5 / 6-10 / 11+;
/// the other edges are this toolkit's choice.
inline int property_cluster(LoopProperty p, const PropertyValues& v) {
  auto bucket = [](std::int64_t x, std::int64_t b, std::int64_t c, std::int64_t d) {
    return x >= d ? 3 : x >= c ? 2 : x >= b ? 1 : 0;
  };
  switch (p) {
    case LoopProperty::NStmts: return bucket(v.nstmts, 2, 3, 5);
    case LoopProperty::Bound: return bucket(v.bound, 2, 4, 6);
    case LoopProperty::Depth: return bucket(v.depth, 2, 3, 4);
    case LoopProperty::Schedule: return bucket(v.schedule, 3, 5, 8);
    case LoopProperty::NDeps: return bucket(v.ndeps, 3, 6, 11);
    case LoopProperty::DepType: return bucket(v.dep_types, 1, 2, 3);
    case LoopProperty::NArrays: return bucket(v.narrays, 2, 3, 4);
    case LoopProperty::ArraySize: return bucket(v.array_size, 10000, 100000, 1000000);
  }
  return 0;
}

}  // namespace scopt
