#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scopt/scop/model.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// The ten synthesis knobs plus the seed they were drawn from.
struct LoopParameters {
  int iterator_bounds_prob = 20;  // percent, halves at each deeper level
  int loop_depth = 2;
  int statement_index = 1;
  int num_statements = 1;
  int dep_distance = 1;
  int read_dep = 1;
  int write_dep_prob = 20;  // percent
  int array_list = 1;
  int read_array = 1;
  int array_indexes = 1;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const LoopParameters&, const LoopParameters&) = default;
};

inline constexpr std::array<int, 3> kBoundProbabilities{20, 40, 60};
inline constexpr std::array<int, 3> kWriteDepProbabilities{20, 40, 60};
inline constexpr std::array<int, 3> kReadArrayChoices{1, 3, 5};

inline bool in_range(const LoopParameters& p) {
  auto one_of = [](int v, const std::array<int, 3>& set) { return v == set[0] || v == set[1] || v == set[2]; };
  return one_of(p.iterator_bounds_prob, kBoundProbabilities) && p.loop_depth >= 2 && p.loop_depth <= 4 &&
         p.statement_index >= 1 && p.statement_index <= 3 && p.num_statements >= 1 && p.num_statements <= 6 &&
         p.dep_distance >= 1 && p.dep_distance <= 2 && p.read_dep >= 1 && p.read_dep <= 3 &&
         one_of(p.write_dep_prob, kWriteDepProbabilities) && p.array_list >= 1 && p.array_list <= 3 &&
         one_of(p.read_array, kReadArrayChoices) && p.array_indexes >= 1 && p.array_indexes <= 2;
}

inline LoopParameters sample_parameters(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "parameters");
  auto pick3 = [&](const std::array<int, 3>& set) { return set[static_cast<std::size_t>(rng.uniform(0, 2))]; };
  LoopParameters p;
  p.rng_seed = seed;
  p.iterator_bounds_prob = pick3(kBoundProbabilities);
  p.loop_depth = static_cast<int>(rng.uniform(2, 4));
  p.statement_index = static_cast<int>(rng.uniform(1, 3));
  p.num_statements = static_cast<int>(rng.uniform(1, 6));
  p.dep_distance = static_cast<int>(rng.uniform(1, 2));
  p.read_dep = static_cast<int>(rng.uniform(1, 3));
  p.write_dep_prob = pick3(kWriteDepProbabilities);
  p.array_list = static_cast<int>(rng.uniform(1, 3));
  p.read_array = pick3(kReadArrayChoices);
  p.array_indexes = static_cast<int>(rng.uniform(1, 2));
  return p;
}

/// Pools the parameters draw from. Array sizes are global parameters
/// emitted as macros.
struct SynthConfig {
  std::vector<std::string> names{"A", "B", "C", "D", "E", "F"};
  std::vector<Param> sizes{{"S1", 64}, {"S2", 96}, {"S3", 128}};
  int max_rank = 3;
  int retries = 8;  // extra draws at seed+1 .. seed+retries after an infeasible one
};

/// Iterator names by nesting level.
inline const std::string& level_iterator(std::size_t level) {
  static const std::array<std::string, 4> names{"i", "j", "k", "l"};
  return names.at(level);
}

}  // namespace scopt
