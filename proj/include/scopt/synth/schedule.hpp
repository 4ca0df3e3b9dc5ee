#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "scopt/scop/model.hpp"
#include "scopt/synth/params.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// Random schedule matrix: one row of depth+1 constants per statement, each
/// constant below statement_index. Depths are in [1, loop_depth] and one
/// statement always reaches loop_depth.
inline std::vector<std::vector<int>> random_schedules(const LoopParameters& p, Rng& rng) {
  std::vector<std::vector<int>> rows;
  const auto deepest = rng.uniform(0, p.num_statements - 1);
  for (int s = 0; s < p.num_statements; ++s) {
    auto depth = static_cast<std::size_t>(s == deepest ? p.loop_depth : rng.uniform(1, p.loop_depth));
    std::vector<int> row(depth + 1);
    for (auto& c : row) c = static_cast<int>(rng.uniform(0, p.statement_index - 1));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

// Order of two raw rows: constants first; where one row ends and the other
// continues into a loop with the same constant, the statement comes first.
inline bool raw_before(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t l = 0;; ++l) {
    if (a[l] != b[l]) return a[l] < b[l];
    bool leaf_a = l + 1 == a.size(), leaf_b = l + 1 == b.size();
    if (leaf_a || leaf_b) return leaf_a && !leaf_b;
  }
}

inline void renumber(const std::vector<std::vector<int>>& raw, const std::vector<std::size_t>& members,
                     std::size_t level, std::vector<std::vector<int>>& out) {
  int position = 0;
  for (std::size_t i = 0; i < members.size();) {
    std::size_t s = members[i];
    if (level + 1 == raw[s].size()) {
      out[s][level] = position++;
      ++i;
      continue;
    }
    std::vector<std::size_t> group;
    std::size_t j = i;
    while (j < members.size() && raw[members[j]].size() > level + 1 && raw[members[j]][level] == raw[s][level])
      group.push_back(members[j++]);
    for (auto g : group) out[g][level] = position;
    ++position;
    renumber(raw, group, level + 1, out);
    i = j;
  }
}

}  // namespace detail

/// Sorts the rows into a legal interleaving: statements that agree on a
/// constant prefix share those loops, and the constants under every shared
/// prefix become 0, 1, 2, ... in execution order.
inline std::vector<Schedule> reorder_schedules(const std::vector<std::vector<int>>& raw) {
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detail::raw_before(raw[a], raw[b]); });
  std::vector<std::vector<int>> consts(raw.size());
  for (std::size_t s = 0; s < raw.size(); ++s) consts[s].assign(raw[s].size(), 0);
  detail::renumber(raw, order, 0, consts);
  std::vector<Schedule> out;
  for (auto s : order) {
    Schedule sch;
    sch.constants = consts[s];
    for (std::size_t l = 0; l + 1 < consts[s].size(); ++l) sch.iterators.push_back(level_iterator(l));
    out.push_back(std::move(sch));
  }
  return out;
}

inline std::vector<Schedule> generate_schedules(const LoopParameters& p, Rng& rng) {
  return reorder_schedules(random_schedules(p, rng));
}

/// Loop tree realising sorted, legal schedules. Statements are placeholders
/// (no accesses yet); loops carry no bounds.
inline Scop schedule_skeleton(const std::vector<Schedule>& schedules) {
  Scop scop;
  for (const auto& sch : schedules) {
    int container = -1;  // -1 is the top-level body
    auto body = [&]() -> std::vector<Node>& {
      return container < 0 ? scop.body : scop.loops[static_cast<std::size_t>(container)].body;
    };
    for (std::size_t l = 0; l < sch.depth(); ++l) {
      auto pos = static_cast<std::size_t>(sch.constants[l]);
      if (pos < body().size()) {
        container = body()[pos].index;
        continue;
      }
      Loop loop;
      loop.id = static_cast<int>(scop.loops.size());
      loop.iterator = level_iterator(l);
      loop.parent = container;
      loop.depth = static_cast<int>(l) + 1;
      body().push_back({Node::Kind::Loop, loop.id});
      scop.loops.push_back(std::move(loop));
      container = scop.loops.back().id;
    }
    Statement s;
    s.id = static_cast<int>(scop.statements.size());
    body().push_back({Node::Kind::Statement, s.id});
    scop.statements.push_back(std::move(s));
  }
  rebuild_schedules(scop);
  return scop;
}

}  // namespace scopt
