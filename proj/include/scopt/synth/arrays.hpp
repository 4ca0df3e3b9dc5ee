#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scopt/scop/model.hpp"
#include "scopt/synth/params.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// One array dimension of a synthesized subscript: the iterator at
/// `level` (0-based) plus a constant offset.
struct IndexTerm {
  int level = 0;
  std::int64_t offset = 0;
  friend bool operator==(const IndexTerm&, const IndexTerm&) = default;
};
using IndexDraft = std::vector<IndexTerm>;

enum class DepLink { None, Write, Read };

/// An access before resolution. Dependence-origin entries name the
/// statement whose write they derive from; their name and index stay empty
/// until resolve_arrays. The no-dep alternative is kept so a dropped link
/// can fall back to it.
struct PendingArray {
  AccessKind kind = AccessKind::Read;
  DepLink link = DepLink::None;
  int source = -1;
  std::string name;
  IndexDraft index;
  std::string alt_name;
  IndexDraft alt_index;
  std::vector<std::int64_t> distance;  // drawn at resolution, one entry per dimension

  bool unresolved() const { return name.empty(); }
};

struct ArrayPlan {
  std::vector<int> depth;                            // loop depth per statement
  std::vector<std::vector<PendingArray>> accesses;   // per statement; [0] is the write
  std::map<std::string, std::vector<std::string>> shapes;  // array -> size parameter per dimension
};

namespace detail {

inline IndexDraft random_index(std::size_t rank, int depth, int max_offset, Rng& rng) {
  IndexDraft idx(rank);
  for (auto& t : idx) {
    t.level = static_cast<int>(rng.uniform(0, depth - 1));
    t.offset = rng.uniform(-max_offset, max_offset);
  }
  return idx;
}

}  // namespace detail

/// Draws the array shapes, the no-dep alternatives of every access and the
/// dependence links, then applies the priority rule: a dependence-origin
/// entry replaces the alternative at its slot.
inline ArrayPlan assign_arrays(const LoopParameters& p, const std::vector<Schedule>& schedules, const SynthConfig& cfg,
                               std::uint64_t seed) {
  ArrayPlan plan;
  const int n = static_cast<int>(schedules.size());
  {
    Rng rng = Rng::stream(seed, "shapes");
    int max_rank = std::min(cfg.max_rank, p.loop_depth);
    for (const auto& name : cfg.names) {
      auto rank = static_cast<std::size_t>(rng.uniform(1, max_rank));
      auto& dims = plan.shapes[name];
      for (std::size_t d = 0; d < rank; ++d)
        dims.push_back(cfg.sizes[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(cfg.sizes.size()) - 1))].name);
    }
  }
  for (int s = 0; s < n; ++s) {
    const int depth = static_cast<int>(schedules[static_cast<std::size_t>(s)].depth());
    plan.depth.push_back(depth);

    // No-dep alternatives: this statement's pool of names and fresh indexes.
    Rng alt = Rng::stream(seed, "alternatives", static_cast<std::uint64_t>(s));
    std::vector<std::string> pool = cfg.names;
    alt.shuffle(pool);
    pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(p.array_list)));
    auto alternative = [&](AccessKind kind) {
      PendingArray a;
      a.kind = kind;
      a.alt_name = pool[static_cast<std::size_t>(alt.uniform(0, static_cast<std::int64_t>(pool.size()) - 1))];
      a.alt_index = detail::random_index(plan.shapes[a.alt_name].size(), depth, p.array_indexes, alt);
      a.name = a.alt_name;
      a.index = a.alt_index;
      return a;
    };
    std::vector<PendingArray> row;
    row.push_back(alternative(AccessKind::Write));
    auto nreads = static_cast<int>(alt.uniform(1, p.read_array));
    for (int r = 0; r < nreads; ++r) row.push_back(alternative(AccessKind::Read));

    // Dependence links.
    Rng dep = Rng::stream(seed, "dependences", static_cast<std::uint64_t>(s));
    if (n > 1 && dep.percent(p.write_dep_prob)) {
      int src = static_cast<int>(dep.uniform(0, n - 2));
      if (src >= s) ++src;
      row[0].link = DepLink::Write;
      row[0].source = src;
    }
    auto ndep = static_cast<int>(dep.uniform(0, p.read_dep));
    std::vector<int> slots;
    for (int r = 1; r <= nreads; ++r) slots.push_back(r);
    dep.shuffle(slots);
    for (int k = 0; k < std::min(ndep, nreads); ++k) {
      auto& a = row[static_cast<std::size_t>(slots[static_cast<std::size_t>(k)])];
      a.link = DepLink::Read;
      a.source = static_cast<int>(dep.uniform(0, n - 1));
    }
    for (auto& a : row)
      if (a.link != DepLink::None) {
        a.name.clear();
        a.index.clear();
      }
    plan.accesses.push_back(std::move(row));
  }
  return plan;
}

/// A dependence link owner -> source. Self-reads are not links: a read of
/// the statement's own write never needs another statement's information.
struct DepEdge {
  int owner = 0;
  int source = 0;
  std::size_t slot = 0;
};

inline std::vector<DepEdge> dependence_edges(const ArrayPlan& plan) {
  std::vector<DepEdge> edges;
  for (std::size_t s = 0; s < plan.accesses.size(); ++s)
    for (std::size_t k = 0; k < plan.accesses[s].size(); ++k) {
      const auto& a = plan.accesses[s][k];
      if (a.link == DepLink::None || a.source == static_cast<int>(s)) continue;
      edges.push_back({static_cast<int>(s), a.source, k});
    }
  return edges;
}

/// Finds one cycle in the statement graph, as the list of edges along it.
inline std::optional<std::vector<DepEdge>> find_cycle(const std::vector<DepEdge>& edges, int nstmts) {
  std::vector<std::vector<DepEdge>> out(static_cast<std::size_t>(nstmts));
  for (const auto& e : edges) out[static_cast<std::size_t>(e.owner)].push_back(e);
  std::vector<int> color(static_cast<std::size_t>(nstmts), 0);
  std::vector<DepEdge> stack;
  std::optional<std::vector<DepEdge>> found;
  std::function<bool(int)> dfs = [&](int v) {
    color[static_cast<std::size_t>(v)] = 1;
    for (const auto& e : out[static_cast<std::size_t>(v)]) {
      stack.push_back(e);
      int w = e.source;
      if (color[static_cast<std::size_t>(w)] == 1) {
        auto start = std::find_if(stack.begin(), stack.end(), [&](const DepEdge& x) { return x.owner == w; });
        found = std::vector<DepEdge>(start, stack.end());
        return true;
      }
      if (color[static_cast<std::size_t>(w)] == 0 && dfs(w)) return true;
      stack.pop_back();
    }
    color[static_cast<std::size_t>(v)] = 2;
    return false;
  };
  for (int v = 0; v < nstmts; ++v)
    if (color[static_cast<std::size_t>(v)] == 0 && dfs(v)) return found;
  return std::nullopt;
}

/// Breaks every circular dependence by dropping, on each cycle, the link
/// owned by the statement that comes last in schedule order (statement ids
/// are schedule order). The dropped entry reverts to its no-dep alternative.
/// Returns the number of links dropped.
inline int check_circular_dependence(ArrayPlan& plan) {
  int dropped = 0;
  const int n = static_cast<int>(plan.accesses.size());
  while (auto cycle = find_cycle(dependence_edges(plan), n)) {
    const DepEdge* last = &cycle->front();
    for (const auto& e : *cycle)
      if (e.owner > last->owner) last = &e;
    auto& a = plan.accesses[static_cast<std::size_t>(last->owner)][last->slot];
    a.link = DepLink::None;
    a.source = -1;
    a.name = a.alt_name;
    a.index = a.alt_index;
    ++dropped;
  }
  return dropped;
}

/// Resolves dependence-origin entries: the name comes from the source
/// statement's write and the index is the source's write index (mapped to
/// the owner's loop levels) plus a constant distance drawn within
/// +-dep_distance per dimension. Requires an acyclic plan.
inline void resolve_arrays(ArrayPlan& plan, const LoopParameters& p, std::uint64_t seed) {
  const auto n = plan.accesses.size();
  std::vector<int> state(n, 0);
  std::function<void(std::size_t)> resolve_write;
  auto derive = [&](PendingArray& a, std::size_t owner, std::size_t slot) {
    auto src = static_cast<std::size_t>(a.source);
    const PendingArray& w = plan.accesses[src][0];
    Rng rng = Rng::stream(seed, "distance", owner * 16 + slot);
    a.name = w.name;
    a.index.clear();
    a.distance.clear();
    for (const auto& t : w.index) {
      std::int64_t d = rng.uniform(-p.dep_distance, p.dep_distance);
      a.distance.push_back(d);
      a.index.push_back({std::min(t.level, plan.depth[owner] - 1), t.offset + d});
    }
  };
  resolve_write = [&](std::size_t s) {
    if (state[s] == 2) return;
    state[s] = 2;
    auto& w = plan.accesses[s][0];
    if (w.link == DepLink::None) return;
    resolve_write(static_cast<std::size_t>(w.source));
    derive(w, s, 0);
  };
  for (std::size_t s = 0; s < n; ++s) resolve_write(s);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t k = 1; k < plan.accesses[s].size(); ++k) {
      auto& a = plan.accesses[s][k];
      if (a.link == DepLink::Read) derive(a, s, k);
    }
}

}  // namespace scopt
