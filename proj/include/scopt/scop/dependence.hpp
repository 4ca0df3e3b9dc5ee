#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "scopt/scop/domain.hpp"
#include "scopt/scop/int_solver.hpp"
#include "scopt/scop/model.hpp"

namespace scopt {

enum class DepType { RAW, WAW, WAR };

inline const char* to_string(DepType t) {
  switch (t) {
    case DepType::RAW: return "RAW";
    case DepType::WAW: return "WAW";
    case DepType::WAR: return "WAR";
  }
  return "?";
}

inline DepType dep_type_for(AccessKind source, AccessKind target) {
  if (source == AccessKind::Write) return target == AccessKind::Write ? DepType::WAW : DepType::RAW;
  return DepType::WAR;
}

/// One dependence between two access references. Accesses are numbered per
/// statement as in Statement::access (0 is the write). `level` is 0 for a
/// loop-independent dependence, otherwise the 1-based loop level carrying
/// it. `distance` spans the shared loops and is the lexicographically
/// smallest distance among all conflicting instance pairs at that level.
struct Dependence {
  DepType type = DepType::RAW;
  int source_stmt = 0;
  int target_stmt = 0;
  int source_ref = 0;
  int target_ref = 0;
  std::string array;
  std::vector<std::int64_t> distance;
  int level = 0;

  bool loop_carried() const { return level > 0; }

  auto key() const { return std::tie(source_stmt, target_stmt, source_ref, target_ref, level); }
  friend bool operator==(const Dependence&, const Dependence&) = default;
  friend bool operator<(const Dependence& a, const Dependence& b) { return a.key() < b.key(); }
};

struct DependenceResult {
  std::vector<Dependence> deps;
  bool best_effort = false;  // computed by scanning, or the scan hit its limit
};

namespace detail {

inline bool unit_coefficients(const Scop& scop) {
  for (const auto& s : scop.statements) {
    auto iters = scop.iterators_of(s);
    for (int ref = 0; ref < s.access_count(); ++ref) {
      const ArrayAccess* a = s.access(ref);
      if (!a) continue;
      for (const auto& idx : a->indices)
        for (const auto& it : iters) {
          auto c = idx.coeff(it);
          if (c != 0 && c != 1) return false;
        }
    }
  }
  return true;
}

}  // namespace detail

/// Exhaustive scan: executes the SCoP, records every access to every cell
/// and pairs conflicting accesses in execution order. Meant for small
/// domains; `max_instances` bounds the work.
inline DependenceResult scan_dependences(const Scop& scop, std::uint64_t max_instances = 2000000) {
  struct Touch {
    int stmt;
    int ref;
    AccessKind kind;
    std::vector<std::int64_t> iters;
  };
  std::map<std::pair<std::string, std::vector<std::int64_t>>, std::vector<Touch>> cells;
  auto params = scop.param_values();
  std::uint64_t seen = 0;
  bool truncated = false;
  execute_scop(scop, [&](const Statement& s, const std::vector<std::int64_t>& iters) {
    if (++seen > max_instances) {
      truncated = true;
      return false;
    }
    std::map<std::string, std::int64_t> env = params;
    for (std::size_t q = 0; q < iters.size(); ++q)
      env[scop.loops.at(static_cast<std::size_t>(s.loops[q])).iterator] = iters[q];
    auto touch = [&](int ref) {
      const ArrayAccess* a = s.access(ref);
      std::vector<std::int64_t> cell;
      for (const auto& idx : a->indices) cell.push_back(idx.evaluate(env));
      cells[{a->array, cell}].push_back({s.id, ref, a->kind, iters});
    };
    if (s.opaque) return true;
    for (int ref = 1; ref < s.access_count(); ++ref) touch(ref);
    touch(0);
    return true;
  });

  std::map<std::tuple<int, int, int, int, int>, Dependence> found;
  for (const auto& [cell, touches] : cells) {
    for (std::size_t a = 0; a < touches.size(); ++a) {
      for (std::size_t b = a + 1; b < touches.size(); ++b) {
        const Touch& x = touches[a];
        const Touch& y = touches[b];
        if (x.kind == AccessKind::Read && y.kind == AccessKind::Read) continue;
        const Statement& sx = scop.statements[static_cast<std::size_t>(x.stmt)];
        const Statement& sy = scop.statements[static_cast<std::size_t>(y.stmt)];
        std::size_t shared = Scop::shared_loops(sx, sy);
        int level = 0;
        std::vector<std::int64_t> dist(shared);
        for (std::size_t q = 0; q < shared; ++q) {
          dist[q] = y.iters[q] - x.iters[q];
          if (level == 0 && dist[q] != 0) level = static_cast<int>(q) + 1;
        }
        Dependence d;
        d.type = dep_type_for(x.kind, y.kind);
        d.source_stmt = x.stmt;
        d.target_stmt = y.stmt;
        d.source_ref = x.ref;
        d.target_ref = y.ref;
        d.array = cell.first;
        d.distance = dist;
        d.level = level;
        auto key = std::make_tuple(x.stmt, y.stmt, x.ref, y.ref, level);
        auto it = found.find(key);
        if (it == found.end()) found.emplace(key, d);
        else if (dist < it->second.distance) it->second.distance = dist;
      }
    }
  }
  DependenceResult r;
  r.best_effort = truncated;
  for (auto& [k, d] : found) r.deps.push_back(std::move(d));
  std::sort(r.deps.begin(), r.deps.end());
  return r;
}

/// Analytic dependences: for every ordered pair of references to the same
/// array (at least one write) and every candidate level, solves the
/// conflict system exactly and records the lexicographically minimal
/// distance.
inline std::vector<Dependence> analytic_dependences(const Scop& scop) {
  auto params = scop.param_values();
  std::vector<Dependence> out;
  for (const auto& src : scop.statements) {
    if (src.opaque) continue;
    for (const auto& dst : scop.statements) {
      if (dst.opaque) continue;
      std::size_t shared = Scop::shared_loops(src, dst);
      for (int a = 0; a < src.access_count(); ++a) {
        const ArrayAccess* x = src.access(a);
        for (int b = 0; b < dst.access_count(); ++b) {
          const ArrayAccess* y = dst.access(b);
          if (x->array != y->array) continue;
          if (x->kind == AccessKind::Read && y->kind == AccessKind::Read) continue;
          if (x->indices.size() != y->indices.size()) continue;
          for (int level = 0; level <= static_cast<int>(shared); ++level) {
            if (level == 0) {
              // Same iteration of every shared loop: the source must run first.
              bool ordered = src.id < dst.id || (src.id == dst.id && a != 0 && b == 0);
              if (!ordered) continue;
            }
            std::vector<std::string> vars = instance_vars(src, "s");
            auto tv = instance_vars(dst, "t");
            vars.insert(vars.end(), tv.begin(), tv.end());
            for (std::size_t q = 0; q < shared; ++q) vars.push_back("d" + std::to_string(q));
            IntSystem sys(vars);
            add_domain(sys, scop, src, "s", params);
            add_domain(sys, scop, dst, "t", params);
            for (std::size_t k = 0; k < x->indices.size(); ++k)
              sys.add_eq(instance_expr(scop, src, x->indices[k], src.loops.size(), "s", params) -
                         instance_expr(scop, dst, y->indices[k], dst.loops.size(), "t", params));
            for (std::size_t q = 0; q < shared; ++q) {
              AffineExpr d = AffineExpr::var("t" + std::to_string(q)) - AffineExpr::var("s" + std::to_string(q)) -
                             AffineExpr::var("d" + std::to_string(q));
              sys.add_eq(d);
              auto lq = static_cast<int>(q) + 1;
              AffineExpr dq = AffineExpr::var("d" + std::to_string(q));
              if (level == 0 || lq < level) sys.add_eq(dq);
              else if (lq == level) sys.add_ge(dq - 1);
            }
            std::vector<int> order;
            for (std::size_t q = 0; q < shared; ++q) order.push_back(sys.var("d" + std::to_string(q)));
            auto point = sys.lexmin(order);
            if (!point) continue;
            Dependence d;
            d.type = dep_type_for(x->kind, y->kind);
            d.source_stmt = src.id;
            d.target_stmt = dst.id;
            d.source_ref = a;
            d.target_ref = b;
            d.array = x->array;
            d.level = level;
            for (std::size_t q = 0; q < shared; ++q) d.distance.push_back((*point)[static_cast<std::size_t>(order[q])]);
            out.push_back(std::move(d));
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Dependences of a SCoP. Unit-coefficient SCoPs are solved analytically;
/// richer subscripts are scanned (flagged best-effort) when the domain is
/// small enough, and solved analytically otherwise.
inline DependenceResult compute_dependences(const Scop& scop, std::uint64_t scan_limit = 200000) {
  if (detail::unit_coefficients(scop)) {
    try {
      return {analytic_dependences(scop), false};
    } catch (const SolverLimit&) {
    }
  }
  if (count_instances(scop, scan_limit) <= scan_limit) {
    auto r = scan_dependences(scop, scan_limit);
    r.best_effort = true;
    return r;
  }
  DependenceResult r{analytic_dependences(scop), true};
  return r;
}

}  // namespace scopt
