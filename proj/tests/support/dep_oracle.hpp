#pragma once

// Brute-force dependence oracle. It interprets the loop tree on its own
// (no shared code with the library's executor or solver), logs every
// access in program order and pairs conflicting accesses per memory cell.

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "scopt/scop/dependence.hpp"

namespace scopt::test {

struct AccessEvent {
  int stmt;
  int ref;
  bool write;
  std::vector<std::int64_t> iters;
};

inline void oracle_walk(const Scop& scop, const std::vector<Node>& seq, std::map<std::string, std::int64_t>& env,
                        std::vector<std::int64_t>& iters,
                        std::map<std::pair<std::string, std::vector<std::int64_t>>, std::vector<AccessEvent>>& log) {
  auto value = [&](const AffineExpr& e) {
    std::int64_t v = e.constant;
    for (const auto& [n, c] : e.coeffs) v += c * env.at(n);
    return v;
  };
  for (const Node& n : seq) {
    if (n.kind == Node::Kind::Loop) {
      const Loop& l = scop.loops[static_cast<std::size_t>(n.index)];
      std::int64_t lo = value(l.lower[0]);
      for (const auto& e : l.lower) lo = std::max(lo, value(e));
      std::int64_t hi = value(l.upper[0]);
      for (const auto& e : l.upper) hi = std::min(hi, value(e));
      bool had = env.count(l.iterator) > 0;
      std::int64_t old = had ? env[l.iterator] : 0;
      for (std::int64_t v = lo; v < hi; ++v) {
        env[l.iterator] = v;
        iters.push_back(v);
        oracle_walk(scop, l.body, env, iters, log);
        iters.pop_back();
      }
      if (had) env[l.iterator] = old;
      else env.erase(l.iterator);
    } else if (n.kind == Node::Kind::If) {
      const IfBlock& b = scop.ifs[static_cast<std::size_t>(n.index)];
      bool ok = std::all_of(b.conditions.begin(), b.conditions.end(), [&](const AffineConstraint& c) {
        return c.equality ? value(c.expr) == 0 : value(c.expr) >= 0;
      });
      if (ok) oracle_walk(scop, b.body, env, iters, log);
    } else {
      const Statement& s = scop.statements[static_cast<std::size_t>(n.index)];
      if (s.opaque) continue;
      auto record = [&](const ArrayAccess& a, int ref, bool write) {
        std::vector<std::int64_t> cell;
        for (const auto& idx : a.indices) cell.push_back(value(idx));
        log[{a.array, cell}].push_back({s.id, ref, write, iters});
      };
      for (std::size_t r = 0; r < s.reads.size(); ++r) record(s.reads[r], static_cast<int>(r) + 1, false);
      record(*s.write, 0, true);
    }
  }
}

inline std::vector<Dependence> brute_force_dependences(const Scop& scop) {
  std::map<std::pair<std::string, std::vector<std::int64_t>>, std::vector<AccessEvent>> log;
  std::map<std::string, std::int64_t> env;
  for (const auto& p : scop.params) env[p.name] = p.value;
  std::vector<std::int64_t> iters;
  oracle_walk(scop, scop.body, env, iters, log);

  std::map<std::tuple<int, int, int, int, int>, Dependence> best;
  for (const auto& [cell, events] : log) {
    for (std::size_t a = 0; a < events.size(); ++a)
      for (std::size_t b = a + 1; b < events.size(); ++b) {
        const AccessEvent& x = events[a];
        const AccessEvent& y = events[b];
        if (!x.write && !y.write) continue;
        const auto& lx = scop.statements[static_cast<std::size_t>(x.stmt)].loops;
        const auto& ly = scop.statements[static_cast<std::size_t>(y.stmt)].loops;
        std::size_t common = 0;
        while (common < lx.size() && common < ly.size() && lx[common] == ly[common]) ++common;
        std::vector<std::int64_t> dist;
        int level = 0;
        for (std::size_t q = 0; q < common; ++q) {
          dist.push_back(y.iters[q] - x.iters[q]);
          if (level == 0 && dist.back() != 0) level = static_cast<int>(q) + 1;
        }
        Dependence d;
        d.type = x.write ? (y.write ? DepType::WAW : DepType::RAW) : DepType::WAR;
        d.source_stmt = x.stmt;
        d.target_stmt = y.stmt;
        d.source_ref = x.ref;
        d.target_ref = y.ref;
        d.array = cell.first;
        d.distance = dist;
        d.level = level;
        auto key = std::make_tuple(x.stmt, y.stmt, x.ref, y.ref, level);
        auto it = best.find(key);
        if (it == best.end() || dist < it->second.distance) best[key] = d;
      }
  }
  std::vector<Dependence> out;
  for (auto& [k, d] : best) out.push_back(d);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scopt::test
