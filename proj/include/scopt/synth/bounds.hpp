#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scopt/scop/affine.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// An iterator-in-bound constraint on a loop: `v < o` when `upper`, else
/// `v >= o + shift` with the shift chosen by the solver.
struct TriangularBound {
  int outer_loop = 0;
  bool upper = true;
  friend bool operator==(const TriangularBound&, const TriangularBound&) = default;
};

/// Draws iterator-in-bound constraints. A loop at depth 2 gets one with
/// probability `percent`, halving at each deeper level; the bounding
/// iterator is a random enclosing loop.
inline std::vector<std::optional<TriangularBound>> generate_iterator_bounds(const Scop& skeleton, int percent,
                                                                            Rng& rng) {
  std::vector<std::optional<TriangularBound>> out(skeleton.loops.size());
  for (const auto& loop : skeleton.loops) {
    if (loop.depth < 2) continue;
    double p = percent / 100.0;
    for (int d = 2; d < loop.depth; ++d) p /= 2;
    if (rng.unit() >= p) continue;
    std::vector<int> outer;
    for (int q = loop.parent; q >= 0; q = skeleton.loops[static_cast<std::size_t>(q)].parent) outer.push_back(q);
    TriangularBound t;
    t.outer_loop = outer[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(outer.size()) - 1))];
    t.upper = rng.uniform(0, 1) == 0;
    out[static_cast<std::size_t>(loop.id)] = t;
  }
  return out;
}

/// Concrete range of one loop's iterator over the whole domain.
struct IteratorRange {
  std::int64_t min = 0;
  std::int64_t max = -1;
};

/// Computes the tightest bounds of every loop such that each subscript of
/// the form `iterator + c` stays inside its array dimension, then applies
/// the iterator-in-bound constraints. Loops must be in preorder (parents
/// first) and carry no bounds yet. An iterator no subscript uses runs to
/// `default_upper[loop]`. Returns the per-loop ranges, or nullopt when some
/// loop has an empty range.
inline std::optional<std::vector<IteratorRange>> solve_bounds(
    Scop& scop, const std::vector<std::optional<TriangularBound>>& iterator_bounds,
    const std::vector<AffineExpr>& default_upper) {
  const auto env = scop.param_values();
  const auto n = scop.loops.size();
  std::vector<std::int64_t> lo(n, 0);
  std::vector<std::optional<AffineExpr>> up(n);
  std::vector<std::int64_t> up_value(n, 0);

  for (const auto& s : scop.statements) {
    for (int ref = 0; ref < s.access_count(); ++ref) {
      const ArrayAccess* a = s.access(ref);
      if (!a) continue;
      const ArrayInfo& info = scop.arrays.at(a->array);
      for (std::size_t d = 0; d < a->indices.size(); ++d) {
        const AffineExpr& idx = a->indices[d];
        if (idx.coeffs.size() != 1 || idx.coeffs.begin()->second != 1) continue;
        const std::string& it = idx.coeffs.begin()->first;
        int loop = -1;
        for (int id : s.loops)
          if (scop.loops[static_cast<std::size_t>(id)].iterator == it) loop = id;
        if (loop < 0) continue;
        auto l = static_cast<std::size_t>(loop);
        std::int64_t c = idx.constant;
        lo[l] = std::max(lo[l], -c);
        AffineExpr cand = info.dims.at(d) - c;
        std::int64_t v = cand.evaluate(env);
        if (!up[l] || v < up_value[l] || (v == up_value[l] && cand.to_c() < up[l]->to_c())) {
          up[l] = cand;
          up_value[l] = v;
        }
      }
    }
  }

  std::vector<IteratorRange> range(n);
  for (std::size_t l = 0; l < n; ++l) {
    Loop& loop = scop.loops[l];
    AffineExpr upper = up[l] ? *up[l] : default_upper.at(l);
    std::int64_t uv = upper.evaluate(env);
    loop.lower = {AffineExpr(lo[l])};
    loop.upper = {upper};
    IteratorRange r{lo[l], uv - 1};
    if (l < iterator_bounds.size() && iterator_bounds[l]) {
      const auto& t = *iterator_bounds[l];
      const Loop& outer = scop.loops.at(static_cast<std::size_t>(t.outer_loop));
      const IteratorRange& o = range.at(static_cast<std::size_t>(t.outer_loop));
      if (t.upper) {
        // v < o; the array bound stays only when o can exceed it.
        loop.upper = {AffineExpr::var(outer.iterator)};
        if (o.max > uv) loop.upper.push_back(upper);
        r.max = std::min(o.max - 1, uv - 1);
      } else {
        std::int64_t shift = std::max<std::int64_t>(0, lo[l] - o.min);
        loop.lower = {AffineExpr::var(outer.iterator) + shift};
        r.min = o.min + shift;
      }
    }
    if (r.min > r.max) return std::nullopt;
    range[l] = r;
  }
  return range;
}

}  // namespace scopt
