#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scopt/scop/domain.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/synth/arrays.hpp"
#include "scopt/synth/bounds.hpp"
#include "scopt/synth/params.hpp"
#include "scopt/synth/program.hpp"
#include "scopt/synth/schedule.hpp"
#include "scopt/util/error.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

struct SynthExample {
  std::uint64_t seed = 0;       // requested seed
  std::uint64_t used_seed = 0;  // seed of the accepted draw
  int attempts = 1;
  LoopParameters params;
  Scop scop;
  std::string program;
  int dropped_links = 0;
};

struct SynthOutcome {
  std::optional<SynthExample> example;
  int infeasible = 0;  // rejected draws
};

namespace detail {

inline ArrayAccess realise(const PendingArray& a) {
  ArrayAccess out;
  out.array = a.name;
  out.kind = a.kind;
  for (const auto& t : a.index)
    out.indices.push_back(AffineExpr::var(level_iterator(static_cast<std::size_t>(t.level))) + t.offset);
  return out;
}

// The statement text: reads and one small literal combined with + - *,
// turned into a compound assignment when a read repeats the write.
inline void realise_statement(Statement& s, const std::vector<PendingArray>& row, Rng& rng) {
  s.write = realise(row[0]);
  std::vector<ArrayAccess> operands;
  for (std::size_t k = 1; k < row.size(); ++k) operands.push_back(realise(row[k]));
  s.reads.clear();
  s.op = AssignOp::Assign;
  for (std::size_t k = 0; k < operands.size(); ++k) {
    if (operands[k].array == s.write->array && operands[k].indices == s.write->indices) {
      s.op = rng.uniform(0, 1) == 0 ? AssignOp::Add : AssignOp::Mul;
      s.reads.push_back(operands[k]);
      operands.erase(operands.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
  }
  std::vector<Expr> terms;
  for (auto& a : operands) {
    s.reads.push_back(std::move(a));
    terms.push_back(Expr::read(static_cast<int>(s.reads.size()) - 1));
  }
  auto lit_pos = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(terms.size())));
  terms.insert(terms.begin() + static_cast<std::ptrdiff_t>(lit_pos), Expr::literal(std::to_string(rng.uniform(1, 9))));
  static const char ops[] = {'+', '-', '*'};
  Expr e = terms[0];
  for (std::size_t k = 1; k < terms.size(); ++k) e = Expr::binary(ops[rng.uniform(0, 2)], std::move(e), terms[k]);
  s.rhs = std::move(e);
}

}  // namespace detail

/// One draw of the synthesis procedure for a seed, or nullopt when the
/// bounds admit no iteration.
inline std::optional<SynthExample> synthesize_once(std::uint64_t seed, const SynthConfig& cfg = {}) {
  SynthExample ex;
  ex.seed = ex.used_seed = seed;
  ex.params = sample_parameters(seed);
  const LoopParameters& p = ex.params;

  Rng sched_rng = Rng::stream(seed, "schedules");
  std::vector<Schedule> schedules = generate_schedules(p, sched_rng);
  ArrayPlan plan = assign_arrays(p, schedules, cfg, seed);
  ex.dropped_links = check_circular_dependence(plan);
  resolve_arrays(plan, p, seed);

  Scop scop = schedule_skeleton(schedules);
  for (std::size_t s = 0; s < scop.statements.size(); ++s) {
    Rng rng = Rng::stream(seed, "expression", s);
    detail::realise_statement(scop.statements[s], plan.accesses[s], rng);
  }

  std::set<std::string> used;
  for (const auto& s : scop.statements)
    for (int ref = 0; ref < s.access_count(); ++ref) {
      const ArrayAccess* a = s.access(ref);
      ArrayInfo info;
      for (const auto& d : plan.shapes.at(a->array)) {
        info.dims.push_back(AffineExpr::var(d));
        used.insert(d);
      }
      info.rank = info.dims.size();
      scop.arrays[a->array] = info;
    }
  Rng bound_rng = Rng::stream(seed, "iterator-bounds");
  auto tri = generate_iterator_bounds(scop, p.iterator_bounds_prob, bound_rng);
  Rng default_rng = Rng::stream(seed, "default-bounds");
  std::vector<AffineExpr> fallback;
  for (std::size_t l = 0; l < scop.loops.size(); ++l)
    fallback.push_back(AffineExpr::var(
        cfg.sizes[static_cast<std::size_t>(default_rng.uniform(0, static_cast<std::int64_t>(cfg.sizes.size()) - 1))].name));

  for (const auto& sz : cfg.sizes) scop.params.push_back(sz);
  auto ranges = solve_bounds(scop, tri, fallback);
  if (!ranges) return std::nullopt;
  for (const auto& l : scop.loops)
    for (const auto* v : {&l.lower, &l.upper})
      for (const auto& e : *v)
        for (const auto& [name, c] : e.coeffs) used.insert(name);
  std::vector<Param> kept;
  for (const auto& sz : cfg.sizes)
    if (used.count(sz.name)) kept.push_back(sz);
  std::sort(kept.begin(), kept.end(), [](const Param& a, const Param& b) { return a.name < b.name; });
  scop.params = kept;

  // The bounds above are exact for unit coefficients; a failure here is a
  // synthesizer bug, so it propagates instead of counting as infeasible.
  validate_scop(scop);
  ex.program = emit_program(scop);
  ex.scop = std::move(scop);
  return ex;
}

/// Synthesis with resampling: an infeasible draw is retried at seed+1,
/// seed+2, ... up to cfg.retries extra draws.
inline SynthOutcome synthesize(std::uint64_t seed, const SynthConfig& cfg = {}) {
  SynthOutcome out;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    auto ex = synthesize_once(seed + static_cast<std::uint64_t>(attempt), cfg);
    if (ex) {
      ex->seed = seed;
      ex->attempts = attempt + 1;
      out.example = std::move(ex);
      return out;
    }
    ++out.infeasible;
  }
  return out;
}

}  // namespace scopt
