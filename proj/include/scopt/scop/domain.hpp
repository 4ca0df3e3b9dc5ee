#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scopt/scop/int_solver.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

/// Rewrites an expression written in the scope of the first `limit` loops
/// of `stmt` into solver variables prefix0, prefix1, ... (one per loop
/// position; same-named iterators resolve to the innermost one). Global
/// parameters are folded to their values.
inline AffineExpr instance_expr(const Scop& scop, const Statement& stmt, const AffineExpr& e,
                                std::size_t limit, const std::string& prefix,
                                const std::map<std::string, std::int64_t>& params) {
  AffineExpr out(e.constant);
  for (const auto& [name, c] : e.coeffs) {
    bool found = false;
    for (std::size_t q = limit; q-- > 0;) {
      if (scop.loops.at(static_cast<std::size_t>(stmt.loops[q])).iterator == name) {
        out.add_term(prefix + std::to_string(q), c);
        found = true;
        break;
      }
    }
    if (found) continue;
    auto it = params.find(name);
    if (it == params.end()) throw Error(ErrorKind::UnknownParameter, "unbound name '" + name + "'");
    out.constant += c * it->second;
  }
  return out;
}

inline std::vector<std::string> instance_vars(const Statement& stmt, const std::string& prefix) {
  std::vector<std::string> v;
  for (std::size_t q = 0; q < stmt.loops.size(); ++q) v.push_back(prefix + std::to_string(q));
  return v;
}

/// Adds the iteration domain of `stmt` (loop bounds and guards).
inline void add_domain(IntSystem& sys, const Scop& scop, const Statement& stmt, const std::string& prefix,
                       const std::map<std::string, std::int64_t>& params) {
  for (std::size_t p = 0; p < stmt.loops.size(); ++p) {
    const Loop& loop = scop.loops.at(static_cast<std::size_t>(stmt.loops[p]));
    AffineExpr x = AffineExpr::var(prefix + std::to_string(p));
    for (const auto& lo : loop.lower) sys.add_ge(x - instance_expr(scop, stmt, lo, p, prefix, params));
    for (const auto& up : loop.upper) sys.add_ge(instance_expr(scop, stmt, up, p, prefix, params) - x - 1);
  }
  for (const auto& g : stmt.guards) {
    AffineExpr e = instance_expr(scop, stmt, g.expr, stmt.loops.size(), prefix, params);
    if (g.equality) sys.add_eq(e);
    else sys.add_ge(e);
  }
}

/// Sequential execution of the loop tree with concrete parameters. The
/// callback receives each statement instance in execution order with the
/// values of its enclosing iterators (outermost first). Return false from
/// the callback to stop.
inline void execute_scop(const Scop& scop,
                         const std::function<bool(const Statement&, const std::vector<std::int64_t>&)>& visit) {
  std::map<std::string, std::int64_t> env = scop.param_values();
  std::vector<std::int64_t> iters;
  bool stop = false;
  auto eval = [&](const AffineExpr& e) { return e.evaluate(env); };
  std::function<void(const std::vector<Node>&)> run = [&](const std::vector<Node>& seq) {
    for (const Node& n : seq) {
      if (stop) return;
      if (n.kind == Node::Kind::Statement) {
        const Statement& s = scop.statements.at(static_cast<std::size_t>(n.index));
        if (!visit(s, iters)) stop = true;
      } else if (n.kind == Node::Kind::If) {
        const IfBlock& b = scop.ifs.at(static_cast<std::size_t>(n.index));
        bool ok = true;
        for (const auto& c : b.conditions) {
          std::int64_t v = eval(c.expr);
          ok = ok && (c.equality ? v == 0 : v >= 0);
        }
        if (ok) run(b.body);
      } else {
        const Loop& loop = scop.loops.at(static_cast<std::size_t>(n.index));
        std::int64_t lo = INT64_MIN, hi = INT64_MAX;
        for (const auto& e : loop.lower) lo = std::max(lo, eval(e));
        for (const auto& e : loop.upper) hi = std::min(hi, eval(e));
        auto saved = env.find(loop.iterator) == env.end() ? std::optional<std::int64_t>()
                                                          : std::optional<std::int64_t>(env[loop.iterator]);
        iters.push_back(0);
        for (std::int64_t v = lo; v < hi && !stop; ++v) {
          env[loop.iterator] = v;
          iters.back() = v;
          run(loop.body);
        }
        iters.pop_back();
        if (saved) env[loop.iterator] = *saved;
        else env.erase(loop.iterator);
      }
    }
  };
  run(scop.body);
}

/// Number of statement instances, capped at `limit` (returns limit + 1 when exceeded).
inline std::uint64_t count_instances(const Scop& scop, std::uint64_t limit) {
  std::uint64_t n = 0;
  execute_scop(scop, [&](const Statement&, const std::vector<std::int64_t>&) { return ++n <= limit; });
  return n;
}

/// Checks the Scop invariants: every statement domain is nonempty and
/// every subscript of a declared array stays within its size over the
/// whole domain. Throws InvalidScop with the first violation.
inline void validate_scop(const Scop& scop) {
  auto params = scop.param_values();
  for (const auto& s : scop.statements) {
    auto vars = instance_vars(s, "x");
    {
      IntSystem sys(vars);
      add_domain(sys, scop, s, "x", params);
      if (!sys.feasible())
        throw Error(ErrorKind::InvalidScop, "statement S" + std::to_string(s.id + 1) + " has an empty domain");
    }
    std::vector<const ArrayAccess*> accesses;
    if (s.write) accesses.push_back(&*s.write);
    for (const auto& r : s.reads) accesses.push_back(&r);
    for (const auto* a : accesses) {
      auto it = scop.arrays.find(a->array);
      if (it == scop.arrays.end() || !it->second.declared) continue;
      for (std::size_t d = 0; d < a->indices.size(); ++d) {
        AffineExpr idx = instance_expr(scop, s, a->indices[d], s.loops.size(), "x", params);
        std::int64_t size = it->second.dims.at(d).evaluate(params);
        IntSystem below(vars), above(vars);
        add_domain(below, scop, s, "x", params);
        add_domain(above, scop, s, "x", params);
        below.add_ge(idx * -1 - 1);     // idx <= -1
        above.add_ge(idx - size);       // idx >= size
        if (below.feasible() || above.feasible())
          throw Error(ErrorKind::InvalidScop, "access to '" + a->array + "' in S" + std::to_string(s.id + 1) +
                                                  " leaves the array bounds in dimension " + std::to_string(d));
      }
    }
  }
}

}  // namespace scopt
