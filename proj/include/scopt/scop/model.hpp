#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scopt/scop/affine.hpp"

namespace scopt {

enum class AccessKind { Read, Write };

struct ArrayAccess {
  std::string array;
  AccessKind kind = AccessKind::Read;
  std::vector<AffineExpr> indices;  // one per array dimension; empty for scalars

  friend bool operator==(const ArrayAccess&, const ArrayAccess&) = default;
};

/// Access function as a matrix: one row per dimension. Columns are the
/// surrounding iterators by nesting level ("L0", "L1", ...), then any global
/// parameters ("p:N"), then the constant ("c").
struct IndexMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<std::int64_t>> rows;

  friend bool operator==(const IndexMatrix&, const IndexMatrix&) = default;
};

inline IndexMatrix index_matrix(const ArrayAccess& access,
                                std::span<const std::string> iterators) {
  IndexMatrix m;
  std::vector<std::string> params;
  for (const auto& row : access.indices)
    for (const auto& [name, c] : row.coeffs)
      if (std::find(iterators.begin(), iterators.end(), name) == iterators.end() &&
          std::find(params.begin(), params.end(), name) == params.end())
        params.push_back(name);
  std::sort(params.begin(), params.end());
  for (std::size_t l = 0; l < iterators.size(); ++l) m.columns.push_back("L" + std::to_string(l));
  for (const auto& p : params) m.columns.push_back("p:" + p);
  m.columns.push_back("c");
  for (const auto& row : access.indices) {
    std::vector<std::int64_t> r;
    for (const auto& it : iterators) r.push_back(row.coeff(it));
    for (const auto& p : params) r.push_back(row.coeff(p));
    r.push_back(row.constant);
    m.rows.push_back(std::move(r));
  }
  return m;
}

/// 2d+1 schedule: constants c0..cd interleaved with iterators i1..id.
struct Schedule {
  std::vector<int> constants;          // d + 1 entries
  std::vector<std::string> iterators;  // d entries

  std::size_t depth() const { return iterators.size(); }

  /// Rendering padded with zeros up to `pad_depth`, e.g. "[0,i,0,j,0,0,0]".
  std::string to_string(std::size_t pad_depth = 0) const {
    std::string out = "[";
    std::size_t d = std::max(pad_depth, depth());
    for (std::size_t l = 0; l <= d; ++l) {
      if (l > 0) out += ",";
      out += l < constants.size() ? std::to_string(constants[l]) : "0";
      if (l < d) out += "," + (l < iterators.size() ? iterators[l] : std::string("0"));
    }
    return out + "]";
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Lexicographic execution order of two schedules from the same SCoP.
inline std::strong_ordering schedule_order(const Schedule& a, const Schedule& b) {
  std::size_t n = std::min(a.constants.size(), b.constants.size());
  for (std::size_t l = 0; l < n; ++l) {
    if (auto c = a.constants[l] <=> b.constants[l]; c != 0) return c;
  }
  return a.constants.size() <=> b.constants.size();
}

enum class AssignOp { Assign, Add, Sub, Mul, Div };

inline const char* assign_op_text(AssignOp op) {
  switch (op) {
    case AssignOp::Assign: return "=";
    case AssignOp::Add: return "+=";
    case AssignOp::Sub: return "-=";
    case AssignOp::Mul: return "*=";
    case AssignOp::Div: return "/=";
  }
  return "=";
}

/// Right-hand-side operator tree.
struct Expr {
  enum class Kind { Access, Literal, Name, Binary, Negate, Call, Cast };
  Kind kind = Kind::Literal;
  int access = -1;        // Access: index into Statement::reads
  std::string text;       // Literal spelling, Name, callee, or cast type
  char op = 0;            // Binary: '+', '-', '*', '/'
  std::vector<Expr> args;

  static Expr literal(std::string spelling) {
    Expr e;
    e.kind = Kind::Literal;
    e.text = std::move(spelling);
    return e;
  }
  static Expr read(int index) {
    Expr e;
    e.kind = Kind::Access;
    e.access = index;
    return e;
  }
  static Expr binary(char op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Statement {
  int id = 0;
  std::vector<int> loops;  // enclosing loop ids, outermost first
  Schedule schedule;
  std::vector<AffineConstraint> guards;  // conditions of enclosing ifs
  std::optional<ArrayAccess> write;      // absent only for opaque statements
  std::vector<ArrayAccess> reads;        // a compound assignment's LHS read comes first
  AssignOp op = AssignOp::Assign;
  Expr rhs;
  bool opaque = false;      // side-effect-free call kept as a statement
  std::string opaque_text;  // e.g. "dummy(a, b)"

  /// Accesses are addressed by a reference number: 0 is the write, and
  /// 1 + r is reads[r].
  int access_count() const { return static_cast<int>(reads.size()) + 1; }
  const ArrayAccess* access(int ref) const {
    if (ref == 0) return write ? &*write : nullptr;
    return &reads.at(static_cast<std::size_t>(ref - 1));
  }
  bool compound() const { return op != AssignOp::Assign; }
};

struct Node {
  enum class Kind { Loop, Statement, If };
  Kind kind = Kind::Statement;
  int index = 0;

  friend bool operator==(const Node&, const Node&) = default;
};

/// for (iterator = max(lower); iterator < min(upper); iterator++)
struct Loop {
  int id = 0;
  std::string iterator;
  int parent = -1;  // enclosing loop id, -1 at top level
  int depth = 1;    // 1 for outermost
  std::vector<AffineExpr> lower;  // inclusive, maximum of all entries
  std::vector<AffineExpr> upper;  // exclusive, minimum of all entries
  std::vector<Node> body;
};

struct IfBlock {
  std::vector<AffineConstraint> conditions;
  std::vector<Node> body;
};

struct ArrayInfo {
  std::string element_type = "double";
  std::vector<AffineExpr> dims;  // sizes, affine in global parameters
  std::size_t rank = 0;          // number of subscripts used in accesses
  bool declared = true;          // false when dims are not known

  friend bool operator==(const ArrayInfo&, const ArrayInfo&) = default;
};

struct Param {
  std::string name;
  std::int64_t value = 0;

  friend bool operator==(const Param&, const Param&) = default;
};

/// A static control part: loop tree, statements in textual order,
/// concrete global parameters and array shapes.
struct Scop {
  std::vector<Loop> loops;
  std::vector<IfBlock> ifs;
  std::vector<Statement> statements;
  std::vector<Node> body;  // top-level sequence
  std::vector<Param> params;
  std::map<std::string, ArrayInfo> arrays;

  std::map<std::string, std::int64_t> param_values() const {
    std::map<std::string, std::int64_t> env;
    for (const auto& p : params) env[p.name] = p.value;
    return env;
  }

  std::vector<std::string> iterators_of(const Statement& s) const {
    std::vector<std::string> names;
    for (int id : s.loops) names.push_back(loops.at(static_cast<std::size_t>(id)).iterator);
    return names;
  }

  std::size_t max_depth() const {
    std::size_t d = 0;
    for (const auto& s : statements) d = std::max(d, s.loops.size());
    return d;
  }

  /// Number of leading loops two statements share.
  static std::size_t shared_loops(const Statement& a, const Statement& b) {
    std::size_t n = 0;
    while (n < a.loops.size() && n < b.loops.size() && a.loops[n] == b.loops[n]) ++n;
    return n;
  }
};

/// Recomputes statement ids, enclosing loops, guards and 2d+1 schedules from
/// the body tree, renumbering statements into textual order. If-blocks do
/// not open a schedule dimension; their children continue the numbering of
/// the enclosing sequence.
inline void rebuild_schedules(Scop& scop) {
  std::vector<Statement> ordered;
  std::vector<int> loops, consts;
  std::vector<AffineConstraint> guards;
  std::function<void(std::vector<Node>&, int&)> walk = [&](std::vector<Node>& seq, int& position) {
    for (Node& n : seq) {
      if (n.kind == Node::Kind::If) {
        IfBlock& block = scop.ifs.at(static_cast<std::size_t>(n.index));
        auto saved = guards.size();
        guards.insert(guards.end(), block.conditions.begin(), block.conditions.end());
        walk(block.body, position);
        guards.resize(saved);
        continue;
      }
      consts.push_back(position++);
      if (n.kind == Node::Kind::Loop) {
        Loop& loop = scop.loops.at(static_cast<std::size_t>(n.index));
        loop.id = n.index;
        loop.depth = static_cast<int>(loops.size()) + 1;
        loop.parent = loops.empty() ? -1 : loops.back();
        loops.push_back(loop.id);
        int inner = 0;
        walk(loop.body, inner);
        loops.pop_back();
      } else {
        Statement s = scop.statements.at(static_cast<std::size_t>(n.index));
        s.loops = loops;
        s.guards = guards;
        s.schedule.constants = consts;
        s.schedule.iterators.clear();
        for (int id : loops)
          s.schedule.iterators.push_back(scop.loops.at(static_cast<std::size_t>(id)).iterator);
        s.id = static_cast<int>(ordered.size());
        n.index = s.id;
        ordered.push_back(std::move(s));
      }
      consts.pop_back();
    }
  };
  int position = 0;
  walk(scop.body, position);
  scop.statements = std::move(ordered);
}

}  // namespace scopt
