#pragma once

#include <string>
#include <vector>

#include "scopt/scop/model.hpp"

namespace scopt {

inline std::string render_statement(const Statement& s);

inline std::string render_access(const ArrayAccess& a) {
  std::string out = a.array;
  for (const auto& idx : a.indices) out += "[" + idx.to_c() + "]";
  return out;
}

namespace detail {

inline int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Binary) return (e.op == '+' || e.op == '-') ? 1 : 2;
  if (e.kind == Expr::Kind::Negate || e.kind == Expr::Kind::Cast) return 3;
  return 4;
}

inline std::string render_expr(const Expr& e, const Statement& s) {
  switch (e.kind) {
    case Expr::Kind::Access: return render_access(s.reads.at(static_cast<std::size_t>(e.access)));
    case Expr::Kind::Literal:
    case Expr::Kind::Name: return e.text;
    case Expr::Kind::Negate: {
      std::string inner = render_expr(e.args[0], s);
      if (precedence(e.args[0]) < 3 || inner.front() == '-') inner = "(" + inner + ")";
      return "-" + inner;
    }
    case Expr::Kind::Cast: {
      std::string inner = render_expr(e.args[0], s);
      if (precedence(e.args[0]) < 3) inner = "(" + inner + ")";
      return "(" + e.text + ")" + inner;
    }
    case Expr::Kind::Call: {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += render_expr(e.args[i], s);
      }
      return out + ")";
    }
    case Expr::Kind::Binary: {
      int p = precedence(e);
      std::string lhs = render_expr(e.args[0], s);
      std::string rhs = render_expr(e.args[1], s);
      if (precedence(e.args[0]) < p) lhs = "(" + lhs + ")";
      // Right operand needs parentheses at equal precedence for - and /.
      int rp = precedence(e.args[1]);
      if (rp < p || (rp == p && (e.op == '-' || e.op == '/' || e.args[1].kind == Expr::Kind::Binary)))
        rhs = "(" + rhs + ")";
      return lhs + " " + e.op + " " + rhs;
    }
  }
  return "";
}

inline std::string render_constraint(const AffineConstraint& c) {
  return c.expr.to_c() + (c.equality ? " == 0" : " >= 0");
}

inline void emit_nodes(const Scop& scop, const std::vector<Node>& seq, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const Node& n : seq) {
    if (n.kind == Node::Kind::Statement) {
      out += pad + render_statement(scop.statements.at(static_cast<std::size_t>(n.index))) + "\n";
    } else if (n.kind == Node::Kind::If) {
      const IfBlock& b = scop.ifs.at(static_cast<std::size_t>(n.index));
      std::string cond;
      for (std::size_t i = 0; i < b.conditions.size(); ++i) {
        if (i) cond += " && ";
        cond += render_constraint(b.conditions[i]);
      }
      out += pad + "if (" + cond + ") {\n";
      emit_nodes(scop, b.body, indent + 2, out);
      out += pad + "}\n";
    } else {
      const Loop& l = scop.loops.at(static_cast<std::size_t>(n.index));
      std::string cond;
      for (std::size_t i = 0; i < l.upper.size(); ++i) {
        if (i) cond += " && ";
        cond += l.iterator + " < " + l.upper[i].to_c();
      }
      out += pad + "for (" + l.iterator + " = " + l.lower.at(0).to_c() + "; " + cond + "; " + l.iterator +
             "++) {\n";
      emit_nodes(scop, l.body, indent + 2, out);
      out += pad + "}\n";
    }
  }
}

}  // namespace detail

/// One C statement, e.g. "C[i][j] += A[i][k] * 2;".
inline std::string render_statement(const Statement& s) {
  if (s.opaque) return s.opaque_text + ";";
  return render_access(*s.write) + " " + assign_op_text(s.op) + " " + detail::render_expr(s.rhs, s) + ";";
}

/// C text of the region between the markers.
inline std::string emit_scop(const Scop& scop, int indent = 0) {
  std::string out;
  detail::emit_nodes(scop, scop.body, indent, out);
  return out;
}

}  // namespace scopt
