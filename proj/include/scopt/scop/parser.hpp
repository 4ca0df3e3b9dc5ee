#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scopt/scop/affine.hpp"
#include "scopt/scop/lexer.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

struct ParseOptions {
  /// Declared array shapes; accesses to other names get ArrayInfo::declared = false.
  std::map<std::string, ArrayInfo> arrays;
  /// Calls allowed as standalone (opaque) statements.
  std::set<std::string> pure_functions{"dummy"};
  /// Calls allowed inside right-hand sides.
  std::set<std::string> math_functions{"sqrt", "exp", "pow", "fabs", "abs", "sin", "cos",
                                       "log", "floor", "ceil", "fmax", "fmin"};
};

namespace detail {

class ScopParser {
 public:
  ScopParser(std::string_view text, const std::map<std::string, std::int64_t>& params,
             const ParseOptions& options)
      : tokens_(lex_c(text)), params_(params), options_(options) {}

  Scop run() {
    scop_.body = parse_sequence(/*until_brace=*/false);
    rebuild_schedules(scop_);
    finish_arrays();
    finish_params();
    return std::move(scop_);
  }

  /// Parses the whole input as one affine expression.
  AffineExpr run_affine(const std::vector<std::string>& iterators) {
    scope_ = iterators;
    AffineExpr e = parse_affine(ErrorKind::NonAffineBound);
    if (!at_end()) fail(ErrorKind::NonAffineBound, "trailing tokens after expression");
    return e;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::map<std::string, std::int64_t>& params_;
  const ParseOptions& options_;
  Scop scop_;
  std::vector<std::string> scope_;  // iterators of enclosing loops
  std::set<std::string> used_params_;
  std::map<std::string, std::size_t> ranks_;

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool accept(std::string_view s) {
    if (peek().is(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(ErrorKind kind, const std::string& what) const {
    throw Error(kind, "line " + std::to_string(peek().line) + ": " + what);
  }
  void expect(std::string_view s) {
    if (!accept(s))
      fail(ErrorKind::UnsupportedConstruct,
           "expected '" + std::string(s) + "' near '" + peek().text + "'");
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool in_scope(const std::string& name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
  }

  void skip_preprocessor_line() {
    int line = peek().line;
    while (!at_end() && peek().line == line) next();
  }

  std::vector<Node> parse_sequence(bool until_brace) {
    std::vector<Node> seq;
    while (true) {
      if (at_end()) {
        if (until_brace) fail(ErrorKind::UnsupportedConstruct, "unbalanced braces");
        return seq;
      }
      if (peek().is("}")) {
        if (!until_brace) fail(ErrorKind::UnsupportedConstruct, "unbalanced braces");
        next();
        return seq;
      }
      parse_item(seq);
    }
  }

  void parse_body(std::vector<Node>& seq) {
    if (accept("{")) {
      auto inner = parse_sequence(true);
      seq.insert(seq.end(), inner.begin(), inner.end());
    } else {
      parse_item(seq);
    }
  }

  void parse_item(std::vector<Node>& seq) {
    const Token& t = peek();
    if (t.is("#")) {
      skip_preprocessor_line();
      return;
    }
    if (t.is(";")) {
      next();
      return;
    }
    if (t.is("{")) {
      next();
      auto inner = parse_sequence(true);
      seq.insert(seq.end(), inner.begin(), inner.end());
      return;
    }
    if (t.is("for")) {
      parse_for(seq);
      return;
    }
    if (t.is("if")) {
      parse_if(seq);
      return;
    }
    static const std::set<std::string> kRejected = {
        "while", "do", "switch", "goto", "return", "break", "continue", "else", "case",
        "int", "double", "float", "long", "char", "unsigned", "short", "const", "static"};
    if (t.kind == Token::Kind::Ident && kRejected.count(t.text))
      fail(ErrorKind::UnsupportedConstruct, "'" + t.text + "' is not allowed in a SCoP");
    if (t.kind == Token::Kind::Ident && peek(1).is("(")) {
      parse_opaque_call(seq);
      return;
    }
    parse_assignment(seq);
  }

  // ---- loops and conditions -------------------------------------------

  void parse_for(std::vector<Node>& seq) {
    expect("for");
    expect("(");
    static const std::set<std::string> kIntTypes = {"int", "long", "unsigned", "short", "register"};
    while (peek().kind == Token::Kind::Ident && kIntTypes.count(peek().text)) next();
    if (peek().kind != Token::Kind::Ident) fail(ErrorKind::UnsupportedConstruct, "bad loop header");
    std::string it = next().text;
    expect("=");
    AffineExpr lower = parse_affine(ErrorKind::NonAffineBound);
    expect(";");

    Loop loop;
    loop.id = static_cast<int>(scop_.loops.size());
    loop.iterator = it;
    loop.lower.push_back(lower);
    scope_.push_back(it);
    for (const auto& c : parse_conjunction(ErrorKind::NonAffineBound)) {
      std::int64_t k = c.expr.coeff(it);
      if (c.equality || k != -1)
        fail(ErrorKind::UnsupportedConstruct, "loop condition must bound '" + it + "' from above with unit stride");
      AffineExpr rest = c.expr;
      rest.add_term(it, 1);
      loop.upper.push_back(rest + 1);
    }
    if (loop.upper.empty()) fail(ErrorKind::UnsupportedConstruct, "loop without upper bound");
    expect(";");
    parse_increment(it);
    expect(")");

    int id = loop.id;
    scop_.loops.push_back(std::move(loop));
    std::vector<Node> body;
    parse_body(body);
    scope_.pop_back();
    scop_.loops[static_cast<std::size_t>(id)].body = std::move(body);
    seq.push_back({Node::Kind::Loop, id});
  }

  void parse_increment(const std::string& it) {
    if (accept("++")) {
      if (!peek().is(it)) fail(ErrorKind::UnsupportedConstruct, "loop increment must be on '" + it + "'");
      next();
      return;
    }
    if (!peek().is(it)) fail(ErrorKind::UnsupportedConstruct, "loop increment must be on '" + it + "'");
    next();
    if (accept("++")) return;
    if (accept("+=")) {
      if (peek().is("1")) {
        next();
        return;
      }
    } else if (accept("=")) {
      if (accept(it) && accept("+") && accept("1")) return;
    }
    fail(ErrorKind::UnsupportedConstruct, "only unit-stride increasing loops are supported");
  }

  void parse_if(std::vector<Node>& seq) {
    expect("if");
    expect("(");
    IfBlock block;
    block.conditions = parse_conjunction(ErrorKind::UnsupportedConstruct);
    expect(")");
    std::vector<Node> body;
    parse_body(body);
    if (peek().is("else")) fail(ErrorKind::UnsupportedConstruct, "'else' is not supported");
    block.body = std::move(body);
    scop_.ifs.push_back(std::move(block));
    seq.push_back({Node::Kind::If, static_cast<int>(scop_.ifs.size()) - 1});
  }

  /// rel ('&&' rel)*, each relation normalized to expr >= 0 or expr == 0.
  std::vector<AffineConstraint> parse_conjunction(ErrorKind kind) {
    std::vector<AffineConstraint> out;
    do {
      bool wrapped = false;
      // A parenthesized relation: look for a relational operator at depth 1.
      if (peek().is("(")) {
        int depth = 0;
        for (std::size_t k = pos_; k < tokens_.size(); ++k) {
          const Token& tk = tokens_[k];
          if (tk.is("(")) ++depth;
          else if (tk.is(")")) {
            if (--depth == 0) break;
          } else if (depth == 1 && (tk.is("<") || tk.is("<=") || tk.is(">") || tk.is(">=") ||
                                    tk.is("==") || tk.is("&&") || tk.is("&"))) {
            wrapped = true;
            break;
          }
        }
      }
      if (wrapped) {
        expect("(");
        auto inner = parse_conjunction(kind);
        expect(")");
        out.insert(out.end(), inner.begin(), inner.end());
      } else {
        out.push_back(parse_relation(kind));
      }
    } while (accept("&&") || accept("&"));
    if (peek().is("||") || peek().is("|") || peek().is("!="))
      fail(ErrorKind::UnsupportedConstruct, "only conjunctions of affine relations are supported");
    return out;
  }

  AffineConstraint parse_relation(ErrorKind kind) {
    AffineExpr lhs = parse_affine(kind);
    std::string op = peek().text;
    if (op != "<" && op != "<=" && op != ">" && op != ">=" && op != "==")
      fail(ErrorKind::UnsupportedConstruct, "expected relational operator, got '" + op + "'");
    next();
    AffineExpr rhs = parse_affine(kind);
    AffineConstraint c;
    if (op == "<") c.expr = rhs - lhs - 1;
    else if (op == "<=") c.expr = rhs - lhs;
    else if (op == ">") c.expr = lhs - rhs - 1;
    else if (op == ">=") c.expr = lhs - rhs;
    else {
      c.expr = lhs - rhs;
      c.equality = true;
    }
    return c;
  }

  // ---- affine expressions ---------------------------------------------

  AffineExpr parse_affine(ErrorKind kind) {
    AffineExpr e = parse_affine_term(kind);
    while (peek().is("+") || peek().is("-")) {
      bool minus = next().text == "-";
      AffineExpr t = parse_affine_term(kind);
      if (minus) e -= t;
      else e += t;
    }
    return e;
  }

  AffineExpr parse_affine_term(ErrorKind kind) {
    AffineExpr e = parse_affine_factor(kind);
    while (peek().is("*") || peek().is("/") || peek().is("%")) {
      std::string op = next().text;
      AffineExpr f = parse_affine_factor(kind);
      if (op == "*") {
        if (f.is_constant()) e *= f.constant;
        else if (e.is_constant()) e = f * e.constant;
        else fail(kind, "non-affine product");
      } else {
        if (!e.is_constant() || !f.is_constant() || f.constant == 0)
          fail(kind, "non-affine division");
        e = AffineExpr(op == "/" ? e.constant / f.constant : e.constant % f.constant);
      }
    }
    return e;
  }

  AffineExpr parse_affine_factor(ErrorKind kind) {
    if (accept("-")) return parse_affine_factor(kind) * -1;
    if (accept("+")) return parse_affine_factor(kind);
    if (accept("(")) {
      AffineExpr e = parse_affine(kind);
      expect(")");
      return e;
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      next();
      try {
        std::size_t used = 0;
        long long v = std::stoll(t.text, &used, 0);
        std::string_view tail(t.text.data() + used, t.text.size() - used);
        if (tail.find_first_not_of("uUlL") != std::string_view::npos) fail(kind, "non-integer constant " + t.text);
        return AffineExpr(v);
      } catch (const std::logic_error&) {
        fail(kind, "non-integer constant " + t.text);
      }
    }
    if (t.kind == Token::Kind::Ident) {
      std::string name = next().text;
      if (peek().is("[") || peek().is("(")) fail(kind, "array or call '" + name + "' in affine context");
      if (in_scope(name)) return AffineExpr::var(name);
      if (params_.count(name)) {
        used_params_.insert(name);
        return AffineExpr::var(name);
      }
      fail(ErrorKind::UnknownParameter, "unknown name '" + name + "'");
    }
    fail(ErrorKind::UnsupportedConstruct, "unexpected '" + t.text + "'");
  }

  // ---- statements -----------------------------------------------------

  void parse_opaque_call(std::vector<Node>& seq) {
    std::string name = peek().text;
    if (!options_.pure_functions.count(name))
      fail(ErrorKind::UnsupportedConstruct, "call to '" + name + "' is not a declared side-effect-free function");
    std::string text = next().text;
    int depth = 0;
    do {
      const Token& t = next();
      if (t.kind == Token::Kind::End) fail(ErrorKind::UnsupportedConstruct, "unterminated call");
      if (t.is("(")) ++depth;
      if (t.is(")")) --depth;
      if (t.is(",")) text += ", ";
      else text += t.text;
    } while (depth > 0);
    expect(";");
    Statement s;
    s.opaque = true;
    s.opaque_text = text;
    push_statement(seq, std::move(s));
  }

  ArrayAccess parse_reference(AccessKind kind) {
    if (peek().kind != Token::Kind::Ident) fail(ErrorKind::UnsupportedConstruct, "expected array reference near '" + peek().text + "'");
    ArrayAccess a;
    a.kind = kind;
    a.array = next().text;
    if (in_scope(a.array) || params_.count(a.array))
      fail(ErrorKind::UnsupportedConstruct, "assignment to iterator or parameter '" + a.array + "'");
    while (accept("[")) {
      AffineExpr idx = parse_affine(ErrorKind::UnsupportedConstruct);
      for (const auto& [name, c] : idx.coeffs)
        if (in_scope(name) && (c < -2 || c > 2))
          fail(ErrorKind::UnsupportedConstruct, "iterator coefficient outside [-2, 2]");
      a.indices.push_back(std::move(idx));
      expect("]");
    }
    if (peek().is(".") || peek().is("->")) fail(ErrorKind::UnsupportedConstruct, "struct access");
    note_rank(a);
    return a;
  }

  void note_rank(const ArrayAccess& a) {
    auto [it, inserted] = ranks_.emplace(a.array, a.indices.size());
    if (!inserted && it->second != a.indices.size())
      fail(ErrorKind::UnsupportedConstruct, "inconsistent subscripts for '" + a.array + "'");
  }

  void parse_assignment(std::vector<Node>& seq) {
    if (peek().is("*") || peek().is("&") || peek().is("++") || peek().is("--"))
      fail(ErrorKind::UnsupportedConstruct, "pointer or increment statement");
    Statement s;
    s.write = parse_reference(AccessKind::Write);
    std::string op = peek().text;
    if (op == "=") s.op = AssignOp::Assign;
    else if (op == "+=") s.op = AssignOp::Add;
    else if (op == "-=") s.op = AssignOp::Sub;
    else if (op == "*=") s.op = AssignOp::Mul;
    else if (op == "/=") s.op = AssignOp::Div;
    else fail(ErrorKind::UnsupportedConstruct, "expected assignment, got '" + op + "'");
    next();
    if (s.compound()) {
      ArrayAccess implicit = *s.write;
      implicit.kind = AccessKind::Read;
      s.reads.push_back(std::move(implicit));
    }
    s.rhs = parse_value(s);
    expect(";");
    push_statement(seq, std::move(s));
  }

  void push_statement(std::vector<Node>& seq, Statement s) {
    s.id = static_cast<int>(scop_.statements.size());
    scop_.statements.push_back(std::move(s));
    seq.push_back({Node::Kind::Statement, static_cast<int>(scop_.statements.size()) - 1});
  }

  Expr parse_value(Statement& s) {
    Expr e = parse_value_term(s);
    while (peek().is("+") || peek().is("-")) {
      char op = next().text[0];
      e = Expr::binary(op, std::move(e), parse_value_term(s));
    }
    return e;
  }

  Expr parse_value_term(Statement& s) {
    Expr e = parse_value_unary(s);
    while (peek().is("*") || peek().is("/")) {
      char op = next().text[0];
      e = Expr::binary(op, std::move(e), parse_value_unary(s));
    }
    if (peek().is("%")) fail(ErrorKind::UnsupportedConstruct, "'%' in statement");
    return e;
  }

  Expr parse_value_unary(Statement& s) {
    if (accept("-")) {
      Expr e;
      e.kind = Expr::Kind::Negate;
      e.args.push_back(parse_value_unary(s));
      return e;
    }
    if (accept("+")) return parse_value_unary(s);
    if (peek().is("*") || peek().is("&")) fail(ErrorKind::UnsupportedConstruct, "pointer arithmetic");
    if (peek().is("(")) {
      static const std::set<std::string> kCastTypes = {"double", "float", "int", "long"};
      if (peek(1).kind == Token::Kind::Ident && kCastTypes.count(peek(1).text) && peek(2).is(")")) {
        next();
        Expr e;
        e.kind = Expr::Kind::Cast;
        e.text = next().text;
        next();
        e.args.push_back(parse_value_unary(s));
        return e;
      }
      next();
      Expr e = parse_value(s);
      expect(")");
      return e;
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      next();
      return Expr::literal(t.text);
    }
    if (t.kind != Token::Kind::Ident) fail(ErrorKind::UnsupportedConstruct, "unexpected '" + t.text + "'");
    if (peek(1).is("(")) {
      std::string name = next().text;
      if (!options_.math_functions.count(name))
        fail(ErrorKind::UnsupportedConstruct, "call to '" + name + "' inside a statement");
      next();
      Expr e;
      e.kind = Expr::Kind::Call;
      e.text = name;
      if (!accept(")")) {
        do e.args.push_back(parse_value(s));
        while (accept(","));
        expect(")");
      }
      return e;
    }
    if (!peek(1).is("[") && (in_scope(t.text) || params_.count(t.text))) {
      if (params_.count(t.text) && !in_scope(t.text)) used_params_.insert(t.text);
      Expr e;
      e.kind = Expr::Kind::Name;
      e.text = next().text;
      return e;
    }
    s.reads.push_back(parse_reference(AccessKind::Read));
    return Expr::read(static_cast<int>(s.reads.size()) - 1);
  }

  // ---- finishing ------------------------------------------------------

  void finish_arrays() {
    for (const auto& [name, rank] : ranks_) {
      ArrayInfo info;
      auto it = options_.arrays.find(name);
      if (it != options_.arrays.end()) {
        info = it->second;
        if (info.dims.size() != rank)
          throw Error(ErrorKind::InvalidScop, "array '" + name + "' declared with " +
                                                  std::to_string(info.dims.size()) + " dimensions but accessed with " +
                                                  std::to_string(rank));
        info.declared = true;
        for (const auto& d : info.dims)
          for (const auto& [p, c] : d.coeffs) {
            if (!params_.count(p)) throw Error(ErrorKind::UnknownParameter, "array size uses '" + p + "'");
            used_params_.insert(p);
          }
      } else {
        info.declared = false;
      }
      info.rank = rank;
      scop_.arrays[name] = std::move(info);
    }
  }

  void finish_params() {
    for (const auto& name : used_params_) scop_.params.push_back({name, params_.at(name)});
  }
};

}  // namespace detail

/// Parses the text between the SCoP markers. Statement ids follow textual
/// order and schedules are rebuilt from the nesting.
inline Scop parse_scop(std::string_view scop_text, const std::map<std::string, std::int64_t>& global_params,
                       const ParseOptions& options = {}) {
  return detail::ScopParser(scop_text, global_params, options).run();
}

/// Parses a standalone affine expression over the given iterators and parameters.
inline AffineExpr parse_affine_expr(std::string_view text, const std::map<std::string, std::int64_t>& params,
                                    const std::vector<std::string>& iterators = {}) {
  ParseOptions options;
  return detail::ScopParser(text, params, options).run_affine(iterators);
}

}  // namespace scopt
