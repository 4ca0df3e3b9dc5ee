#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "scopt/scop/lexer.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/scop/parser.hpp"
#include "scopt/scop/region.hpp"

namespace scopt {

/// What a whole C file tells us about its SCoP: integer macros usable as
/// global parameters and the shapes of declared arrays.
struct ProgramInfo {
  std::map<std::string, std::int64_t> params;
  std::map<std::string, ArrayInfo> arrays;  // scalars have empty dims
  std::set<std::string> declared;           // every declared variable name
};

inline ProgramInfo scan_program(std::string_view source) {
  ProgramInfo info;
  auto tokens = lex_c(source);
  std::set<std::string> types = {"double", "float", "int", "long"};
  std::map<std::string, std::string> type_alias;

  // #define NAME <int> and #define NAME <type>
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    if (!tokens[i].is("#") || !tokens[i + 1].is("define")) continue;
    int line = tokens[i].line;
    std::size_t k = i + 2;
    if (tokens[k].kind != Token::Kind::Ident || tokens[k].line != line) continue;
    std::string name = tokens[k].text;
    ++k;
    std::vector<const Token*> body;
    for (; k < tokens.size() && tokens[k].kind != Token::Kind::End && tokens[k].line == line; ++k)
      body.push_back(&tokens[k]);
    if (!body.empty() && body[0]->is("(")) {
      // Object-like macros with parenthesized values are fine; function-like
      // macros have no space before '(' which we cannot see, so accept only
      // "( [-] number )".
      if (body.size() == 3 && body[1]->kind == Token::Kind::Number && body[2]->is(")"))
        body = {body[1]};
      else if (body.size() == 4 && body[1]->is("-") && body[2]->kind == Token::Kind::Number && body[3]->is(")"))
        body = {body[1], body[2]};
    }
    bool negative = false;
    if (!body.empty() && body[0]->is("-")) {
      negative = true;
      body.erase(body.begin());
    }
    if (body.size() == 1 && body[0]->kind == Token::Kind::Number) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(body[0]->text, &used, 0);
        std::string_view tail(body[0]->text.data() + used, body[0]->text.size() - used);
        if (tail.find_first_not_of("uUlL") == std::string_view::npos) info.params[name] = negative ? -v : v;
      } catch (const std::logic_error&) {
      }
    } else if (body.size() == 1 && !negative && types.count(body[0]->text)) {
      type_alias[name] = body[0]->text;
    }
  }
  for (const auto& [alias, base] : type_alias) types.insert(alias);

  auto type_of = [&](const std::string& t) {
    auto it = type_alias.find(t);
    return it == type_alias.end() ? t : it->second;
  };

  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind != Token::Kind::Ident || !types.count(t.text)) continue;
    if (i > 0 && tokens[i - 1].is("#")) continue;
    std::string element = type_of(t.text);
    std::size_t k = i + 1;
    while (k < tokens.size() && (tokens[k].is("*") || tokens[k].is("restrict") || tokens[k].is("const"))) ++k;
    while (true) {
      if (k >= tokens.size() || tokens[k].kind != Token::Kind::Ident || types.count(tokens[k].text)) break;
      if (k + 1 < tokens.size() && tokens[k + 1].is("(")) break;  // function declaration
      std::string name = tokens[k].text;
      ++k;
      ArrayInfo shape;
      shape.element_type = element;
      bool ok = true;
      while (k < tokens.size() && tokens[k].is("[")) {
        std::string text;
        int depth = 0;
        ++k;
        for (; k < tokens.size() && tokens[k].kind != Token::Kind::End; ++k) {
          if (tokens[k].is("[")) ++depth;
          if (tokens[k].is("]")) {
            if (depth == 0) break;
            --depth;
          }
          text += tokens[k].text + " ";
        }
        ++k;
        try {
          shape.dims.push_back(parse_affine_expr(text, info.params));
        } catch (const Error&) {
          ok = false;
        }
      }
      info.declared.insert(name);
      shape.rank = shape.dims.size();
      if (ok) info.arrays[name] = shape;
      // Skip an initializer.
      if (k < tokens.size() && tokens[k].is("=")) {
        int depth = 0;
        for (; k < tokens.size() && tokens[k].kind != Token::Kind::End; ++k) {
          if (tokens[k].is("(") || tokens[k].is("{")) ++depth;
          if (tokens[k].is(")") || tokens[k].is("}")) --depth;
          if (depth <= 0 && (tokens[k].is(",") || tokens[k].is(";"))) break;
          if (depth < 0) break;
        }
      }
      if (k < tokens.size() && tokens[k].is(",") && k + 1 < tokens.size() &&
          tokens[k + 1].kind == Token::Kind::Ident && !types.count(tokens[k + 1].text)) {
        ++k;
        continue;
      }
      break;
    }
  }
  return info;
}

/// Parsed view of a whole program: the region split plus the SCoP.
struct ParsedProgram {
  ScopRegion region;
  ProgramInfo info;
  Scop scop;
};

inline ParsedProgram parse_program(std::string_view source, ParseOptions options = {}) {
  ParsedProgram p;
  p.region = extract_scop_region(source);
  p.info = scan_program(source);
  for (const auto& [name, shape] : p.info.arrays)
    if (!options.arrays.count(name)) options.arrays[name] = shape;
  p.scop = parse_scop(p.region.scop, p.info.params, options);
  return p;
}

}  // namespace scopt
