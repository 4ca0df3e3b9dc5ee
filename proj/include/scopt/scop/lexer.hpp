#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace scopt {

struct Token {
  enum class Kind { Ident, Number, Punct, String, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;

  bool is(std::string_view s) const { return kind != Kind::End && kind != Kind::String && text == s; }
};

/// C tokenizer. Comments and whitespace are dropped; preprocessor lines are
/// tokenized like anything else ('#' is a Punct), callers use Token::line to
/// skip them.
inline std::vector<Token> lex_c(std::string_view src) {
  static constexpr std::array<std::string_view, 25> kPuncts = {
      "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
      "||",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "##", "::", ".*"};
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
      i += 2;
      ++line;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      i += 2;
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      i = std::min(src.size(), i + 2);
      continue;
    }
    Token t;
    t.line = line;
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && ident_char(src[i])) ++i;
      t.kind = Token::Kind::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size()) {
        char d = src[i];
        if (ident_char(d) || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E') &&
                   src.substr(start, 2) != "0x") {
          ++i;
        } else {
          break;
        }
      }
      t.kind = Token::Kind::Number;
    } else if (c == '"' || c == '\'') {
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') ++line;
        ++i;
      }
      i = std::min(src.size(), i + 1);
      t.kind = Token::Kind::String;
    } else {
      t.kind = Token::Kind::Punct;
      std::size_t len = 1;
      for (auto p : kPuncts) {
        if (src.substr(i, p.size()) == p) {
          len = p.size();
          break;
        }
      }
      i += len;
    }
    t.text = std::string(src.substr(start, i - start));
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  out.push_back(end);
  return out;
}

}  // namespace scopt
