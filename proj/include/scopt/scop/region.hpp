#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scopt/util/error.hpp"

namespace scopt {

/// prefix + scop + suffix == source. The marker lines themselves stay in
/// prefix (the `#pragma scop` line) and suffix (the `#pragma endscop` line).
struct ScopRegion {
  std::string prefix;
  std::string scop;
  std::string suffix;
};

namespace detail {

enum class Marker { None, Begin, End };

inline Marker classify_line(std::string_view line) {
  std::size_t p = 0;
  auto skip_ws = [&] {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
  };
  skip_ws();
  if (p >= line.size() || line[p] != '#') return Marker::None;
  ++p;
  skip_ws();
  if (line.substr(p, 6) != "pragma") return Marker::None;
  p += 6;
  if (p >= line.size() || (line[p] != ' ' && line[p] != '\t')) return Marker::None;
  skip_ws();
  std::size_t start = p;
  while (p < line.size() && line[p] != ' ' && line[p] != '\t' && line[p] != '\r') ++p;
  std::string_view word = line.substr(start, p - start);
  skip_ws();
  if (p != line.size() && line.substr(p, 2) != "//") return Marker::None;
  if (word == "scop") return Marker::Begin;
  if (word == "endscop") return Marker::End;
  return Marker::None;
}

}  // namespace detail

inline ScopRegion extract_scop_region(std::string_view source) {
  struct Hit {
    detail::Marker kind;
    std::size_t line_begin;
    std::size_t line_end;  // one past the trailing newline, if any
  };
  std::vector<Hit> hits;
  std::size_t pos = 0;
  while (pos < source.size()) {
    std::size_t nl = source.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? source.size() : nl;
    auto kind = detail::classify_line(source.substr(pos, end - pos));
    std::size_t next = nl == std::string_view::npos ? source.size() : nl + 1;
    if (kind != detail::Marker::None) hits.push_back({kind, pos, next});
    pos = next;
  }
  if (hits.empty()) throw Error(ErrorKind::MissingMarkers, "no #pragma scop / #pragma endscop found");
  for (std::size_t i = 0; i < hits.size(); ++i) {
    auto expected = i % 2 == 0 ? detail::Marker::Begin : detail::Marker::End;
    if (hits[i].kind != expected)
      throw Error(ErrorKind::MissingMarkers, "mismatched #pragma scop / #pragma endscop");
  }
  if (hits.size() % 2 != 0) throw Error(ErrorKind::MissingMarkers, "#pragma scop without #pragma endscop");
  if (hits.size() > 2)
    throw Error(ErrorKind::MultipleRegions, std::to_string(hits.size() / 2) + " SCoP regions found");

  ScopRegion r;
  r.prefix = std::string(source.substr(0, hits[0].line_end));
  r.scop = std::string(source.substr(hits[0].line_end, hits[1].line_begin - hits[0].line_end));
  r.suffix = std::string(source.substr(hits[1].line_begin));
  return r;
}

/// Same program with the region body swapped for `scop`.
inline std::string replace_scop_region(std::string_view source, std::string_view scop) {
  ScopRegion r = extract_scop_region(source);
  std::string out = r.prefix;
  out += scop;
  if (!scop.empty() && scop.back() != '\n') out += '\n';
  out += r.suffix;
  return out;
}

}  // namespace scopt
