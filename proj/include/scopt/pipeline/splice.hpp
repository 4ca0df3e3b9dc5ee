#pragma once

#include <algorithm>
#include <regex>
#include <set>
#include <string>
#include <string_view>

#include "scopt/scop/program.hpp"
#include "scopt/scop/region.hpp"

namespace scopt {

/// The part of generated text that replaces the region: the body between
/// markers when the text carries its own marker pair, else all of it.
inline std::string generated_region(std::string_view generated) {
  try {
    return extract_scop_region(generated).scop;
  } catch (const Error&) {
    return std::string(generated);
  }
}

/// Loop iterators (`for (x = ...`) used by the text but not declared
/// anywhere in the program, in order of first use.
inline std::vector<std::string> undeclared_iterators(std::string_view region, const std::set<std::string>& declared) {
  static const std::regex loop_head(R"(\bfor\s*\(\s*([A-Za-z_]\w*)\s*=)");
  std::vector<std::string> out;
  std::string text(region);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), loop_head); it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1];
    if (declared.count(name) || std::find(out.begin(), out.end(), name) != out.end()) continue;
    out.push_back(name);
  }
  return out;
}

/// Replaces the region of `original` by the generated code. Iterators the
/// program does not declare get one `int` declaration just above the
/// `#pragma scop` line. Nothing is checked beyond the markers of the
/// original; a broken region surfaces as a compile error.
inline std::string splice_scop(std::string_view original, std::string_view generated) {
  ScopRegion r = extract_scop_region(original);
  std::string body = generated_region(generated);
  auto info = scan_program(original);
  auto fresh = undeclared_iterators(body, info.declared);

  std::string prefix = r.prefix;
  if (!fresh.empty()) {
    // prefix ends with the marker line; insert before it.
    std::size_t marker = prefix.rfind('\n', prefix.size() >= 2 ? prefix.size() - 2 : 0);
    marker = marker == std::string::npos ? 0 : marker + 1;
    std::string decl = "  int";
    for (std::size_t k = 0; k < fresh.size(); ++k) decl += (k ? ", " : " ") + fresh[k];
    prefix.insert(marker, decl + ";\n");
  }
  std::string out = prefix + body;
  if (!body.empty() && body.back() != '\n') out += '\n';
  return out + r.suffix;
}

}  // namespace scopt
