#pragma once

#include <set>
#include <string>
#include <vector>

#include "scopt/scop/emit.hpp"
#include "scopt/scop/model.hpp"

namespace scopt {

/// Arrays written by at least one statement, in name order.
inline std::vector<std::string> written_arrays(const Scop& scop) {
  std::set<std::string> names;
  for (const auto& s : scop.statements)
    if (s.write) names.insert(s.write->array);
  return {names.begin(), names.end()};
}

/// A complete PolyBench-style C program around the SCoP: size macros,
/// global arrays, an index-dependent initialisation of every array, the
/// kernel between the markers, and one checksum line per written array.
inline std::string emit_program(const Scop& scop) {
  std::string out;
  out += "#include <stdio.h>\n#include <stdlib.h>\n\n";
  for (const auto& p : scop.params) out += "#define " + p.name + " " + std::to_string(p.value) + "\n";
  out += "\n#define DATA_TYPE double\n\n";

  std::size_t max_rank = 1;
  for (const auto& [name, info] : scop.arrays) {
    std::string decl = "DATA_TYPE " + name;
    for (const auto& d : info.dims) decl += "[" + d.to_c() + "]";
    out += decl + ";\n";
    max_rank = std::max(max_rank, info.dims.size());
  }

  auto index_vars = [&](std::size_t rank) {
    std::string v;
    for (std::size_t d = 0; d < rank; ++d) v += (d ? ", c" : "c") + std::to_string(d);
    return v;
  };
  auto nest = [&](const ArrayInfo& info, const std::string& body) {
    std::string text, pad = "  ";
    for (std::size_t d = 0; d < info.dims.size(); ++d) {
      std::string c = "c" + std::to_string(d);
      text += pad + "for (" + c + " = 0; " + c + " < " + info.dims[d].to_c() + "; " + c + "++)\n";
      pad += "  ";
    }
    return text + pad + body + "\n";
  };
  auto element = [](const std::string& name, const ArrayInfo& info) {
    std::string e = name;
    for (std::size_t d = 0; d < info.dims.size(); ++d) e += "[c" + std::to_string(d) + "]";
    return e;
  };

  out += "\nstatic void init_array(void)\n{\n  int " + index_vars(max_rank) + ";\n";
  int salt = 1;
  for (const auto& [name, info] : scop.arrays) {
    std::string f = std::to_string(salt);
    for (std::size_t d = 0; d < info.dims.size(); ++d)
      f += " + c" + std::to_string(d) + " * " + std::to_string(d + 2 + salt % 3);
    out += nest(info, element(name, info) + " = (DATA_TYPE)((" + f + ") % 31) / 31;");
    salt += 2;
  }
  out += "}\n";

  std::set<std::string> iterators;
  for (const auto& l : scop.loops) iterators.insert(l.iterator);
  out += "\nstatic void kernel(void)\n{\n";
  if (!iterators.empty()) {
    std::string decl;
    for (const auto& it : iterators) decl += (decl.empty() ? "" : ", ") + it;
    out += "  int " + decl + ";\n";
  }
  out += "#pragma scop\n" + emit_scop(scop, 2) + "#pragma endscop\n}\n";

  std::size_t out_rank = 1;
  for (const auto& name : written_arrays(scop)) out_rank = std::max(out_rank, scop.arrays.at(name).dims.size());
  out += "\nstatic void print_checksums(void)\n{\n  int " + index_vars(out_rank) + ";\n  double sum;\n";
  for (const auto& name : written_arrays(scop)) {
    const ArrayInfo& info = scop.arrays.at(name);
    out += "  sum = 0;\n" + nest(info, "sum += " + element(name, info) + ";");
    out += "  printf(\"" + name + " %.10e\\n\", sum);\n";
  }
  out += "}\n\nint main(void)\n{\n  init_array();\n  kernel();\n  print_checksums();\n  return 0;\n}\n";
  return out;
}

}  // namespace scopt
