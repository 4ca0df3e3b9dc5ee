#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scopt/pipeline/splice.hpp"
#include "scopt/retrieval/record.hpp"
#include "scopt/scop/emit.hpp"
#include "scopt/util/process.hpp"

namespace scopt {

inline constexpr int kTileSize = 32;

struct OptimizeResult {
  std::string program;  // whole optimized program
  std::string region;   // text between the markers
  std::string backend;  // "builtin" or "external"
  bool transformed = false;
  bool fell_back = false;  // external backend missing, builtin used
  std::string note;
};

namespace detail {

// Loops of the perfect band rooted at `root`: each loop's body is exactly
// one loop, down to a body made only of statements.
inline std::vector<int> perfect_band(const Scop& scop, int root) {
  std::vector<int> band{root};
  for (;;) {
    const Loop& l = scop.loops[static_cast<std::size_t>(band.back())];
    if (l.body.size() == 1 && l.body[0].kind == Node::Kind::Loop) {
      band.push_back(l.body[0].index);
      continue;
    }
    for (const Node& n : l.body)
      if (n.kind != Node::Kind::Statement) return {};
    return band;
  }
}

inline bool rectangular(const Scop& scop, const std::vector<int>& band) {
  std::set<std::string> iters;
  for (int id : band) iters.insert(scop.loops[static_cast<std::size_t>(id)].iterator);
  for (int id : band) {
    const Loop& l = scop.loops[static_cast<std::size_t>(id)];
    if (l.lower.size() != 1 || l.upper.size() != 1) return false;
    for (const auto* e : {&l.lower[0], &l.upper[0]})
      for (const auto& [name, c] : e->coeffs)
        if (iters.count(name)) return false;
  }
  return true;
}

inline void collect_iterators(const Scop& scop, const std::vector<Node>& seq, std::set<std::string>& out) {
  for (const Node& n : seq) {
    if (n.kind == Node::Kind::Loop) {
      const Loop& l = scop.loops[static_cast<std::size_t>(n.index)];
      out.insert(l.iterator);
      collect_iterators(scop, l.body, out);
    } else if (n.kind == Node::Kind::If) {
      collect_iterators(scop, scop.ifs[static_cast<std::size_t>(n.index)].body, out);
    }
  }
}

inline std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < items.size(); ++k) s += (k ? sep : "") + items[k];
  return s;
}

inline std::string plus_tile(const AffineExpr& lower, const std::string& t) {
  std::string step = std::to_string(kTileSize) + " * " + t;
  if (lower == AffineExpr(0)) return step;
  return lower.to_c() + " + " + step;
}

inline void emit_tiled(const Scop& scop, const std::vector<int>& band, const std::vector<std::string>& tiles,
                       int indent, std::string& out) {
  auto pad = [](int n) { return std::string(static_cast<std::size_t>(n), ' '); };
  std::vector<std::string> priv;
  for (std::size_t k = 1; k < tiles.size(); ++k) priv.push_back(tiles[k]);
  for (int id : band) priv.push_back(scop.loops[static_cast<std::size_t>(id)].iterator);
  out += pad(indent) + "#pragma omp parallel for private(" + join(priv, ", ") + ")\n";
  int depth = indent;
  for (std::size_t k = 0; k < band.size(); ++k, depth += 2) {
    const Loop& l = scop.loops[static_cast<std::size_t>(band[k])];
    AffineExpr extent = l.upper[0] - l.lower[0] + (kTileSize - 1);
    out += pad(depth) + "for (" + tiles[k] + " = 0; " + tiles[k] + " < (" + extent.to_c() + ") / " +
           std::to_string(kTileSize) + "; " + tiles[k] + "++) {\n";
  }
  for (std::size_t k = 0; k < band.size(); ++k, depth += 2) {
    const Loop& l = scop.loops[static_cast<std::size_t>(band[k])];
    std::string start = plus_tile(l.lower[0], tiles[k]);
    out += pad(depth) + "for (" + l.iterator + " = " + start + "; " + l.iterator + " < " + start + " + " +
           std::to_string(kTileSize) + " && " + l.iterator + " < " + l.upper[0].to_c() + "; " + l.iterator +
           "++) {\n";
  }
  emit_nodes(scop, scop.loops[static_cast<std::size_t>(band.back())].body, depth, out);
  for (std::size_t k = 0; k < 2 * band.size(); ++k) {
    depth -= 2;
    out += pad(depth) + "}\n";
  }
}

}  // namespace detail

/// The conservative transformation: when no dependence is carried by an
/// outermost loop, every top-level loop gets an OpenMP parallel-for, and
/// perfect rectangular nests of depth >= 2 whose dependences are all
/// loop-independent are tiled by 32 first. Returns nullopt when nothing
/// applies.
inline std::optional<std::string> builtin_region(const ParsedProgram& p, const std::vector<Dependence>& deps) {
  const Scop& scop = p.scop;
  for (const auto& d : deps)
    if (d.level == 1) return std::nullopt;
  bool any_loop = false;
  for (const Node& n : scop.body) any_loop = any_loop || n.kind == Node::Kind::Loop;
  if (!any_loop) return std::nullopt;

  std::set<std::string> taken = p.info.declared;
  for (const auto& l : scop.loops) taken.insert(l.iterator);
  auto tile_name = [&](std::size_t k) {
    std::string base = "t" + std::to_string(k + 1);
    while (taken.count(base)) base = "t" + base;
    return base;
  };

  std::string out;
  for (const Node& n : scop.body) {
    if (n.kind != Node::Kind::Loop) {
      detail::emit_nodes(scop, {n}, 2, out);
      continue;
    }
    const Loop& root = scop.loops[static_cast<std::size_t>(n.index)];
    auto band = detail::perfect_band(scop, root.id);
    bool independent = true;
    for (const auto& d : deps) {
      const Statement& s = scop.statements[static_cast<std::size_t>(d.source_stmt)];
      if (!s.loops.empty() && s.loops[0] == root.id && d.level > 0) independent = false;
    }
    if (band.size() >= 2 && independent && detail::rectangular(scop, band)) {
      std::vector<std::string> tiles;
      for (std::size_t k = 0; k < band.size(); ++k) tiles.push_back(tile_name(k));
      detail::emit_tiled(scop, band, tiles, 2, out);
      continue;
    }
    std::set<std::string> inner;
    detail::collect_iterators(scop, root.body, inner);
    std::string clause = inner.empty() ? "" : " private(" + detail::join({inner.begin(), inner.end()}, ", ") + ")";
    out += "  #pragma omp parallel for" + clause + "\n";
    detail::emit_nodes(scop, {n}, 2, out);
  }
  return out;
}

inline OptimizeResult optimize_builtin(const std::string& program) {
  OptimizeResult r;
  r.backend = "builtin";
  AnalyzedProgram a = analyze_program(program);
  auto region = builtin_region(a.parsed, a.deps);
  if (!region) {
    r.program = program;
    r.region = a.parsed.region.scop;
    r.note = "no outermost-parallel loop; unchanged";
    return r;
  }
  r.transformed = true;
  r.region = *region;
  r.program = splice_scop(program, *region);
  return r;
}

struct ExternalBackendConfig {
  std::string path = "polycc";
  std::vector<std::string> flags{"-q", "-custom-context", "-tile", "-parallel", "-nocloogbacktrack"};
  double timeout_seconds = 300;
};

namespace detail {

// Re-marks the region of a tool output that drops the markers: the lines
// between the longest common prefix and suffix shared with the input.
inline std::string remark_region(const std::string& input, const std::string& output) {
  auto lines = [](const std::string& text) {
    std::vector<std::string> v;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) v.push_back(l);
    return v;
  };
  ScopRegion in = extract_scop_region(input);
  auto pre = lines(in.prefix), post = lines(in.suffix), out = lines(output);
  pre.pop_back();   // the marker lines themselves
  post.erase(post.begin());
  std::size_t head = 0;
  while (head < pre.size() && head < out.size() && pre[head] == out[head]) ++head;
  std::size_t tail = 0;
  while (tail < post.size() && tail + head < out.size() &&
         post[post.size() - 1 - tail] == out[out.size() - 1 - tail])
    ++tail;
  std::string text;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k == head) text += "#pragma scop\n";
    if (k == out.size() - tail) text += "#pragma endscop\n";
    text += out[k] + "\n";
  }
  if (tail == 0) text += "#pragma endscop\n";
  return text;
}

}  // namespace detail

/// Runs the external polyhedral tool on the program. Throws
/// BackendUnavailable when the tool is missing or fails.
inline OptimizeResult optimize_external(const std::string& program, const ExternalBackendConfig& cfg = {}) {
  auto tool = find_executable(cfg.path);
  if (!tool) throw Error(ErrorKind::BackendUnavailable, cfg.path + " not found");
  ScratchDir dir("scopt_ext");
  write_file(dir.path() / "in.c", program);
  std::vector<std::string> argv{tool->string()};
  argv.insert(argv.end(), cfg.flags.begin(), cfg.flags.end());
  argv.insert(argv.end(), {"in.c", "-o", "out.c"});
  ProcessOptions opts;
  opts.cwd = dir.path();
  opts.timeout_seconds = cfg.timeout_seconds;
  auto res = run_process(argv, opts);
  if (!res.ok() || !fs::exists(dir.path() / "out.c"))
    throw Error(ErrorKind::BackendUnavailable, cfg.path + " failed: " + res.err);
  std::string text = read_file(dir.path() / "out.c");
  OptimizeResult r;
  r.backend = "external";
  try {
    r.region = extract_scop_region(text).scop;
    r.program = text;
  } catch (const Error&) {
    r.program = detail::remark_region(program, text);
    r.region = extract_scop_region(r.program).scop;
  }
  r.transformed = r.program != program;
  return r;
}

enum class BackendKind { Builtin, External };

/// The configured backend, falling back to the builtin one (flagged) when
/// the external tool is unavailable.
inline OptimizeResult optimize_example(const std::string& program, BackendKind kind,
                                       const ExternalBackendConfig& cfg = {}) {
  if (kind == BackendKind::External) {
    try {
      return optimize_external(program, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable) throw;
      OptimizeResult r = optimize_builtin(program);
      r.fell_back = true;
      r.note = e.message();
      return r;
    }
  }
  return optimize_builtin(program);
}

}  // namespace scopt
