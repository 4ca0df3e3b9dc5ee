#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scopt/scop/model.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

/// A program array the harness can fill and dump.
struct HarnessArray {
  std::string name;
  char type = 'd';                // d(ouble), f(loat), i(nt), l(ong)
  std::vector<std::string> dims;  // C expressions, outermost first
  std::int64_t elements = 1;
  bool output = false;  // written by the SCoP
};

/// One fill statement. The value of an element is an RPN formula over the
/// element's indices i0, i1, ... with + - * / % (division or remainder by
/// zero gives 0), or an explicit value list cycled in row-major order.
struct FillRule {
  std::string array;
  std::vector<std::string> rpn;
  std::vector<double> values;

  bool explicit_values() const { return rpn.empty(); }
  friend bool operator==(const FillRule&, const FillRule&) = default;
};

enum class Provenance { Seed, ValueMutant, OperatorMutant, StatementMutant };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Seed: return "seed";
    case Provenance::ValueMutant: return "value-mutant";
    case Provenance::OperatorMutant: return "operator-mutant";
    case Provenance::StatementMutant: return "statement-mutant";
  }
  return "?";
}

/// Fill statements run in order before the region; arrays without one keep
/// the program's own initialisation.
struct TestInput {
  int id = 0;
  std::vector<FillRule> fills;
  Provenance provenance = Provenance::Seed;

  /// The text the harness reads: one "fill NAME tokens..." or
  /// "values NAME v..." line per statement.
  std::string text() const {
    std::ostringstream out;
    out.precision(17);
    for (const auto& f : fills) {
      out << (f.explicit_values() ? "values " : "fill ") << f.array;
      if (f.explicit_values())
        for (double v : f.values) out << ' ' << v;
      else
        for (const auto& t : f.rpn) out << ' ' << t;
      out << '\n';
    }
    return out.str();
  }
};

namespace detail {

inline bool is_operator(const std::string& t) { return t.size() == 1 && std::string("+-*/%").find(t[0]) != std::string::npos; }

inline bool is_index(const std::string& t) {
  if (t.size() < 2 || t[0] != 'i') return false;
  for (std::size_t k = 1; k < t.size(); ++k)
    if (t[k] < '0' || t[k] > '9') return false;
  return true;
}

inline bool is_number(const std::string& t) {
  if (t.empty()) return false;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

inline std::string number_text(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace detail

/// A well-formed rule: every token known, indices within the rank, and the
/// formula leaves exactly one value.
inline bool valid_rule(const FillRule& f, std::size_t rank) {
  if (f.explicit_values()) return !f.values.empty();
  int depth = 0;
  for (const auto& t : f.rpn) {
    if (detail::is_operator(t)) {
      if (depth < 2) return false;
      --depth;
    } else if (detail::is_index(t)) {
      if (static_cast<std::size_t>(std::stoul(t.substr(1))) >= rank) return false;
      ++depth;
    } else if (detail::is_number(t)) {
      ++depth;
    } else {
      return false;
    }
  }
  return depth == 1;
}

/// Reference evaluation of a rule, matching the harness.
inline double eval_rule(const FillRule& f, const std::vector<std::int64_t>& idx, std::int64_t flat) {
  if (f.explicit_values()) return f.values[static_cast<std::size_t>(flat) % f.values.size()];
  std::vector<double> st;
  for (const auto& t : f.rpn) {
    if (detail::is_operator(t)) {
      double b = st.back();
      st.pop_back();
      double a = st.back();
      st.pop_back();
      double r = 0;
      switch (t[0]) {
        case '+': r = a + b; break;
        case '-': r = a - b; break;
        case '*': r = a * b; break;
        case '/': r = b != 0 ? a / b : 0; break;
        default: r = b != 0 ? std::fmod(a, b) : 0;
      }
      st.push_back(r);
    } else if (detail::is_index(t)) {
      st.push_back(static_cast<double>(idx.at(std::stoul(t.substr(1)))));
    } else {
      st.push_back(std::strtod(t.c_str(), nullptr));
    }
  }
  double v = st.empty() ? 0 : st.back();
  return std::isfinite(v) ? v : 0;
}

/// Parses fill text (the format of TestInput::text). Returns nullopt when a
/// line is malformed or names an unknown array.
inline std::optional<std::vector<FillRule>> parse_fills(const std::string& text,
                                                          const std::vector<HarnessArray>& arrays) {
  std::map<std::string, std::size_t> rank;
  for (const auto& a : arrays) rank[a.name] = a.dims.size();
  std::vector<FillRule> out;
  std::stringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::stringstream ss(line);
    std::string kind, name;
    if (!(ss >> kind)) continue;
    if (!(ss >> name) || !rank.count(name)) return std::nullopt;
    FillRule f;
    f.array = name;
    if (kind == "fill") {
      for (std::string t; ss >> t;) f.rpn.push_back(t);
      if (f.rpn.empty()) return std::nullopt;
    } else if (kind == "values") {
      for (std::string t; ss >> t;) {
        if (!detail::is_number(t)) return std::nullopt;
        f.values.push_back(std::strtod(t.c_str(), nullptr));
      }
    } else {
      return std::nullopt;
    }
    if (!valid_rule(f, rank[name])) return std::nullopt;
    out.push_back(std::move(f));
  }
  if (out.empty()) return std::nullopt;
  return out;
}

/// Built-in seeds: an index-dependent affine fill, a constant fill and an
/// alternating-sign fill, each covering every array.
inline std::vector<TestInput> builtin_seed_inputs(const std::vector<HarnessArray>& arrays) {
  std::vector<TestInput> seeds(3);
  int salt = 1;
  for (const auto& a : arrays) {
    const std::size_t rank = a.dims.size();
    FillRule affine{a.name, {std::to_string(salt)}, {}};
    for (std::size_t d = 0; d < rank; ++d)
      affine.rpn.insert(affine.rpn.end(), {"i" + std::to_string(d), std::to_string(d + 2 + salt % 3), "*", "+"});
    affine.rpn.insert(affine.rpn.end(), {"31", "%"});
    if (a.type == 'd' || a.type == 'f') affine.rpn.insert(affine.rpn.end(), {"31", "/"});
    seeds[0].fills.push_back(affine);

    seeds[1].fills.push_back(FillRule{a.name, {"1"}, {}});

    FillRule alt{a.name, {}, {}};
    if (rank == 0) {
      alt.rpn = {"-1"};
    } else {
      alt.rpn = {"i0"};
      for (std::size_t d = 1; d < rank; ++d) alt.rpn.insert(alt.rpn.end(), {"i" + std::to_string(d), "+"});
      alt.rpn.insert(alt.rpn.end(), {"2", "%", "2", "*", "1", "-"});
    }
    seeds[2].fills.push_back(alt);
    salt += 2;
  }
  for (int k = 0; k < 3; ++k) seeds[static_cast<std::size_t>(k)].id = k;
  return seeds;
}

struct SeedInputs {
  std::vector<TestInput> inputs;
  bool fell_back = false;  // supplied text unusable, builtin seeds used
};

/// Seeds from externally produced fill text (e.g. a model's answer), one
/// input per blank-line-separated block; builtin seeds when nothing parses.
inline SeedInputs seed_inputs_from_text(const std::string& text, const std::vector<HarnessArray>& arrays) {
  SeedInputs out;
  std::string block;
  auto flush = [&] {
    if (auto fills = parse_fills(block, arrays)) {
      TestInput t;
      t.id = static_cast<int>(out.inputs.size());
      t.fills = std::move(*fills);
      out.inputs.push_back(std::move(t));
    }
    block.clear();
  };
  std::stringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      flush();
    else
      block += line + "\n";
  }
  flush();
  if (out.inputs.empty()) {
    out.inputs = builtin_seed_inputs(arrays);
    out.fell_back = true;
  }
  return out;
}

enum class MutationKind { Value, Operator, Statement };

/// Replacement catalog for a constant: sign flip, times ten, and the
/// boundary values 0, 1, -1, minus the constant itself.
inline std::vector<double> value_catalog(double c) {
  std::vector<double> out;
  for (double v : {-c, 10 * c, 0.0, 1.0, -1.0})
    if (v != c && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

inline TestInput mutate(const TestInput& in, MutationKind kind, Rng& rng) {
  TestInput out = in;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n) - 1)); };
  switch (kind) {
    case MutationKind::Value: {
      out.provenance = Provenance::ValueMutant;
      std::vector<std::pair<std::size_t, std::size_t>> sites;  // (fill, token or value)
      for (std::size_t f = 0; f < out.fills.size(); ++f) {
        const auto& r = out.fills[f];
        if (r.explicit_values())
          for (std::size_t k = 0; k < r.values.size(); ++k) sites.push_back({f, k});
        else
          for (std::size_t k = 0; k < r.rpn.size(); ++k)
            if (detail::is_number(r.rpn[k])) sites.push_back({f, k});
      }
      if (sites.empty()) break;
      auto [f, k] = sites[pick(sites.size())];
      auto& r = out.fills[f];
      double c = r.explicit_values() ? r.values[k] : std::strtod(r.rpn[k].c_str(), nullptr);
      auto choices = value_catalog(c);
      double v = choices[pick(choices.size())];
      if (r.explicit_values())
        r.values[k] = v;
      else
        r.rpn[k] = detail::number_text(v);
      break;
    }
    case MutationKind::Operator: {
      out.provenance = Provenance::OperatorMutant;
      std::vector<std::pair<std::size_t, std::size_t>> sites;
      for (std::size_t f = 0; f < out.fills.size(); ++f)
        for (std::size_t k = 0; k < out.fills[f].rpn.size(); ++k) {
          const auto& t = out.fills[f].rpn[k];
          if (t == "+" || t == "-" || t == "*") sites.push_back({f, k});
        }
      if (sites.empty()) break;
      auto [f, k] = sites[pick(sites.size())];
      std::string& t = out.fills[f].rpn[k];
      std::vector<std::string> others;
      for (const char* o : {"+", "-", "*"})
        if (t != o) others.push_back(o);
      t = others[pick(others.size())];
      break;
    }
    case MutationKind::Statement: {
      out.provenance = Provenance::StatementMutant;
      if (out.fills.empty()) break;
      int op = static_cast<int>(rng.uniform(0, out.fills.size() >= 2 ? 2 : 1));
      if (op == 0) {
        out.fills.push_back(out.fills[pick(out.fills.size())]);
      } else if (op == 1) {
        out.fills.erase(out.fills.begin() + static_cast<std::ptrdiff_t>(pick(out.fills.size())));
      } else {
        // Only fills of different arrays are independent.
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < out.fills.size(); ++a)
          for (std::size_t b = a + 1; b < out.fills.size(); ++b)
            if (out.fills[a].array != out.fills[b].array) pairs.push_back({a, b});
        if (pairs.empty()) {
          out.fills.push_back(out.fills[pick(out.fills.size())]);
        } else {
          auto [a, b] = pairs[pick(pairs.size())];
          std::swap(out.fills[a], out.fills[b]);
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace scopt
