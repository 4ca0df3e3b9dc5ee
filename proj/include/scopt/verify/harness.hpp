#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "scopt/scop/program.hpp"
#include "scopt/scop/region.hpp"
#include "scopt/synth/program.hpp"
#include "scopt/verify/inputs.hpp"

namespace scopt {

/// C translation unit linked into every verified binary. It fills arrays
/// from the rules in $SCOPT_INPUT, times the region with omp_get_wtime,
/// and writes checksums (plus every element when $SCOPT_DUMP is set) to
/// $SCOPT_OUTPUT.
inline constexpr const char* kHarnessSource = R"C(#define _POSIX_C_SOURCE 200809L
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#ifdef _OPENMP
#include <omp.h>
#else
#include <time.h>
#endif

typedef struct {
  char *name;
  int is_values;
  int ntok;
  char **tok;
  double *vals;
} scopt_rule;

static scopt_rule *scopt_rules;
static int scopt_nrules = -1;
static FILE *scopt_out;
static double scopt_t0, scopt_elapsed;

static double scopt_now(void) {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
#endif
}

static void scopt_load(void) {
  const char *path;
  FILE *f;
  char *line = NULL;
  size_t cap = 0;
  if (scopt_nrules >= 0) return;
  scopt_nrules = 0;
  path = getenv("SCOPT_INPUT");
  if (!path || !(f = fopen(path, "r"))) return;
  while (getline(&line, &cap, f) > 0) {
    scopt_rule r;
    char *save = NULL, *kind = strtok_r(line, " \t\r\n", &save), *t;
    if (!kind) continue;
    memset(&r, 0, sizeof r);
    r.is_values = strcmp(kind, "values") == 0;
    t = strtok_r(NULL, " \t\r\n", &save);
    if (!t) continue;
    r.name = strdup(t);
    while ((t = strtok_r(NULL, " \t\r\n", &save))) {
      r.tok = realloc(r.tok, sizeof(char *) * (size_t)(r.ntok + 1));
      r.vals = realloc(r.vals, sizeof(double) * (size_t)(r.ntok + 1));
      r.tok[r.ntok] = strdup(t);
      r.vals[r.ntok] = strtod(t, NULL);
      r.ntok++;
    }
    if (r.ntok == 0) continue;
    scopt_rules = realloc(scopt_rules, sizeof(scopt_rule) * (size_t)(scopt_nrules + 1));
    scopt_rules[scopt_nrules++] = r;
  }
  free(line);
  fclose(f);
}

static double scopt_eval(const scopt_rule *r, const long *idx, int rank) {
  double st[64];
  int sp = 0, t;
  for (t = 0; t < r->ntok; ++t) {
    const char *s = r->tok[t];
    if (s[0] == 'i' && s[1] >= '0' && s[1] <= '9') {
      int d = atoi(s + 1);
      st[sp++] = d < rank ? (double)idx[d] : 0.0;
    } else if (s[1] == '\0' && strchr("+-*/%", s[0])) {
      double a, b, v;
      if (sp < 2) return 0.0;
      b = st[--sp];
      a = st[--sp];
      switch (s[0]) {
        case '+': v = a + b; break;
        case '-': v = a - b; break;
        case '*': v = a * b; break;
        case '/': v = b != 0 ? a / b : 0.0; break;
        default: v = b != 0 ? fmod(a, b) : 0.0; break;
      }
      st[sp++] = v;
    } else {
      st[sp++] = r->vals[t];
    }
    if (sp >= 64) return 0.0;
  }
  if (sp == 0 || !isfinite(st[sp - 1])) return 0.0;
  return st[sp - 1];
}

static void scopt_store(void *p, char type, long e, double v) {
  switch (type) {
    case 'f': ((float *)p)[e] = (float)v; break;
    case 'i': ((int *)p)[e] = (int)v; break;
    case 'l': ((long *)p)[e] = (long)v; break;
    default: ((double *)p)[e] = v; break;
  }
}

static double scopt_load_value(const void *p, char type, long e) {
  switch (type) {
    case 'f': return (double)((const float *)p)[e];
    case 'i': return (double)((const int *)p)[e];
    case 'l': return (double)((const long *)p)[e];
    default: return ((const double *)p)[e];
  }
}

static long scopt_total(int rank, const long *dims) {
  long n = 1;
  int d;
  for (d = 0; d < rank; ++d) n *= dims[d];
  return n;
}

static void scopt_unflatten(long e, int rank, const long *dims, long *idx) {
  int d;
  for (d = rank - 1; d >= 0; --d) {
    idx[d] = e % dims[d];
    e /= dims[d];
  }
}

void scopt_harness_fill(const char *name, void *ptr, char type, int rank, const long *dims) {
  long total = scopt_total(rank, dims), e, idx[16];
  int k;
  scopt_load();
  for (k = 0; k < scopt_nrules; ++k) {
    const scopt_rule *r = &scopt_rules[k];
    if (strcmp(r->name, name) != 0) continue;
    for (e = 0; e < total; ++e) {
      double v;
      scopt_unflatten(e, rank, dims, idx);
      v = r->is_values ? r->vals[e % r->ntok] : scopt_eval(r, idx, rank);
      scopt_store(ptr, type, e, v);
    }
  }
}

void scopt_harness_begin(void) { scopt_t0 = scopt_now(); }

void scopt_harness_end(void) { scopt_elapsed = scopt_now() - scopt_t0; }

static FILE *scopt_output(void) {
  if (!scopt_out) {
    const char *path = getenv("SCOPT_OUTPUT");
    scopt_out = path ? fopen(path, "w") : NULL;
    if (!scopt_out) scopt_out = stdout;
  }
  return scopt_out;
}

void scopt_harness_dump(const char *name, const void *ptr, char type, int rank, const long *dims) {
  FILE *out = scopt_output();
  long total = scopt_total(rank, dims), e, idx[16];
  double sum = 0.0;
  int d;
  for (e = 0; e < total; ++e) {
    long w = 0;
    scopt_unflatten(e, rank, dims, idx);
    for (d = 0; d < rank; ++d) w += (d + 1) * idx[d];
    sum += (double)(1 + w % 17) * scopt_load_value(ptr, type, e);
  }
  fprintf(out, "array %s %c %ld %.10e\n", name, type, total, sum);
  if (getenv("SCOPT_DUMP"))
    for (e = 0; e < total; ++e) fprintf(out, "%.17g\n", scopt_load_value(ptr, type, e));
}

void scopt_harness_finish(void) {
  FILE *out = scopt_output();
  fprintf(out, "time %.9f\n", scopt_elapsed);
  fprintf(stderr, "SCOPT_TIME %.9f\n", scopt_elapsed);
  fflush(out);
  if (out != stdout) fclose(out);
  exit(0);
}
)C";

inline constexpr const char* kHarnessPrototypes =
    "void scopt_harness_fill(const char *, void *, char, int, const long *);\n"
    "void scopt_harness_begin(void);\n"
    "void scopt_harness_end(void);\n"
    "void scopt_harness_dump(const char *, const void *, char, int, const long *);\n"
    "void scopt_harness_finish(void);\n";

inline char harness_type(const std::string& element_type) {
  if (element_type == "double") return 'd';
  if (element_type == "float") return 'f';
  if (element_type == "int") return 'i';
  if (element_type == "long") return 'l';
  return 0;
}

/// Arrays of the original region the harness handles: declared with known
/// shape and a plain numeric element type. Outputs are the written arrays
/// unless `outputs` names them explicitly.
inline std::vector<HarnessArray> harness_arrays(const ParsedProgram& p, const std::vector<std::string>& outputs = {}) {
  std::vector<HarnessArray> out;
  const auto& env = p.info.params;
  auto written = written_arrays(p.scop);
  for (const auto& [name, info] : p.scop.arrays) {
    auto decl = p.info.arrays.find(name);
    if (decl == p.info.arrays.end()) continue;
    char type = harness_type(decl->second.element_type);
    if (!type) continue;
    HarnessArray a;
    a.name = name;
    a.type = type;
    bool known = true;
    for (const auto& d : decl->second.dims) {
      a.dims.push_back(d.to_c());
      try {
        a.elements *= d.evaluate(env);
      } catch (const std::exception&) {
        known = false;
      }
    }
    if (!known) continue;
    a.output = outputs.empty() ? std::find(written.begin(), written.end(), name) != written.end()
                               : std::find(outputs.begin(), outputs.end(), name) != outputs.end();
    out.push_back(std::move(a));
  }
  return out;
}

namespace detail {

inline std::string harness_call(const char* fn, const HarnessArray& a, bool mutable_ptr) {
  std::string ptr = std::string(mutable_ptr ? "(void *)" : "(const void *)") + (a.dims.empty() ? "&" : "") + a.name;
  std::string dims = "0";
  if (!a.dims.empty()) {
    dims = "(const long[]){";
    for (std::size_t k = 0; k < a.dims.size(); ++k) dims += (k ? ", " : "") + std::string("(long)(") + a.dims[k] + ")";
    dims += "}";
  }
  return std::string("  ") + fn + "(\"" + a.name + "\", " + ptr + ", '" + a.type + "', " +
         std::to_string(a.dims.size()) + ", " + dims + ");\n";
}

inline int count_lines(std::string_view s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace detail

/// The program with harness calls around its region: fills and the timer
/// start above `#pragma scop`, the timer stop, dumps and exit below
/// `#pragma endscop`. #line directives keep diagnostics and coverage on the
/// line numbers of `file_name`.
inline std::string instrument_program(std::string_view program, const std::vector<HarnessArray>& arrays,
                                      const std::string& file_name = "program.c") {
  ScopRegion r = extract_scop_region(program);
  std::size_t open_line = r.prefix.rfind('\n', r.prefix.size() >= 2 ? r.prefix.size() - 2 : 0);
  open_line = open_line == std::string::npos ? 0 : open_line + 1;
  std::string before_marker = r.prefix.substr(0, open_line);
  std::string marker = r.prefix.substr(open_line);
  const int marker_line = detail::count_lines(before_marker) + 1;

  std::size_t close_end = r.suffix.find('\n');
  std::string end_marker = close_end == std::string::npos ? r.suffix + "\n" : r.suffix.substr(0, close_end + 1);
  std::string after = close_end == std::string::npos ? "" : r.suffix.substr(close_end + 1);
  const int end_line = marker_line + 1 + detail::count_lines(r.scop);
  auto line_directive = [&](int n) { return "#line " + std::to_string(n) + " \"" + file_name + "\"\n"; };

  const std::string harness_file = "#line 1 \"<scopt-harness>\"\n";
  std::string out = kHarnessPrototypes + line_directive(1) + before_marker + harness_file;
  for (const auto& a : arrays) out += detail::harness_call("scopt_harness_fill", a, true);
  out += "  scopt_harness_begin();\n" + line_directive(marker_line) + marker + r.scop + end_marker;
  out += harness_file + "  scopt_harness_end();\n";
  for (const auto& a : arrays)
    if (a.output) out += detail::harness_call("scopt_harness_dump", a, false);
  out += "  scopt_harness_finish();\n" + line_directive(end_line + 1) + after;
  return out;
}

/// 1-based line numbers of the two markers in `program`.
inline std::pair<int, int> marker_lines(std::string_view program) {
  ScopRegion r = extract_scop_region(program);
  int open = detail::count_lines(r.prefix);
  return {open, open + 1 + detail::count_lines(r.scop)};
}

}  // namespace scopt
