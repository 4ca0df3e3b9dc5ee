#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "scopt/scop/affine.hpp"
#include "scopt/util/error.hpp"

namespace scopt {

/// Limits exceeded inside the solver; callers fall back to scanning.
struct SolverLimit : Error {
  explicit SolverLimit(const std::string& what) : Error(ErrorKind::BestEffort, what) {}
};

/// Conjunction of integer linear constraints over named bounded variables.
///
/// Rational feasibility and variable bounds come from Fourier-Motzkin
/// elimination (with gcd tightening, which is sound for integer points).
/// lexmin() branches over the variables in the given order, lowest value
/// first, so the first complete assignment is the lexicographic minimum.
class IntSystem {
 public:
  using Row = std::vector<std::int64_t>;  // n coefficients followed by the constant

  explicit IntSystem(std::vector<std::string> vars) : names_(std::move(vars)) {
    for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = static_cast<int>(i);
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  int var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorKind::InvalidArgument, "IntSystem: unknown variable " + name);
    return it->second;
  }

  /// expr >= 0
  void add_ge(const AffineExpr& e) { ineqs_.push_back(to_row(e)); }
  /// expr == 0
  void add_eq(const AffineExpr& e) { eqs_.push_back(to_row(e)); }

  /// Lexicographic minimum over `order` (remaining variables are branched
  /// afterwards in index order). nullopt iff no integer point exists.
  std::optional<std::vector<std::int64_t>> lexmin(const std::vector<int>& order) const {
    std::vector<int> full = order;
    std::vector<bool> seen(size(), false);
    for (int v : order) seen[static_cast<std::size_t>(v)] = true;
    for (std::size_t v = 0; v < size(); ++v)
      if (!seen[v]) full.push_back(static_cast<int>(v));
    std::vector<std::int64_t> point(size(), 0);
    std::size_t budget = node_budget_;
    State st{ineqs_, eqs_};
    if (!normalize_all(st)) return std::nullopt;
    if (!search(st, full, 0, point, budget)) return std::nullopt;
    return point;
  }

  bool feasible() const { return lexmin({}).has_value(); }

  void set_node_budget(std::size_t n) { node_budget_ = n; }

 private:
  struct State {
    std::vector<Row> ineqs;
    std::vector<Row> eqs;
  };

  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  std::vector<Row> ineqs_;
  std::vector<Row> eqs_;
  std::size_t node_budget_ = 200000;
  static constexpr std::size_t kMaxRows = 4000;

  Row to_row(const AffineExpr& e) const {
    Row r(size() + 1, 0);
    for (const auto& [name, c] : e.coeffs) r[static_cast<std::size_t>(var(name))] = c;
    r.back() = e.constant;
    return r;
  }

  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX / 4 || v < INT64_MIN / 4) throw SolverLimit("coefficient overflow");
    return static_cast<std::int64_t>(v);
  }

  /// Returns false when the row is a violated constant constraint.
  static bool normalize(Row& r, bool equality) {
    std::int64_t g = 0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) g = std::gcd(g, r[i] < 0 ? -r[i] : r[i]);
    std::int64_t& c = r.back();
    if (g == 0) return equality ? c == 0 : c >= 0;
    if (equality) {
      if (c % g != 0) return false;
      for (auto& x : r) x /= g;
      return true;
    }
    for (std::size_t i = 0; i + 1 < r.size(); ++i) r[i] /= g;
    c = floor_div(c, g);
    return true;
  }

  static bool is_constant(const Row& r) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
      if (r[i] != 0) return false;
    return true;
  }

  static bool normalize_all(State& st) {
    for (auto& r : st.ineqs)
      if (!normalize(r, false)) return false;
    for (auto& r : st.eqs)
      if (!normalize(r, true)) return false;
    return true;
  }

  static void substitute(State& st, int v, std::int64_t value) {
    auto apply = [&](Row& r) {
      auto k = static_cast<std::size_t>(v);
      r.back() = narrow(static_cast<__int128>(r.back()) + static_cast<__int128>(r[k]) * value);
      r[k] = 0;
    };
    for (auto& r : st.ineqs) apply(r);
    for (auto& r : st.eqs) apply(r);
  }

  /// Row combination a*x + b*y eliminating one variable; factors positive.
  static Row combine(const Row& x, std::int64_t a, const Row& y, std::int64_t b) {
    Row out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = narrow(static_cast<__int128>(x[i]) * a + static_cast<__int128>(y[i]) * b);
    return out;
  }

  /// Projects the system onto variable `keep` (all other variables with a
  /// nonzero coefficient are eliminated). Returns false if infeasible over
  /// the rationals (after integer tightening); otherwise the bounds.
  static bool project(State st, int keep, std::optional<std::int64_t>& lo, std::optional<std::int64_t>& hi) {
    auto k = static_cast<std::size_t>(keep);
    const std::size_t n = st.ineqs.empty() ? (st.eqs.empty() ? 0 : st.eqs[0].size() - 1) : st.ineqs[0].size() - 1;

    // Equalities: eliminate any variable other than `keep` they mention.
    while (true) {
      bool progressed = false;
      for (std::size_t e = 0; e < st.eqs.size(); ++e) {
        Row eq = st.eqs[e];
        std::size_t pivot = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == k || eq[i] == 0) continue;
          if (pivot == n || std::llabs(eq[i]) < std::llabs(eq[pivot])) pivot = i;
        }
        if (pivot == n) continue;
        if (eq[pivot] < 0)
          for (auto& x : eq) x = -x;
        std::int64_t p = eq[pivot];
        st.eqs.erase(st.eqs.begin() + static_cast<std::ptrdiff_t>(e));
        auto eliminate = [&](Row& r, bool equality) -> bool {
          std::int64_t q = r[pivot];
          if (q == 0) return true;
          r = combine(r, p, eq, -q);
          return normalize(r, equality);
        };
        for (auto& r : st.eqs)
          if (!eliminate(r, true)) return false;
        for (auto& r : st.ineqs)
          if (!eliminate(r, false)) return false;
        progressed = true;
        break;
      }
      if (!progressed) break;
    }
    // Remaining equalities mention only `keep` (or nothing).
    for (const auto& eq : st.eqs) {
      if (is_constant(eq)) {
        if (eq.back() != 0) return false;
        continue;
      }
      std::int64_t a = eq[k], c = eq.back();
      if (c % a != 0) return false;
      std::int64_t v = -c / a;
      if ((lo && v < *lo) || (hi && v > *hi)) return false;
      lo = v;
      hi = v;
    }

    // Fourier-Motzkin on the inequalities.
    std::vector<Row> rows;
    for (auto& r : st.ineqs) {
      if (is_constant(r)) {
        if (r.back() < 0) return false;
        continue;
      }
      rows.push_back(std::move(r));
    }
    while (true) {
      // Choose the variable (other than keep) with the smallest p*q product.
      std::size_t best = n;
      std::size_t best_cost = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        std::size_t pos = 0, neg = 0;
        for (const auto& r : rows) {
          if (r[i] > 0) ++pos;
          else if (r[i] < 0) ++neg;
        }
        if (pos + neg == 0) continue;
        std::size_t cost = pos * neg;
        if (best == n || cost < best_cost) {
          best = i;
          best_cost = cost;
        }
      }
      if (best == n) break;
      std::vector<Row> next, pos, neg;
      for (auto& r : rows) {
        if (r[best] > 0) pos.push_back(std::move(r));
        else if (r[best] < 0) neg.push_back(std::move(r));
        else next.push_back(std::move(r));
      }
      for (const auto& p : pos)
        for (const auto& q : neg) {
          Row r = combine(p, -q[best], q, p[best]);
          if (!normalize(r, false)) return false;
          if (is_constant(r)) continue;
          next.push_back(std::move(r));
        }
      // Keep only the tightest constant per coefficient vector.
      std::map<std::vector<std::int64_t>, std::int64_t> tightest;
      for (const auto& r : next) {
        std::vector<std::int64_t> key(r.begin(), r.end() - 1);
        auto [it, inserted] = tightest.emplace(key, r.back());
        if (!inserted) it->second = std::min(it->second, r.back());
      }
      rows.clear();
      for (const auto& [key, c] : tightest) {
        Row r(key);
        r.push_back(c);
        rows.push_back(std::move(r));
      }
      if (rows.size() > kMaxRows) throw SolverLimit("Fourier-Motzkin row explosion");
    }
    for (const auto& r : rows) {
      std::int64_t a = r[k], c = r.back();
      if (a > 0) {
        std::int64_t b = ceil_div(-c, a);
        if (!lo || b > *lo) lo = b;
      } else if (a < 0) {
        std::int64_t b = floor_div(c, -a);
        if (!hi || b < *hi) hi = b;
      }
    }
    return !(lo && hi && *lo > *hi);
  }

  bool search(const State& st, const std::vector<int>& order, std::size_t depth,
              std::vector<std::int64_t>& point, std::size_t& budget) const {
    if (depth == order.size()) {
      for (const auto& r : st.ineqs)
        if (r.back() < 0) return false;
      for (const auto& r : st.eqs)
        if (r.back() != 0) return false;
      return true;
    }
    if (budget == 0) throw SolverLimit("search budget exhausted");
    --budget;
    int v = order[depth];
    std::optional<std::int64_t> lo, hi;
    if (!project(st, v, lo, hi)) return false;
    bool mentioned = false;
    for (const auto& r : st.ineqs) mentioned |= r[static_cast<std::size_t>(v)] != 0;
    for (const auto& r : st.eqs) mentioned |= r[static_cast<std::size_t>(v)] != 0;
    if (!mentioned) {
      // Free variable: any value works; pick the smallest allowed, else 0.
      lo = lo ? lo : (hi ? std::optional<std::int64_t>(std::min<std::int64_t>(0, *hi)) : std::optional<std::int64_t>(0));
      hi = lo;
    }
    if (!lo || !hi) throw SolverLimit("unbounded variable " + names_[static_cast<std::size_t>(v)]);
    for (std::int64_t value = *lo; value <= *hi; ++value) {
      State next = st;
      substitute(next, v, value);
      if (!normalize_all(next)) continue;
      point[static_cast<std::size_t>(v)] = value;
      if (search(next, order, depth + 1, point, budget)) return true;
      if (budget == 0) throw SolverLimit("search budget exhausted");
    }
    return false;
  }
};

}  // namespace scopt
