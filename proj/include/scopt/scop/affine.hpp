#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace scopt {

/// Integer affine form: sum(coefficient * name) + constant. Names are loop
/// iterators or global parameters; zero coefficients are never stored.
struct AffineExpr {
  std::map<std::string, std::int64_t> coeffs;
  std::int64_t constant = 0;

  AffineExpr() = default;
  explicit AffineExpr(std::int64_t c) : constant(c) {}

  static AffineExpr var(const std::string& name, std::int64_t coeff = 1) {
    AffineExpr e;
    if (coeff != 0) e.coeffs[name] = coeff;
    return e;
  }

  std::int64_t coeff(const std::string& name) const {
    auto it = coeffs.find(name);
    return it == coeffs.end() ? 0 : it->second;
  }
  bool is_constant() const { return coeffs.empty(); }

  AffineExpr& operator+=(const AffineExpr& other) {
    for (const auto& [name, c] : other.coeffs) add_term(name, c);
    constant += other.constant;
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& other) {
    for (const auto& [name, c] : other.coeffs) add_term(name, -c);
    constant -= other.constant;
    return *this;
  }
  AffineExpr& operator*=(std::int64_t k) {
    if (k == 0) {
      coeffs.clear();
      constant = 0;
      return *this;
    }
    for (auto& [name, c] : coeffs) c *= k;
    constant *= k;
    return *this;
  }
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, std::int64_t k) { return a *= k; }
  friend AffineExpr operator+(AffineExpr a, std::int64_t k) { a.constant += k; return a; }
  friend AffineExpr operator-(AffineExpr a, std::int64_t k) { a.constant -= k; return a; }
  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;

  void add_term(const std::string& name, std::int64_t c) {
    if (c == 0) return;
    auto& slot = coeffs[name];
    slot += c;
    if (slot == 0) coeffs.erase(name);
  }

  /// Substitutes every name through `lookup`; throws whatever lookup throws.
  std::int64_t evaluate(const std::function<std::int64_t(const std::string&)>& lookup) const {
    std::int64_t v = constant;
    for (const auto& [name, c] : coeffs) v += c * lookup(name);
    return v;
  }
  std::int64_t evaluate(const std::map<std::string, std::int64_t>& env) const {
    return evaluate([&](const std::string& n) { return env.at(n); });
  }

  /// Replaces names for which `value` returns true by their concrete value.
  AffineExpr fold(const std::map<std::string, std::int64_t>& values) const {
    AffineExpr out(constant);
    for (const auto& [name, c] : coeffs) {
      auto it = values.find(name);
      if (it != values.end())
        out.constant += c * it->second;
      else
        out.add_term(name, c);
    }
    return out;
  }

  /// C rendering, e.g. "i + 1", "S1 - 1", "-2 * j + N".
  std::string to_c() const {
    std::string out;
    auto append = [&](std::int64_t c, const std::string& body) {
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      std::int64_t mag = c < 0 ? -c : c;
      if (body.empty()) {
        out += std::to_string(mag);
      } else {
        if (mag != 1) out += std::to_string(mag) + " * ";
        out += body;
      }
    };
    for (const auto& [name, c] : coeffs) append(c, name);
    if (constant != 0 || out.empty()) append(constant, "");
    if (out == "-0") out = "0";
    return out;
  }
};

/// Affine constraint `expr >= 0` or `expr == 0`.
struct AffineConstraint {
  AffineExpr expr;
  bool equality = false;

  friend bool operator==(const AffineConstraint&, const AffineConstraint&) = default;
};

}  // namespace scopt
