#pragma once

// Sparse multivariate polynomials with arbitrary-precision integer coefficients.

#include "walshlab/numeric.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace walshlab {

using Var = std::uint32_t;

/// Variables below this index are reserved for group coordinates of n;
/// symbolic parameters (shift elements) are allocated from here upward.
inline constexpr Var kFirstParam = 8;

/// Sorted (variable, exponent) pairs with positive exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::pair<Var, std::uint32_t>> powers) : powers_(std::move(powers)) {
    std::sort(powers_.begin(), powers_.end());
    std::vector<std::pair<Var, std::uint32_t>> merged;
    for (const auto& [v, e] : powers_) {
      if (e == 0) continue;
      if (!merged.empty() && merged.back().first == v)
        merged.back().second += e;
      else
        merged.emplace_back(v, e);
    }
    powers_ = std::move(merged);
  }

  static Monomial var(Var v, std::uint32_t e = 1) { return Monomial({{v, e}}); }

  const std::vector<std::pair<Var, std::uint32_t>>& powers() const { return powers_; }
  bool is_one() const { return powers_.empty(); }

  std::uint32_t degree() const {
    std::uint32_t d = 0;
    for (const auto& p : powers_) d += p.second;
    return d;
  }

  template <class Pred>
  std::uint32_t degree_if(Pred&& pred) const {
    std::uint32_t d = 0;
    for (const auto& [v, e] : powers_)
      if (pred(v)) d += e;
    return d;
  }

  std::uint32_t exponent(Var v) const {
    for (const auto& [w, e] : powers_)
      if (w == v) return e;
    return 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    std::vector<std::pair<Var, std::uint32_t>> out;
    out.reserve(a.powers_.size() + b.powers_.size());
    auto i = a.powers_.begin();
    auto j = b.powers_.begin();
    while (i != a.powers_.end() || j != b.powers_.end()) {
      if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first))
        out.push_back(*i++);
      else if (i == a.powers_.end() || j->first < i->first)
        out.push_back(*j++);
      else {
        out.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    Monomial m;
    m.powers_ = std::move(out);
    return m;
  }

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::pair<Var, std::uint32_t>> powers_;
};

class Poly {
 public:
  using Terms = std::map<Monomial, BigInt>;

  Poly() = default;
  Poly(int c) : Poly(BigInt(c)) {}
  Poly(BigInt c) {
    if (c != 0) terms_.emplace(Monomial{}, std::move(c));
  }

  static Poly var(Var v) {
    Poly p;
    p.terms_.emplace(Monomial::var(v), BigInt(1));
    return p;
  }

  static Poly monomial(Monomial m, BigInt c) {
    Poly p;
    if (c != 0) p.terms_.emplace(std::move(m), std::move(c));
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

  BigInt constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  /// Maximal degree counting only variables accepted by pred.
  template <class Pred>
  std::uint32_t degree_if(Pred&& pred) const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree_if(pred));
    return d;
  }

  /// True if no variable accepted by pred occurs.
  template <class Pred>
  bool free_of(Pred&& pred) const {
    return degree_if(pred) == 0;
  }

  std::vector<Var> vars() const {
    std::vector<Var> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, e] : m.powers()) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// One past the largest variable index that occurs (0 for constants).
  Var var_bound() const {
    Var b = 0;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, e] : m.powers()) b = std::max(b, v + 1);
    return b;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    if (a.is_zero() || b.is_zero()) return out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly pow(std::uint32_t e) const {
    Poly result(1);
    Poly base = *this;
    while (e) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  /// Simultaneous substitution of variables; unmapped variables stay symbolic.
  Poly substitute(const std::map<Var, Poly>& subs) const {
    Poly out;
    std::map<std::pair<Var, std::uint32_t>, Poly> power_cache;
    auto power_of = [&](Var v, std::uint32_t e) -> const Poly& {
      auto key = std::make_pair(v, e);
      auto it = power_cache.find(key);
      if (it != power_cache.end()) return it->second;
      auto s = subs.find(v);
      Poly val = s == subs.end() ? Poly::monomial(Monomial::var(v, e), 1) : s->second.pow(e);
      return power_cache.emplace(key, std::move(val)).first->second;
    };
    for (const auto& [m, c] : terms_) {
      Poly term(c);
      for (const auto& [v, e] : m.powers()) {
        term *= power_of(v, e);
        if (term.is_zero()) break;
      }
      out += term;
    }
    return out;
  }

  /// Exact evaluation; throws if a variable has no value.
  BigInt evaluate(const std::map<Var, BigInt>& values) const {
    BigInt sum = 0;
    for (const auto& [m, c] : terms_) {
      BigInt t = c;
      for (const auto& [v, e] : m.powers()) {
        auto it = values.find(v);
        if (it == values.end()) throw Error("unbound variable v" + std::to_string(v) + " in evaluation");
        t *= ipow(it->second, e);
      }
      sum += t;
    }
    return sum;
  }

  friend bool operator==(const Poly&, const Poly&) = default;
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

  /// Human-readable form, variables n0.. for coordinates and p<k> for parameters.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      BigInt mag = mp::abs(c);
      out += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
      first = false;
      bool coeff_shown = !(mag == 1) || m.is_one();
      if (coeff_shown) out += mag.str();
      bool need_star = coeff_shown;
      for (const auto& [v, e] : m.powers()) {
        if (need_star) out += "*";
        out += var_name(v);
        if (e > 1) out += "^" + std::to_string(e);
        need_star = true;
      }
    }
    return out;
  }

  static std::string var_name(Var v) {
    if (v < kFirstParam) return "n" + std::to_string(v);
    return "p" + std::to_string(v - kFirstParam);
  }

 private:
  void add_term(const Monomial& m, const BigInt& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Terms terms_;
};

inline bool is_coordinate_var(Var v) { return v < kFirstParam; }

}  // namespace walshlab
