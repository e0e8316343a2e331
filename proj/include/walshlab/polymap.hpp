#pragma once

// Polynomial maps from an index group into UT(n) (symbolic entries) or into a
// finite permutation group (words with polynomial exponents), with the
// discrete derivative calculus and the recursive polynomiality verifier.

#include "walshlab/gamma.hpp"
#include "walshlab/nilgroup.hpp"

#include <functional>
#include <optional>
#include <random>

namespace walshlab {

using SymUT = UTMatrix<Poly>;

/// Map n -> g(n) in UT(dim) whose entries are integer polynomials in the
/// coordinates of n (variables 0..arity-1) and in symbolic parameters.
class PolyMap {
 public:
  PolyMap(GroupModel model, SymUT entries) : model_(model), entries_(std::move(entries)) {
    for (const auto& p : entries_.upper())
      for (Var v : p.vars())
        if (is_coordinate_var(v) && static_cast<int>(v) >= model_.arity())
          throw Error("polynomial map uses coordinate n" + std::to_string(v) + " outside " + model_.name());
  }

  static PolyMap identity(GroupModel model, int dim) { return PolyMap(model, SymUT(dim)); }

  static PolyMap constant(GroupModel model, const UTElement& value) {
    return PolyMap(model, value.map([](const BigInt& x) { return Poly(x); }));
  }

  /// n -> E_{row,col}(exponent(n)).
  static PolyMap elementary(GroupModel model, int dim, int row, int col, Poly exponent) {
    return PolyMap(model, SymUT::elementary(dim, row, col, std::move(exponent)));
  }

  const GroupModel& model() const { return model_; }
  int dim() const { return entries_.dim(); }
  const SymUT& entries() const { return entries_; }

  bool is_identity() const { return entries_.is_identity(); }

  /// True if no entry depends on the coordinates of n.
  bool is_constant_in_n() const {
    for (const auto& p : entries_.upper())
      if (!p.free_of(is_coordinate_var)) return false;
    return true;
  }

  Var var_bound() const {
    Var b = 0;
    for (const auto& p : entries_.upper()) b = std::max(b, p.var_bound());
    return b;
  }

  std::uint32_t n_degree() const {
    std::uint32_t d = 0;
    for (const auto& p : entries_.upper()) d = std::max(d, p.degree_if(is_coordinate_var));
    return d;
  }

  /// g evaluated at a symbolic point m (entries composed with m's coordinates).
  SymUT at(const SymPoint& m) const {
    if (static_cast<int>(m.size()) != model_.arity()) throw MismatchError("point arity mismatch");
    std::map<Var, Poly> subs;
    for (int k = 0; k < model_.arity(); ++k) subs.emplace(static_cast<Var>(k), m[static_cast<std::size_t>(k)]);
    return entries_.map([&](const Poly& p) { return p.substitute(subs); });
  }

  /// Exact evaluation at concrete n; every symbolic parameter must be bound.
  UTElement evaluate(const std::vector<BigInt>& n, const std::map<Var, BigInt>& params = {}) const {
    if (static_cast<int>(n.size()) != model_.arity()) throw MismatchError("point arity mismatch");
    std::map<Var, BigInt> values = params;
    for (int k = 0; k < model_.arity(); ++k) values[static_cast<Var>(k)] = n[static_cast<std::size_t>(k)];
    for (const auto& p : entries_.upper())
      for (Var v : p.vars())
        if (!values.count(v)) throw Error("unbound symbolic parameter " + Poly::var_name(v));
    return entries_.map([&](const Poly& p) { return p.evaluate(values); });
  }

  UTElement evaluate(const Point& n, const std::map<Var, BigInt>& params = {}) const {
    std::vector<BigInt> big(n.begin(), n.end());
    return evaluate(big, params);
  }

  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.model_ == b.model_ && a.entries_ == b.entries_;
  }

 private:
  GroupModel model_;
  SymUT entries_;
};

inline void require_compatible(const PolyMap& g, const PolyMap& h) {
  if (!(g.model() == h.model())) throw MismatchError("polynomial maps live on different index groups");
  if (g.dim() != h.dim()) throw MismatchError("polynomial maps have different target dimensions");
}

inline PolyMap pointwise_mul(const PolyMap& g, const PolyMap& h) {
  require_compatible(g, h);
  return PolyMap(g.model(), g.entries() * h.entries());
}

inline PolyMap pointwise_inv(const PolyMap& g) { return PolyMap(g.model(), g.entries().inverse()); }

/// T_{a,b} g (n) = g(a n b).
inline PolyMap translate(const PolyMap& g, const SymPoint& a, const SymPoint& b) {
  const auto& model = g.model();
  return PolyMap(model, g.at(model.mul(model.mul(a, model.coordinates()), b)));
}

/// D_{a,b} g (n) = g(n)^-1 g(a n b).
inline PolyMap derivative(const PolyMap& g, const SymPoint& a, const SymPoint& b) {
  return pointwise_mul(pointwise_inv(g), translate(g, a, b));
}

inline PolyMap right_translate(const PolyMap& g, const SymPoint& b) {
  return translate(g, g.model().identity<Poly>(), b);
}

/// D_b g (n) = g(n)^-1 g(n b).
inline PolyMap right_derivative(const PolyMap& g, const SymPoint& b) {
  return derivative(g, g.model().identity<Poly>(), b);
}

/// Fresh symbolic shift pair (a, b). On abelian index groups D_{a,b} depends
/// only on a*b, so b is taken to be the identity there.
inline std::pair<SymPoint, SymPoint> fresh_shift_pair(const GroupModel& model, ParamAllocator& alloc) {
  SymPoint a = alloc.fresh(model);
  SymPoint b = model.abelian() ? model.identity<Poly>() : alloc.fresh(model);
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Verification

struct LevelTrace {
  int level = 0;
  int offset = 0;
  std::size_t terms = 0;
  std::uint32_t n_degree = 0;
};

struct Refutation {
  int level = 0;  // number of derivatives taken before the violation
  int row = -1;   // offending entry (UT targets)
  int col = -1;
  std::string detail;
  std::map<Var, BigInt> assignment;  // concrete values witnessing the violation
};

struct PolyVerdict {
  enum class Status { Certified, Refuted, Inconclusive };
  Status status = Status::Inconclusive;
  std::vector<LevelTrace> trace;
  std::optional<Refutation> witness;

  bool certified() const { return status == Status::Certified; }
  bool refuted() const { return status == Status::Refuted; }
};

inline std::string to_string(PolyVerdict::Status s) {
  switch (s) {
    case PolyVerdict::Status::Certified: return "certified";
    case PolyVerdict::Status::Refuted: return "refuted";
    default: return "inconclusive";
  }
}

/// (length + 1) * (1 + max n-degree of the entries).
inline int default_depth_cap(const PolyMap& g, const Prefiltration& filt) {
  int len = filt.length() == kMinusInfinity ? 0 : filt.length();
  return (len + 1) * (1 + static_cast<int>(g.n_degree()));
}

namespace detail {

/// Finds small integer values making p nonzero (p is known to be nonzero).
inline std::map<Var, BigInt> nonvanishing_assignment(const Poly& p) {
  std::mt19937_64 rng(0x5eed);
  auto vars = p.vars();
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::map<Var, BigInt> values;
    std::int64_t span = 2 + attempt / 100;
    for (Var v : vars) values[v] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * span + 1)) - span;
    if (p.evaluate(values) != 0) return values;
  }
  return {};
}

inline std::optional<Refutation> pattern_violation(const SymUT& m, int offset, int level) {
  for (int r = 0; r < m.dim(); ++r)
    for (int c = r + 1; c < m.dim() && c - r < offset; ++c)
      if (!m.at(r, c).is_zero()) {
        Refutation w;
        w.level = level;
        w.row = r;
        w.col = c;
        w.detail = m.at(r, c).str();
        w.assignment = nonvanishing_assignment(m.at(r, c));
        return w;
      }
  return std::nullopt;
}

}  // namespace detail

/// Recursive check: g takes values in G_0, and D_{a,b} g is G[+1]-polynomial for
/// fresh symbolic a, b; at length -infinity g must be the identity.
inline PolyVerdict is_polynomial(const PolyMap& g, const Prefiltration& filt, int depth_cap) {
  if (depth_cap < 1) throw Error("depth_cap must be >= 1");
  if (g.dim() != filt.dim()) throw MismatchError("map and prefiltration dimensions differ");
  PolyVerdict verdict;
  ParamAllocator alloc(g.var_bound());
  PolyMap current = g;
  Prefiltration level_filt = filt;
  for (int level = 0;; ++level) {
    std::size_t terms = 0;
    for (const auto& p : current.entries().upper()) terms += p.size();
    verdict.trace.push_back({level, level_filt.offset(0), terms, current.n_degree()});
    if (auto w = detail::pattern_violation(current.entries(), level_filt.offset(0), level)) {
      verdict.status = PolyVerdict::Status::Refuted;
      verdict.witness = std::move(w);
      return verdict;
    }
    if (level_filt.length() == kMinusInfinity) {
      verdict.status = PolyVerdict::Status::Certified;
      return verdict;
    }
    if (level >= depth_cap) {
      verdict.status = PolyVerdict::Status::Inconclusive;
      return verdict;
    }
    auto [a, b] = fresh_shift_pair(g.model(), alloc);
    current = derivative(current, a, b);
    level_filt = level_filt.shifted(1);
  }
}

inline PolyVerdict is_polynomial(const PolyMap& g, const Prefiltration& filt) {
  return is_polynomial(g, filt, default_depth_cap(g, filt));
}

/// Every (d+1)-fold derivative vanishes, checked with fresh symbolic shifts.
inline bool scalar_degree_check(const PolyMap& g, int d) {
  if (d < 0) throw Error("scalar degree must be >= 0");
  ParamAllocator alloc(g.var_bound());
  PolyMap h = g;
  for (int k = 0; k <= d && !h.is_identity(); ++k) {
    auto [a, b] = fresh_shift_pair(g.model(), alloc);
    h = derivative(h, a, b);
  }
  return h.is_identity();
}

// ---------------------------------------------------------------------------
// Permutation-valued maps

/// n -> base[w_1]^{p_1(n)} * ... * base[w_k]^{p_k(n)} (left to right product).
class PermWordMap {
 public:
  struct Letter {
    int generator;
    Poly exponent;
  };

  PermWordMap(GroupModel model, std::vector<Perm> generators, std::vector<Letter> word)
      : model_(model), generators_(std::move(generators)), word_(std::move(word)) {
    if (generators_.empty()) throw Error("permutation map needs at least one generator");
    for (const auto& g : generators_)
      if (g.degree() != generators_.front().degree()) throw MismatchError("generator degrees differ");
    for (const auto& l : word_) {
      if (l.generator < 0 || l.generator >= static_cast<int>(generators_.size()))
        throw Error("word letter refers to unknown generator");
      for (Var v : l.exponent.vars())
        if (!is_coordinate_var(v) || static_cast<int>(v) >= model_.arity())
          throw Error("permutation exponents may only use the coordinates of n");
    }
  }

  const GroupModel& model() const { return model_; }
  int degree() const { return generators_.front().degree(); }
  const std::vector<Perm>& generators() const { return generators_; }
  const std::vector<Letter>& word() const { return word_; }

  Perm evaluate(const Point& n) const {
    std::map<Var, BigInt> values;
    for (int k = 0; k < model_.arity(); ++k) values[static_cast<Var>(k)] = n[static_cast<std::size_t>(k)];
    Perm result = Perm::identity(degree());
    for (const auto& l : word_) {
      const Perm& gen = generators_[static_cast<std::size_t>(l.generator)];
      auto e = mod_floor(l.exponent.evaluate(values), static_cast<std::uint64_t>(gen.order()));
      result = result * gen.pow(static_cast<std::int64_t>(e));
    }
    return result;
  }

  /// Coordinatewise period: integer polynomials reduced mod the generator orders.
  std::int64_t period() const {
    std::int64_t p = 1;
    for (const auto& l : word_) p = std::lcm(p, generators_[static_cast<std::size_t>(l.generator)].order());
    return p;
  }

 private:
  GroupModel model_;
  std::vector<Perm> generators_;
  std::vector<Letter> word_;
};

inline PermWordMap pointwise_mul(const PermWordMap& g, const PermWordMap& h) {
  if (!(g.model() == h.model()) || g.generators() != h.generators())
    throw MismatchError("permutation maps use different index groups or generators");
  auto word = g.word();
  word.insert(word.end(), h.word().begin(), h.word().end());
  return PermWordMap(g.model(), g.generators(), std::move(word));
}

inline PermWordMap pointwise_inv(const PermWordMap& g) {
  std::vector<PermWordMap::Letter> word;
  for (auto it = g.word().rbegin(); it != g.word().rend(); ++it) word.push_back({it->generator, -it->exponent});
  return PermWordMap(g.model(), g.generators(), std::move(word));
}

/// Exhaustive scalar-degree check over one period of n and of every shift.
/// Polynomiality for the chain G = ... = G (d+1 copies) > 1 is exactly this
/// condition, which is how permutation targets are verified.
inline PolyVerdict is_polynomial(const PermWordMap& g, int scalar_degree) {
  if (scalar_degree < 0) throw Error("scalar degree must be >= 0");
  const auto& model = g.model();
  const std::int64_t period = g.period();
  const int derivs = scalar_degree + 1;
  const int shifts_per_level = model.abelian() ? 1 : 2;
  const int slots = model.arity() * (1 + derivs * shifts_per_level);
  PolyVerdict verdict;
  std::vector<std::int64_t> digits(static_cast<std::size_t>(slots), 0);

  auto point_at = [&](int slot) {
    Point p(digits.begin() + slot * model.arity(), digits.begin() + (slot + 1) * model.arity());
    return p;
  };
  // h_k(n) = h_{k-1}(n)^-1 h_{k-1}(a_k n b_k)
  std::function<Perm(const Point&, int)> value = [&](const Point& n, int level) -> Perm {
    if (level == 0) return g.evaluate(n);
    int base = 1 + (level - 1) * shifts_per_level;
    Point a = point_at(base);
    Point b = model.abelian() ? model.identity<std::int64_t>() : point_at(base + 1);
    Point moved = model.mul(model.mul(a, n), b);
    for (auto& c : moved) c = mod_floor(c, period);
    return value(n, level - 1).inverse() * value(moved, level - 1);
  };

  std::uint64_t total = 1;
  for (int s = 0; s < slots; ++s) total *= static_cast<std::uint64_t>(period);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (auto& d : digits) {
      d = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(period));
      rest /= static_cast<std::uint64_t>(period);
    }
    if (!value(point_at(0), derivs).is_identity()) {
      Refutation w;
      w.level = derivs;
      w.detail = "iterated derivative is not the identity";
      for (int k = 0; k < slots; ++k) {
        Var v = k < model.arity() ? static_cast<Var>(k) : kFirstParam + static_cast<Var>(k - model.arity());
        w.assignment[v] = digits[static_cast<std::size_t>(k)];
      }
      verdict.status = PolyVerdict::Status::Refuted;
      verdict.witness = std::move(w);
      return verdict;
    }
  }
  verdict.trace.push_back({derivs, 0, static_cast<std::size_t>(total), 0});
  verdict.status = PolyVerdict::Status::Certified;
  return verdict;
}

}  // namespace walshlab
