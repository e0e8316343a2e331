#pragma once

// Systems (g_0 = 1, g_1, ..., g_j) of polynomial maps, the reduction and
// cheating calculus, complexity certificates and the recursive bounds c, c'.

#include "walshlab/polymap.hpp"

#include <memory>
#include <unordered_map>

namespace walshlab {

class System {
 public:
  explicit System(std::vector<PolyMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw Error("a system needs at least the identity map");
    if (!maps_.front().is_identity()) throw Error("the first map of a system must be the identity");
    for (const auto& g : maps_) require_compatible(maps_.front(), g);
  }

  /// (1, tail...) with the identity prepended.
  static System with_identity(std::vector<PolyMap> tail) {
    if (tail.empty()) throw Error("with_identity needs at least one map to infer the model");
    std::vector<PolyMap> maps{PolyMap::identity(tail.front().model(), tail.front().dim())};
    maps.insert(maps.end(), tail.begin(), tail.end());
    return System(std::move(maps));
  }

  static System trivial(GroupModel model, int dim) { return System({PolyMap::identity(model, dim)}); }

  const std::vector<PolyMap>& maps() const { return maps_; }
  const PolyMap& operator[](std::size_t k) const { return maps_[k]; }
  /// j, the index of the last map.
  std::size_t j() const { return maps_.size() - 1; }
  bool is_trivial() const { return maps_.size() == 1; }
  const GroupModel& model() const { return maps_.front().model(); }
  int dim() const { return maps_.front().dim(); }

  Var var_bound() const {
    Var b = 0;
    for (const auto& g : maps_) b = std::max(b, g.var_bound());
    return b;
  }

  friend bool operator==(const System&, const System&) = default;

 private:
  std::vector<PolyMap> maps_;
};

/// <g|h>_{a,b}(n) = g(n) g(anb)^-1 h(anb).
inline PolyMap reduction_pair(const PolyMap& g, const PolyMap& h, const SymPoint& a, const SymPoint& b) {
  require_compatible(g, h);
  return pointwise_mul(pointwise_mul(g, pointwise_inv(translate(g, a, b))), translate(h, a, b));
}

/// (g_0, ..., g_{j-1}, <g_j|g_0>, ..., <g_j|g_{j-1}>).
inline System reduce(const System& s, const SymPoint& a, const SymPoint& b) {
  if (s.is_trivial()) throw Error("the trivial system has no reduction");
  const PolyMap& last = s.maps().back();
  std::vector<PolyMap> out(s.maps().begin(), s.maps().end() - 1);
  for (std::size_t i = 0; i + 1 < s.maps().size(); ++i) out.push_back(reduction_pair(last, s[i], a, b));
  return System(std::move(out));
}

inline PolyMap right_reduction_pair(const PolyMap& g, const PolyMap& h, const SymPoint& b) {
  return reduction_pair(g, h, g.model().identity<Poly>(), b);
}

inline System right_reduce(const System& s, const SymPoint& b) { return reduce(s, s.model().identity<Poly>(), b); }

namespace detail {

/// Canonical order: (n-degree, number of terms, entries lexicographically).
inline bool canonical_less(const PolyMap& x, const PolyMap& y) {
  auto dx = x.n_degree(), dy = y.n_degree();
  if (dx != dy) return dx < dy;
  std::size_t tx = 0, ty = 0;
  for (const auto& p : x.entries().upper()) tx += p.size();
  for (const auto& p : y.entries().upper()) ty += p.size();
  if (tx != ty) return tx < ty;
  return x.entries().upper() < y.entries().upper();
}

}  // namespace detail

/// Representative of the right coset class {g c : c constant}: g(n) g(1)^-1.
/// Equal for g and g c, and a right-constant multiple of g.
inline PolyMap strip_right_constant(const PolyMap& g) {
  SymUT at_identity = g.at(g.model().identity<Poly>());
  return PolyMap(g.model(), g.entries() * at_identity.inverse());
}

/// Cheating normal form: strip right constants, drop constants and
/// duplicates, sort canonically and prepend the identity. Idempotent.
inline System cheat_normalize(const System& s) {
  std::vector<PolyMap> reps;
  for (const auto& g : s.maps()) {
    PolyMap r = strip_right_constant(g);
    if (r.is_identity()) continue;
    reps.push_back(std::move(r));
  }
  std::sort(reps.begin(), reps.end(), detail::canonical_less);
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  std::vector<PolyMap> maps{PolyMap::identity(s.model(), s.dim())};
  maps.insert(maps.end(), reps.begin(), reps.end());
  return System(std::move(maps));
}

/// One node of a complexity certificate: the normalized system, and if it is
/// not trivial, the symbolic shifts used to reduce it and the child node.
struct CertificateNode {
  System normalized;
  std::optional<SymPoint> a;
  std::optional<SymPoint> b;
  std::size_t reduced_index = 0;  // position (in `normalized`) of the map moved last
  std::vector<CertificateNode> children;

  int depth() const { return children.empty() ? 0 : 1 + children.front().depth(); }
};

struct ComplexityResult {
  enum class Status { Certified, Inconclusive };
  Status status = Status::Inconclusive;
  int bound = 0;
  std::optional<CertificateNode> certificate;
  std::size_t nodes_explored = 0;

  bool certified() const { return status == Status::Certified; }
};

struct CertifyOptions {
  bool right_only = false;         // use right reductions (a = 1)
  bool try_all_orders = true;      // if the canonical last map fails, try the others
  std::size_t max_nodes = 20000;   // search limit across all branches
};

namespace detail {

inline std::optional<CertificateNode> certify_rec(const System& s, int budget, const CertifyOptions& opt,
                                                  std::size_t& nodes) {
  ++nodes;
  System t = cheat_normalize(s);
  if (t.is_trivial()) return CertificateNode{t, std::nullopt, std::nullopt, 0, {}};
  if (budget <= 0 || nodes >= opt.max_nodes) return std::nullopt;
  const std::size_t last = t.maps().size() - 1;
  std::vector<std::size_t> order{last};
  if (opt.try_all_orders)
    for (std::size_t k = last - 1; k >= 1; --k) order.push_back(k);
  for (std::size_t pick : order) {
    std::vector<PolyMap> arranged;
    for (std::size_t k = 0; k < t.maps().size(); ++k)
      if (k != pick) arranged.push_back(t[k]);
    arranged.push_back(t[pick]);
    System candidate(std::move(arranged));
    ParamAllocator alloc(candidate.var_bound());
    SymPoint a, b;
    if (opt.right_only) {
      a = t.model().identity<Poly>();
      b = alloc.fresh(t.model());
    } else {
      std::tie(a, b) = fresh_shift_pair(t.model(), alloc);
    }
    System reduced = reduce(candidate, a, b);
    if (auto child = certify_rec(reduced, budget - 1, opt, nodes)) {
      CertificateNode node{t, a, b, pick, {}};
      node.children.push_back(std::move(*child));
      return node;
    }
    if (nodes >= opt.max_nodes) break;
  }
  return std::nullopt;
}

}  // namespace detail

/// Certifies complexity <= c: the normal form is trivial (c = 0), or a
/// reduction with fresh symbolic (a, b) certifies c - 1. Search depth is budget.
inline ComplexityResult certify_complexity(const System& s, int budget, CertifyOptions opt = {}) {
  if (budget < 0) throw Error("budget must be >= 0");
  ComplexityResult res;
  auto cert = detail::certify_rec(s, budget, opt, res.nodes_explored);
  if (cert) {
    res.status = ComplexityResult::Status::Certified;
    res.bound = cert->depth();
    res.certificate = std::move(cert);
  }
  return res;
}

inline ComplexityResult certify_right_complexity(const System& s, int budget, CertifyOptions opt = {}) {
  opt.right_only = true;
  return certify_complexity(s, budget, opt);
}

/// Symbolic antihomomorphism test g(nb) = g(b) g(n) with b fresh.
inline bool is_antihomomorphism(const PolyMap& g) {
  ParamAllocator alloc(g.var_bound());
  SymPoint b = alloc.fresh(g.model());
  SymUT lhs = right_translate(g, b).entries();
  SymUT rhs = g.at(b) * g.entries();
  return lhs == rhs;
}

/// g(n) h(b) = h(b) g(n) with b fresh.
inline bool commute_pointwise(const PolyMap& g, const PolyMap& h) {
  require_compatible(g, h);
  ParamAllocator alloc(std::max(g.var_bound(), h.var_bound()));
  SymPoint b = alloc.fresh(g.model());
  SymUT hb = h.at(b);
  return g.entries() * hb == hb * g.entries();
}

/// (1, g_1, g_1 g_2, ..., g_1 ... g_j) for pairwise commuting antihomomorphisms.
inline System commuting_antihom_system(const std::vector<PolyMap>& gens, GroupModel model, int dim) {
  for (const auto& g : gens)
    if (!is_antihomomorphism(g)) throw Error("map is not an antihomomorphism");
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (i != k && !commute_pointwise(gens[i], gens[k])) throw Error("antihomomorphisms do not commute pairwise");
  std::vector<PolyMap> maps{PolyMap::identity(model, dim)};
  for (const auto& g : gens) maps.push_back(pointwise_mul(maps.back(), g));
  return System(std::move(maps));
}

// ---------------------------------------------------------------------------
// Recursive complexity bounds

/// Memoized evaluation of c(d, j) and c'(d, j, |h_0|, ..., |h_{j-1}|, c_j):
///   c(-inf, j) = 0,  c(d, j) = c'(d, j, 1, ..., 1, 0),  c'(d, 0, c_0) = c_0,
///   c'(d, j, s, 0)   = c'(d, j-1, 2 s_0, ..., 2 s_{j-2}, c(d-1, 2 s_{j-1})) + 1,
///   c'(d, j, s, c_j) = c'(d, j, 2 s, c_j - 1) + 1.
/// The last rule is applied c_j times at once (shift the sizes by c_j bits).
/// Values too large to represent are reported as nullopt.
class ComplexityBounds {
 public:
  struct Limits {
    std::uint64_t max_j = 1u << 24;        // largest system size materialized
    std::uint64_t max_shift_bits = 1u << 20;  // largest common doubling exponent
  };

  ComplexityBounds() = default;
  explicit ComplexityBounds(Limits lim) : lim_(lim) {}

  /// d = kMinusInfinity stands for -infinity.
  std::optional<BigInt> c(int d, const BigInt& j) {
    if (d < 0) return BigInt(0);
    if (j > lim_.max_j) return std::nullopt;
    auto key = std::make_pair(d, j.convert_to<std::uint64_t>());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<BigInt> ones(static_cast<std::size_t>(key.second), BigInt(1));
    auto v = cprime(d, ones, BigInt(0));
    memo_.emplace(key, v);
    return v;
  }

  std::optional<BigInt> cprime(int d, const std::vector<BigInt>& sizes, const BigInt& cj) {
    // sizes are base[k] * 2^shift
    std::vector<BigInt> base = sizes;
    BigInt shift = 0;
    BigInt acc = 0;
    BigInt top = cj;
    while (true) {
      if (base.empty()) return acc + top;
      if (top > 0) {
        acc += top;
        shift += top;
        if (shift > lim_.max_shift_bits) return std::nullopt;
        top = 0;
      }
      acc += 1;
      if (d == 0) {
        // c(-inf, .) = 0, sizes no longer matter
        base.pop_back();
        continue;
      }
      BigInt last = base.back() << static_cast<unsigned>(shift);
      base.pop_back();
      shift += 1;
      if (shift > lim_.max_shift_bits) return std::nullopt;
      auto inner = c(d - 1, 2 * last);
      if (!inner) return std::nullopt;
      top = *inner;
    }
  }

  const Limits& limits() const { return lim_; }

 private:
  Limits lim_;
  std::map<std::pair<int, std::uint64_t>, std::optional<BigInt>> memo_;
};

inline std::optional<BigInt> complexity_bound(int d, int j) {
  ComplexityBounds b;
  return b.c(d, BigInt(j));
}

inline std::optional<BigInt> cprime(int d, const std::vector<BigInt>& sizes, const BigInt& cj) {
  ComplexityBounds b;
  return b.cprime(d, sizes, cj);
}

}  // namespace walshlab
