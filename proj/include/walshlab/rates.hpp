#pragma once

// Quantitative constants of the metastability bound: delta, eta, the
// C-ladder, gamma iterates, the structure ladder and the lazily evaluated
// tuples whose sizes are K_{c,eps} and K~_{c,eps}.

#include "walshlab/folner.hpp"
#include "walshlab/growth.hpp"

#include <map>
#include <sstream>

namespace walshlab {

/// Non-conforming hooks for toy-scale tests: replace delta or the ladder length.
struct RateOverrides {
  std::optional<Rational> delta;
  std::optional<BigInt> ladder_length;

  bool any() const { return delta.has_value() || ladder_length.has_value(); }
};

inline Rational delta(const Rational& eps) {
  if (eps <= 0) throw Error("epsilon must be > 0");
  return eps / 36;
}

inline Rational eta(const Rational& eps, const Rational& x) {
  if (eps <= 0 || x <= 0) throw Error("eta needs eps > 0 and x > 0");
  return eps * eps / (216 * x);
}

/// ceil(2 delta^-2).
inline BigInt ladder_length(const Rational& eps, const RateOverrides& ov = {}) {
  if (ov.ladder_length) {
    if (*ov.ladder_length < 1) throw Error("ladder length override must be >= 1");
    return *ov.ladder_length;
  }
  Rational d = ov.delta ? *ov.delta : delta(eps);
  return ceil_div(Rational(2) / (d * d));
}

/// C_1 >= ... >= C_L = 1 with C_{i-1} = max(C_i, 2/eta(C_i)), by the literal recursion.
inline std::vector<Rational> c_sequence(const Rational& eps, const RateOverrides& ov = {},
                                        std::size_t max_len = std::size_t{1} << 16) {
  BigInt L = ladder_length(eps, ov);
  if (L > max_len) throw Error("c_sequence: ladder too long to materialize");
  auto n = L.convert_to<std::size_t>();
  std::vector<Rational> C(n);
  C[n - 1] = 1;
  for (std::size_t i = n - 1; i >= 1; --i) C[i - 1] = std::max(C[i], Rational(2) / eta(eps, C[i]));
  return C;
}

/// Ratio of the geometric form C_{i-1} = rho C_i: rho = max(1, 432/eps^2).
inline Rational c_ratio(const Rational& eps) { return std::max(Rational(1), Rational(432) / (eps * eps)); }

namespace detail {

inline const Real& log10_2() {
  static const Real v = log10(Real(2));
  return v;
}

inline Real log10_big(const BigInt& n) {
  if (n <= 0) throw Error("log10 of a non-positive integer");
  std::size_t b = bit_length(n);
  if (b <= 240) return log10(Real(n));
  std::size_t shift = b - 240;
  return log10(Real(BigInt(n >> static_cast<unsigned>(shift)))) + Real(static_cast<std::int64_t>(shift)) * log10_2();
}

inline Real log10_rational(const Rational& q) { return log10_big(numerator(q)) - log10_big(denominator(q)); }

}  // namespace detail

/// C* = C_1 = rho^(L-1), exact if it has at most max_bits bits.
inline std::optional<Rational> c_star(const Rational& eps, const RateOverrides& ov = {},
                                      std::size_t max_bits = std::size_t{1} << 22) {
  BigInt L = ladder_length(eps, ov);
  Rational rho = c_ratio(eps);
  if (rho == 1) return Rational(1);
  Real bits = Real(L - 1) * detail::log10_rational(rho) / detail::log10_2();
  if (bits > Real(static_cast<std::uint64_t>(max_bits))) return std::nullopt;
  return rpow(rho, (L - 1).convert_to<std::uint64_t>());
}

/// Size of 1/gamma: exact, or log10(1/gamma) = T_height(top) with
/// T_1(t) = t and T_{h+1}(t) = 10^{T_h(t)}.
struct GammaMagnitude {
  int c = 0;
  std::optional<Rational> exact;
  int height = 1;
  Real top = 0;
  bool approximate = false;  // leading-order tower arithmetic was used

  /// Decimal digits of the denominator of gamma, when height is 1.
  std::optional<BigInt> digits() const {
    if (exact) return BigInt(denominator(*exact).str().size());
    if (height == 1) return BigInt(floor(top).convert_to<std::string>()) + 1;
    return std::nullopt;
  }

  std::string describe() const {
    if (exact) return to_string(*exact);
    std::ostringstream out;
    out << "1/10^";
    for (int h = 1; h < height; ++h) out << "10^";
    out << top.str(12);
    return out.str();
  }
};

/// true iff x < y as numbers.
inline bool smaller(const GammaMagnitude& x, const GammaMagnitude& y) {
  if (x.exact && y.exact) return *x.exact < *y.exact;
  auto lg = [](const GammaMagnitude& g) -> std::pair<int, Real> {
    if (g.exact) return {1, -detail::log10_rational(*g.exact)};
    return {g.height, g.top};
  };
  auto [hx, tx] = lg(x);
  auto [hy, ty] = lg(y);
  if (hx != hy) return hx > hy;
  return tx > ty;
}

/// gamma^1(eps) = eps / (24 C*), exactly when C* is representable.
inline std::optional<Rational> gamma1(const Rational& eps, const RateOverrides& ov = {},
                                      std::size_t max_bits = std::size_t{1} << 22) {
  auto cs = c_star(eps, ov, max_bits);
  if (!cs) return std::nullopt;
  return eps / (24 * *cs);
}

/// gamma^c(eps): c-fold iterate of gamma^1. Switches to tower magnitudes
/// when exact values become too large.
inline GammaMagnitude gamma_iter(const Rational& eps, int c, const RateOverrides& ov = {},
                                 std::size_t max_bits = std::size_t{1} << 22) {
  if (c < 1) throw Error("gamma_iter needs c >= 1");
  if (eps <= 0) throw Error("epsilon must be > 0");
  const Real threshold("1e8");
  const Real l2592 = log10(Real(2592)), l432 = log10(Real(432)), l24 = log10(Real(24));
  GammaMagnitude g;
  g.exact = eps;
  for (int step = 1; step <= c; ++step) {
    if (g.exact) {
      if (auto next = gamma1(*g.exact, ov, max_bits)) {
        g.exact = next;
        continue;
      }
      // C* too large: one step in logarithms from the exact value
      const Rational x = *g.exact;
      BigInt L = ladder_length(x, ov);
      Real log_rho = detail::log10_rational(c_ratio(x));
      g.top = -detail::log10_rational(x) + l24 + Real(L - 1) * log_rho;
      g.height = 1;
      if (g.top > threshold) {
        g.top = log10(g.top);
        g.height = 2;
      }
      g.exact.reset();
      continue;
    }
    if (ov.any()) throw Error("gamma_iter: overrides are only supported in the exact tier");
    // leading-order update log10(1/gamma') ~ 2592 * 10^{2 lg} * (log10 432 + 2 lg)
    if (g.height == 1) {
      const Real lg = g.top;
      if (2 * lg < threshold) {
        Real L = ceil(Real(2592) * pow(Real(10), 2 * lg));
        Real log_rho = std::max(Real(0), l432 + 2 * lg);
        g.top = lg + l24 + (L - 1) * log_rho;
        if (g.top > threshold) {
          g.top = log10(g.top);
          g.height = 2;
        }
      } else {
        g.top = l2592 + 2 * lg + log10(l432 + 2 * lg);
        g.height = 2;
      }
    } else if (g.height == 2) {
      const Real llg = g.top;
      if (llg < threshold) {
        Real lg = pow(Real(10), llg);
        g.top = l2592 + 2 * lg + log10(l432 + 2 * lg);
        if (g.top > threshold) {
          g.top = log10(g.top);
          g.height = 3;
        }
      } else {
        g.top = detail::log10_2() + llg;
        g.height = 3;
      }
    } else {
      g.approximate = true;
      if (g.top < threshold) {
        g.top = pow(Real(10), g.top) + (g.height == 3 ? detail::log10_2() : Real(0));
        if (g.top > threshold) {
          g.top = log10(g.top);
          ++g.height;
        }
      } else {
        ++g.height;
      }
    }
  }
  g.c = c;
  return g;
}

/// Least r with ((K-1)/K)^r < gamma, by exact powers.
inline std::uint64_t r_min(const BigInt& K, const Rational& gamma, std::uint64_t cap = std::uint64_t{1} << 24) {
  if (K < 1) throw Error("r_min needs K >= 1");
  if (gamma <= 0 || gamma >= 1) throw Error("r_min needs 0 < gamma < 1");
  if (K == 1) return 1;
  const Rational q(K - 1, K);
  auto holds = [&](std::uint64_t r) { return rpow(q, r) < gamma; };
  std::uint64_t hi = 1;
  while (!holds(hi)) {
    if (hi > cap) throw Error("r_min: search cap exceeded");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // fails, or 0
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct StructureLadder {
  std::vector<BigInt> A, M, B;
};

/// A_1 = M_start, M_i = omega(A_i), B_i = psi(M_i), A_{i+1} = B_i, with
/// omega, psi replaced by max(., id). `length` terms (0: ceil(2 delta^-2)).
inline StructureLadder structure_sequence(const Rational& eps, const GrowthFunction& omega, const GrowthFunction& psi,
                                          const BigInt& M_start, const RateOverrides& ov = {}, std::size_t length = 0,
                                          std::size_t max_len = std::size_t{1} << 16) {
  if (length == 0) {
    BigInt L = ladder_length(eps, ov);
    if (L > max_len) throw Error("structure_sequence: ladder too long to materialize");
    length = L.convert_to<std::size_t>();
  }
  StructureLadder out;
  BigInt A = M_start;
  for (std::size_t i = 0; i < length; ++i) {
    BigInt M = std::max(omega(A), A);
    BigInt B = std::max(psi(M), M);
    out.A.push_back(A);
    out.M.push_back(M);
    out.B.push_back(B);
    A = B;
  }
  return out;
}

/// phi_gamma(L) of the ambient group.
using PhiFamily = std::function<BigInt(const Rational& gamma, const BigInt& L)>;

inline PhiFamily z_phi() {
  return [](const Rational& g, const BigInt& L) { return phi_z_closed(g, L); };
}

/// Lazy evaluation of the tuples of the main theorem (complexity c) and of
/// the intermediate proposition, with memoized entries.
class TupleEngine {
 public:
  struct Limits {
    std::size_t max_gamma_bits = std::size_t{1} << 20;
    std::size_t max_count_bits = std::size_t{1} << 16;
    std::uint64_t max_enumeration = std::uint64_t{1} << 16;  // entries scanned for N
    std::uint64_t max_r = std::uint64_t{1} << 20;
  };

  explicit TupleEngine(RateOverrides ov = {}, PhiFamily phi = z_phi()) : TupleEngine(std::move(ov), std::move(phi), Limits{}) {}
  TupleEngine(RateOverrides ov, PhiFamily phi, Limits lim) : ov_(std::move(ov)), phi_(std::move(phi)), lim_(lim) {}

  const RateOverrides& overrides() const { return ov_; }

  Rational gamma(const Rational& eps) {
    auto key = eps.str();
    if (auto it = gamma_.find(key); it != gamma_.end()) return it->second;
    auto g = gamma1(eps, ov_, lim_.max_gamma_bits);
    if (!g) throw Error("gamma^1(eps) too large for exact evaluation; use deferred mode");
    return gamma_.emplace(key, *g).first->second;
  }

  BigInt ladder(const Rational& eps) const { return ladder_length(eps, ov_); }

  /// K_{c,eps}.
  BigInt count_theorem(int c, const Rational& eps) {
    if (c < 0) throw Error("complexity must be >= 0");
    if (c == 0) return 1;
    return ladder(eps) * count_prop(c - 1, eps);
  }

  /// r(c, eps): least r with ((K-1)/K)^r < gamma, K = K_{c,gamma}.
  std::uint64_t r(int c, const Rational& eps) {
    Rational g = gamma(eps);
    return r_min(count_theorem(c, g), g, lim_.max_r);
  }

  /// K~_{c,eps} = K_{c,gamma}^r.
  BigInt count_prop(int c, const Rational& eps) {
    Rational g = gamma(eps);
    BigInt K = count_theorem(c, g);
    std::uint64_t rr = r_min(K, g, lim_.max_r);
    if (bit_length(K) * rr > lim_.max_count_bits) throw Error("tuple count too large to represent exactly");
    return ipow(K, rr);
  }

  /// M^{c,eps,F}_{idx+1}.
  BigInt entry_theorem(int c, const Rational& eps, const GrowthFunction& F, const BigInt& M, const BigInt& idx) {
    if (c == 0) {
      if (idx != 0) throw Error("entry index out of range");
      return M;
    }
    const BigInt Kp = count_prop(c - 1, eps);
    if (idx < 0 || idx >= ladder(eps) * Kp) throw Error("entry index out of range");
    const BigInt i = idx / Kp, rest = idx % Kp;
    BigInt Mi = ladder_rung(c, eps, F, M, i.convert_to<std::size_t>());
    return entry_prop(c - 1, eps, F, Mi, rest);
  }

  /// The ladder rung M_{i+1} used by the theorem at complexity c (omega = id, psi = N_{c-1,eps,F}).
  BigInt ladder_rung(int c, const Rational& eps, const GrowthFunction& F, const BigInt& M, std::size_t i) {
    auto key = std::make_tuple(c, eps.str(), fid(F), M.str());
    auto& rungs = rungs_[key];
    if (rungs.empty()) rungs.push_back(M);  // A_1 = M_1 = M since omega = id
    while (rungs.size() <= i) {
      BigInt Mcur = rungs.back();
      BigInt B = std::max(n_prop(c - 1, eps, F, Mcur), Mcur);
      rungs.push_back(B);  // A_{i+1} = B_i = M_{i+1}
    }
    return rungs[i];
  }

  /// M~^{(i_1..i_r)} for idx with base-K digits i_1 (most significant) .. i_r.
  BigInt entry_prop(int c, const Rational& eps, const GrowthFunction& F, const BigInt& Mt, const BigInt& idx) {
    return prop_path(c, eps, F, Mt, idx).back();
  }

  /// (M~^(), M~^(i_1), ..., M~^(i_1..i_r)).
  std::vector<BigInt> prop_path(int c, const Rational& eps, const GrowthFunction& F, const BigInt& Mt,
                                const BigInt& idx) {
    const Rational g = gamma(eps);
    const BigInt K = count_theorem(c, g);
    const std::uint64_t rr = r(c, eps);
    std::vector<BigInt> digits(rr);
    BigInt rest = idx;
    for (std::uint64_t s = rr; s-- > 0;) {
      digits[s] = rest % K;
      rest /= K;
    }
    if (rest != 0 || idx < 0) throw Error("entry index out of range");
    std::vector<BigInt> path{Mt};
    for (std::uint64_t s = 1; s <= rr; ++s) {
      const GrowthFunction& Fs = F_level(c, eps, F, s);
      path.push_back(entry_theorem(c, g, Fs, path.back(), digits[s - 1]));
    }
    return path;
  }

  /// F_s for the proposition at (c, eps, F): F_r = F, F_{s-1}(x) = max_i F_s(M^{c,gamma,F_s}_i(x)).
  const GrowthFunction& F_level(int c, const Rational& eps, const GrowthFunction& F, std::uint64_t s) {
    const std::uint64_t rr = r(c, eps);
    if (s < 1 || s > rr) throw Error("F level out of range");
    auto key = std::make_tuple(c, eps.str(), fid(F), s);
    if (auto it = levels_.find(key); it != levels_.end()) return it->second;
    if (s == rr) return levels_.emplace(key, F).first->second;
    const GrowthFunction& next = F_level(c, eps, F, s + 1);
    const Rational g = gamma(eps);
    auto memo = std::make_shared<std::map<std::string, BigInt>>();
    GrowthFunction level(
        [this, c, g, next, memo](const BigInt& x) {
          auto k = x.str();
          if (auto it = memo->find(k); it != memo->end()) return it->second;
          const BigInt K = count_theorem(c, g);
          BigInt best = 0;
          for (BigInt i = 0; i < K; ++i) best = std::max(best, next(entry_theorem(c, g, next, x, i)));
          memo->emplace(k, best);
          return best;
        },
        "F_" + std::to_string(s));
    return levels_.emplace(key, level).first->second;
  }

  /// N_{c,eps,F}(M~) = max over the proposition tuple of phi_gamma(F(entry)).
  BigInt n_prop(int c, const Rational& eps, const GrowthFunction& F, const BigInt& Mt) {
    auto key = std::make_tuple(c, eps.str(), fid(F), Mt.str());
    if (auto it = nprop_.find(key); it != nprop_.end()) return it->second;
    const Rational g = gamma(eps);
    const BigInt count = count_prop(c, eps);
    if (count > lim_.max_enumeration) throw Error("N: proposition tuple too large to enumerate");
    BigInt best = 0;
    for (BigInt idx = 0; idx < count; ++idx) best = std::max(best, phi_(g, F(entry_prop(c, eps, F, Mt, idx))));
    return nprop_.emplace(key, best).first->second;
  }

 private:
  static const void* fid(const GrowthFunction& F) { return F.id(); }

  RateOverrides ov_;
  PhiFamily phi_;
  Limits lim_;
  std::map<std::string, Rational> gamma_;
  std::map<std::tuple<int, std::string, const void*, std::string>, std::vector<BigInt>> rungs_;
  std::map<std::tuple<int, std::string, const void*, std::uint64_t>, GrowthFunction> levels_;
  std::map<std::tuple<int, std::string, const void*, std::string>, BigInt> nprop_;
};

/// Estimated log10 of K_{c,eps} for cases beyond exact evaluation, using
/// r ~ K ln(1/gamma) when K is large. Only c <= 2 is supported.
inline std::optional<Real> count_theorem_log10(int c, const Rational& eps, const RateOverrides& ov = {}) {
  if (c == 0) return Real(0);
  Real logL = detail::log10_big(ladder_length(eps, ov));
  if (c == 1) return logL;
  if (c != 2) return std::nullopt;
  // K~_{1,eps} = K^r with K = K_{1,gamma} = L(gamma), gamma = gamma^1(eps)
  GammaMagnitude g = gamma_iter(eps, 1, ov);
  if (g.height != 1 && !g.exact) return std::nullopt;
  Real lg = g.exact ? Real(-detail::log10_rational(*g.exact)) : g.top;
  if (2 * lg > Real("1e8")) return std::nullopt;
  Real K = Real(2592) * pow(Real(10), 2 * lg);
  Real r = K * lg * log(Real(10));
  return logL + r * log10(K);
}

}  // namespace walshlab
