#pragma once

// Test-side reference implementations. Each one is written from the
// definitions with no shared code paths beyond the number types.

#include "walshlab/numeric.hpp"
#include "walshlab/poly.hpp"

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

namespace walshlab::oracle {

// ---------------------------------------------------------------------------
// Dense unitriangular matrices

using Dense = std::vector<std::vector<BigInt>>;

inline Dense dense_identity(int n) {
  Dense m(static_cast<std::size_t>(n), std::vector<BigInt>(static_cast<std::size_t>(n), BigInt(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline Dense dense_mul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<BigInt>(n, BigInt(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// ---------------------------------------------------------------------------
// Index groups by hand

inline std::vector<std::int64_t> heis_mul(const std::vector<std::int64_t>& p, const std::vector<std::int64_t>& q) {
  return {p[0] + q[0], p[1] + q[1], p[2] + q[2] + p[0] * q[1]};
}

inline std::vector<std::int64_t> heis_inv(const std::vector<std::int64_t>& p) {
  return {-p[0], -p[1], -p[2] + p[0] * p[1]};
}

inline std::vector<std::int64_t> add(const std::vector<std::int64_t>& p, const std::vector<std::int64_t>& q) {
  std::vector<std::int64_t> r(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) r[k] = p[k] + q[k];
  return r;
}

using Pt = std::vector<std::int64_t>;

// All points of the canonical box: [0,N)^r, or x,y < N, z < N^2 when heis.
inline std::vector<Pt> box_points(int arity, bool heis, std::int64_t N) {
  std::vector<Pt> out;
  std::vector<std::int64_t> hi(static_cast<std::size_t>(arity), N);
  if (heis) hi[2] = N * N;
  Pt p(static_cast<std::size_t>(arity), 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == arity) {
      out.push_back(p);
      return;
    }
    for (std::int64_t v = 0; v < hi[k]; ++v) {
      p[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

// |l F_N Δ F_N| / |F_N| by set enumeration.
inline Rational symdiff_by_sets(int arity, bool heis, const Pt& l, std::int64_t N) {
  auto pts = box_points(arity, heis, N);
  std::set<Pt> F(pts.begin(), pts.end()), lF;
  for (const auto& m : pts) lF.insert(heis ? heis_mul(l, m) : add(l, m));
  std::int64_t only = 0;
  for (const auto& x : lF)
    if (!F.count(x)) ++only;
  for (const auto& x : F)
    if (!lF.count(x)) ++only;
  return Rational(only, static_cast<std::int64_t>(pts.size()));
}

// ---------------------------------------------------------------------------
// Permutations and averages

inline std::vector<int> compose(const std::vector<int>& p, const std::vector<int>& q) {
  std::vector<int> r(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) r[x] = p[static_cast<std::size_t>(q[x])];
  return r;
}

inline std::int64_t order_by_iteration(const std::vector<int>& p) {
  std::vector<int> id(p.size());
  std::iota(id.begin(), id.end(), 0);
  std::vector<int> cur = p;
  std::int64_t k = 1;
  while (cur != id) {
    cur = compose(p, cur);
    ++k;
  }
  return k;
}

// p applied e times, e >= 0.
inline std::vector<int> power_by_steps(const std::vector<int>& p, std::int64_t e) {
  std::vector<int> cur(p.size());
  std::iota(cur.begin(), cur.end(), 0);
  for (std::int64_t k = 0; k < e; ++k) cur = compose(p, cur);
  return cur;
}

inline BigInt eval_poly(const Poly& p, const Pt& n) {
  BigInt total = 0;
  for (const auto& [mono, coef] : p.terms()) {
    BigInt v = coef;
    for (const auto& [var, e] : mono.powers())
      for (std::uint32_t k = 0; k < e; ++k) v *= n[var];
    total += v;
  }
  return total;
}

struct PeriodicAction {
  std::vector<Rational> weights;
  int arity = 1;
  std::vector<std::vector<int>> base;
  std::vector<std::vector<Poly>> exponents;  // per map, per base permutation
};

// x -> T_1^{e_1}(T_2^{e_2}(... x)) for map i at n.
inline std::vector<int> map_perm(const PeriodicAction& A, std::size_t i, const Pt& n) {
  std::vector<int> out(A.weights.size());
  std::iota(out.begin(), out.end(), 0);
  for (std::size_t k = 0; k < A.base.size(); ++k) {
    std::int64_t ord = order_by_iteration(A.base[k]);
    BigInt e = eval_poly(A.exponents[i][k], n) % ord;
    if (e < 0) e += ord;
    out = compose(out, power_by_steps(A.base[k], e.convert_to<std::int64_t>()));
  }
  return out;
}

// Average of prod_i f_i(T_{g_i(n)} x) over the period cell [0,P)^arity.
inline std::vector<Rational> period_cell_average(const PeriodicAction& A, const std::vector<std::vector<Rational>>& fs) {
  std::int64_t P = 1;
  for (const auto& T : A.base) P = std::lcm(P, order_by_iteration(T));
  auto cell = box_points(A.arity, false, P);
  const std::size_t X = A.weights.size();
  std::vector<Rational> acc(X, Rational(0));
  for (const auto& n : cell) {
    std::vector<std::vector<int>> perms;
    for (std::size_t i = 0; i < fs.size(); ++i) perms.push_back(map_perm(A, i, n));
    for (std::size_t x = 0; x < X; ++x) {
      Rational prod = 1;
      for (std::size_t i = 0; i < fs.size(); ++i) prod *= fs[i][static_cast<std::size_t>(perms[i][x])];
      acc[x] += prod;
    }
  }
  for (auto& v : acc) v /= Rational(static_cast<std::int64_t>(cell.size()));
  return acc;
}

// ---------------------------------------------------------------------------
// Complexity recursion, expanded one rule application at a time

struct StepBudget {
  std::uint64_t left;
  bool exhausted = false;
  bool take() {
    if (left == 0) {
      exhausted = true;
      return false;
    }
    --left;
    return true;
  }
};

inline std::optional<BigInt> c_direct(int d, const BigInt& j, StepBudget& budget);

// Sizes are kept as mantissa * 2^exponent in runs of equal entries; every step
// doubles all remaining sizes, tracked by one shared exponent offset.
struct SizeRun {
  BigInt mantissa;
  std::int64_t exponent;  // relative to the shared offset
  std::uint64_t count;
};

inline std::optional<BigInt> cprime_runs(int d, std::vector<SizeRun> runs, BigInt cj, StepBudget& budget) {
  BigInt acc = 0;
  std::int64_t offset = 0;
  while (true) {
    if (runs.empty()) return acc + cj;
    if (!budget.take()) return std::nullopt;
    if (cj > 0) {
      ++offset;
      cj -= 1;
      acc += 1;
      continue;
    }
    SizeRun& back = runs.back();
    BigInt mant = back.mantissa;
    std::int64_t e = back.exponent + offset;
    if (--back.count == 0) runs.pop_back();
    ++offset;
    acc += 1;
    if (d - 1 < 0) {
      cj = 0;
      continue;
    }
    if (e > 64) return budget.exhausted = true, std::nullopt;
    auto inner = c_direct(d - 1, 2 * (mant << static_cast<unsigned>(e)), budget);
    if (!inner) return std::nullopt;
    cj = *inner;
  }
}

inline std::optional<BigInt> cprime_direct(int d, const std::vector<std::pair<BigInt, std::uint64_t>>& sizes, BigInt cj,
                                           StepBudget& budget) {
  std::vector<SizeRun> runs;
  for (const auto& [m, e] : sizes) runs.push_back({m, static_cast<std::int64_t>(e), 1});
  return cprime_runs(d, std::move(runs), std::move(cj), budget);
}

inline std::optional<BigInt> c_direct(int d, const BigInt& j, StepBudget& budget) {
  if (d < 0) return BigInt(0);
  if (j > BigInt(budget.left)) return budget.exhausted = true, std::nullopt;
  std::vector<SizeRun> runs;
  if (j > 0) runs.push_back({BigInt(1), 0, j.convert_to<std::uint64_t>()});
  return cprime_runs(d, std::move(runs), BigInt(0), budget);
}

// ---------------------------------------------------------------------------
// Rates

inline Rational eta(const Rational& eps, const Rational& x) { return eps * eps / (216 * x); }

// gamma^1(eps) = eps / (24 C_1) with C_L = 1, C_{i-1} = max(C_i, 2/eta(C_i)).
inline Rational gamma_one(const Rational& eps, std::uint64_t ladder) {
  Rational C = 1;
  for (std::uint64_t i = ladder; i > 1; --i) C = std::max(C, Rational(2) / eta(eps, C));
  return eps / (24 * C);
}

inline std::uint64_t r_by_scan(const BigInt& K, const Rational& gamma) {
  Rational q(K - 1, K), p = 1;
  for (std::uint64_t r = 1;; ++r) {
    p *= q;
    if (p < gamma) return r;
  }
}

// phi_gamma(L) on Z: least N with sup_{0<=l<L} |(l+F_N) Δ F_N|/N = 2 min(L-1, N)/N < gamma,
// searched by doubling and bisection on that predicate.
inline BigInt phi_z(const Rational& gamma, const BigInt& L) {
  auto holds = [&](const BigInt& N) { return Rational(2 * std::min(L - 1, N), N) < gamma; };
  BigInt hi = 1;
  while (!holds(hi)) hi *= 2;
  BigInt lo = hi / 2;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

using Fn = std::function<BigInt(const BigInt&)>;

// Tuples of the main theorem and of the proposition, expanded naively
// into explicit lists with a fixed ladder length.
struct TupleOracle {
  std::uint64_t ladder;

  Rational gamma(const Rational& eps) const { return gamma_one(eps, ladder); }

  BigInt N_prop(int c, const Rational& eps, const Fn& F, const BigInt& Mt) const {
    Rational g = gamma(eps);
    BigInt best = 0;
    for (const auto& e : prop(c, eps, F, Mt)) best = std::max(best, phi_z(g, F(e)));
    return best;
  }

  std::vector<BigInt> rungs(int c, const Rational& eps, const Fn& F, const BigInt& M) const {
    std::vector<BigInt> out{M};
    while (out.size() < ladder) {
      BigInt next = N_prop(c - 1, eps, F, out.back());
      out.push_back(std::max(next, out.back()));
    }
    return out;
  }

  std::vector<BigInt> theorem(int c, const Rational& eps, const Fn& F, const BigInt& M) const {
    if (c == 0) return {M};
    std::vector<BigInt> out;
    for (const auto& Mi : rungs(c, eps, F, M)) {
      auto part = prop(c - 1, eps, F, Mi);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  std::uint64_t r(int c, const Rational& eps) const {
    Rational g = gamma(eps);
    return r_by_scan(BigInt(static_cast<std::int64_t>(count(c, g))), g);
  }

  std::uint64_t count(int c, const Rational& eps) const {
    if (c == 0) return 1;
    std::uint64_t K = count(c - 1, gamma(eps));
    std::uint64_t rr = r(c - 1, eps);
    std::uint64_t p = 1;
    for (std::uint64_t k = 0; k < rr; ++k) p *= K;
    return ladder * p;
  }

  // F_s for s = 1..r; levels[r] = F.
  std::vector<Fn> levels(int c, const Rational& eps, const Fn& F) const {
    std::uint64_t rr = r(c, eps);
    Rational g = gamma(eps);
    std::vector<Fn> L(rr + 1);
    L[rr] = F;
    for (std::uint64_t s = rr; s > 1; --s) {
      Fn next = L[s];
      L[s - 1] = [this, c, g, next](const BigInt& x) {
        BigInt best = 0;
        for (const auto& e : theorem(c, g, next, x)) best = std::max(best, next(e));
        return best;
      };
    }
    return L;
  }

  std::vector<BigInt> prop(int c, const Rational& eps, const Fn& F, const BigInt& Mt) const {
    std::uint64_t rr = r(c, eps);
    Rational g = gamma(eps);
    auto L = levels(c, eps, F);
    std::vector<BigInt> layer{Mt};
    for (std::uint64_t s = 1; s <= rr; ++s) {
      std::vector<BigInt> next;
      for (const auto& v : layer) {
        auto kids = theorem(c, g, L[s], v);
        next.insert(next.end(), kids.begin(), kids.end());
      }
      layer = std::move(next);
    }
    return layer;
  }
};

}  // namespace walshlab::oracle
