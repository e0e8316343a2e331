#pragma once

// Finite measure-preserving systems driven by polynomial exponents of
// permutations, exact multiple ergodic averages, limits, metastability scans,
// Sigma-seminorms, reducibility witnesses and decomposition checks.

#include "walshlab/folner.hpp"
#include "walshlab/growth.hpp"
#include "walshlab/lp.hpp"
#include "walshlab/nilgroup.hpp"
#include "walshlab/parallel.hpp"
#include "walshlab/poly.hpp"

#include <numeric>
#include <variant>

namespace walshlab {

class FiniteMPSpace {
 public:
  explicit FiniteMPSpace(std::vector<Rational> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw Error("a space needs at least one point");
    Rational total = 0;
    for (const auto& x : w_) {
      if (x <= 0) throw Error("point weights must be positive");
      total += x;
    }
    if (total != 1) throw Error("point weights must sum to 1");
  }
  static FiniteMPSpace uniform(std::size_t n) { return FiniteMPSpace(std::vector<Rational>(n, Rational(1, n))); }

  std::size_t size() const { return w_.size(); }
  const Rational& weight(std::size_t x) const { return w_[x]; }
  const std::vector<Rational>& weights() const { return w_; }

  friend bool operator==(const FiniteMPSpace&, const FiniteMPSpace&) = default;

 private:
  std::vector<Rational> w_;
};

using Observable = std::vector<Rational>;

inline Observable constant_observable(std::size_t n, Rational c) { return Observable(n, std::move(c)); }

inline Observable indicator(std::size_t n, std::initializer_list<std::size_t> points) {
  Observable f(n, Rational(0));
  for (auto p : points) f.at(p) = 1;
  return f;
}

inline void require_size(const FiniteMPSpace& X, const Observable& f) {
  if (f.size() != X.size()) throw MismatchError("observable has wrong dimension");
}

inline Rational inner(const FiniteMPSpace& X, const Observable& f, const Observable& g) {
  require_size(X, f);
  require_size(X, g);
  Rational s = 0;
  for (std::size_t x = 0; x < f.size(); ++x) s += X.weight(x) * f[x] * g[x];
  return s;
}

inline Rational norm2_sq(const FiniteMPSpace& X, const Observable& f) { return inner(X, f, f); }

inline Rational sup_norm(const Observable& f) {
  Rational m = 0;
  for (const auto& v : f) m = std::max(m, Rational(abs(v)));
  return m;
}

inline Observable operator+(Observable a, const Observable& b) {
  if (a.size() != b.size()) throw MismatchError("observable size mismatch");
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}
inline Observable operator-(Observable a, const Observable& b) {
  if (a.size() != b.size()) throw MismatchError("observable size mismatch");
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
  return a;
}
inline Observable operator*(const Rational& c, Observable a) {
  for (auto& v : a) v *= c;
  return a;
}
inline Observable pointwise(Observable a, const Observable& b) {
  if (a.size() != b.size()) throw MismatchError("observable size mismatch");
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  return a;
}

/// Koopman operator U f = f ∘ p. Products are operator products.
class Op {
 public:
  explicit Op(Perm p) : p_(std::move(p)) {}
  static Op identity(int n) { return Op(Perm::identity(n)); }

  const Perm& perm() const { return p_; }
  Observable operator()(const Observable& f) const {
    if (static_cast<int>(f.size()) != p_.degree()) throw MismatchError("observable size mismatch");
    Observable out(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) out[x] = f[static_cast<std::size_t>(p_(static_cast<int>(x)))];
    return out;
  }
  Op inverse() const { return Op(p_.inverse()); }
  /// (U V) f = U (V f) = f ∘ pv ∘ pu.
  friend Op operator*(const Op& u, const Op& v) { return Op(v.p_ * u.p_); }
  friend bool operator==(const Op&, const Op&) = default;

 private:
  Perm p_;
};

namespace detail {

/// Integer polynomial reduced modulo m, evaluated on coordinates.
class ModPoly {
 public:
  ModPoly(const Poly& p, std::int64_t m, int arity) : m_(m) {
    for (const auto& [mono, coef] : p.terms()) {
      Term t;
      t.coef = static_cast<std::int64_t>(mod_floor(coef, static_cast<std::uint64_t>(m)));
      t.exps.assign(static_cast<std::size_t>(arity), 0);
      for (const auto& [v, e] : mono.powers()) {
        if (!is_coordinate_var(v) || static_cast<int>(v) >= arity)
          throw Error("exponent polynomial uses a variable outside the index group coordinates");
        t.exps[v] = e;
      }
      if (t.coef != 0) terms_.push_back(std::move(t));
    }
  }

  std::int64_t operator()(const Point& n) const {
    std::int64_t acc = 0;
    for (const auto& t : terms_) {
      std::int64_t v = t.coef;
      for (std::size_t k = 0; k < t.exps.size(); ++k)
        for (std::uint32_t e = 0; e < t.exps[k]; ++e) v = v * mod_floor(n[k], m_) % m_;
      acc = (acc + v) % m_;
    }
    return acc;
  }

 private:
  struct Term {
    std::int64_t coef;
    std::vector<std::uint32_t> exps;
  };
  std::int64_t m_;
  std::vector<Term> terms_;
};

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace detail

/// g_i(n) f = f ∘ T_1^{p_i1(n)} ∘ ... ∘ T_l^{p_il(n)} for i = 0..j, with p_0 ≡ 0.
class ActionAssignment {
 public:
  ActionAssignment(FiniteMPSpace space, GroupModel model, std::vector<Perm> base,
                   std::vector<std::vector<Poly>> exponents)
      : space_(std::move(space)), model_(model), base_(std::move(base)), exponents_(std::move(exponents)) {
    if (exponents_.empty()) throw Error("an action needs at least the map g_0");
    for (const auto& T : base_) {
      if (static_cast<std::size_t>(T.degree()) != space_.size()) throw MismatchError("base permutation has wrong degree");
      for (std::size_t x = 0; x < space_.size(); ++x)
        if (space_.weight(x) != space_.weight(static_cast<std::size_t>(T(static_cast<int>(x)))))
          throw Error("base permutation does not preserve the measure");
      orders_.push_back(T.order());
    }
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      if (exponents_[i].size() != base_.size()) throw MismatchError("exponent list length differs from base count");
      if (i == 0)
        for (const auto& p : exponents_[i])
          if (!p.is_zero()) throw Error("g_0 must be the identity (all exponents zero)");
    }
    powers_.resize(base_.size());
    for (std::size_t k = 0; k < base_.size(); ++k) {
      Perm cur = Perm::identity(static_cast<int>(space_.size()));
      for (std::int64_t e = 0; e < orders_[k]; ++e) {
        powers_[k].push_back(cur);
        cur = base_[k] * cur;
      }
    }
    for (const auto& row : exponents_) {
      std::vector<detail::ModPoly> compiled;
      for (std::size_t k = 0; k < row.size(); ++k) compiled.emplace_back(row[k], orders_[k], model_.arity());
      compiled_.push_back(std::move(compiled));
    }
  }

  const FiniteMPSpace& space() const { return space_; }
  const GroupModel& model() const { return model_; }
  const std::vector<Perm>& base() const { return base_; }
  const std::vector<std::vector<Poly>>& exponents() const { return exponents_; }
  /// Index j of the last map.
  std::size_t j() const { return exponents_.size() - 1; }

  /// The same base with maps (g_0, ..., g_{k}) only.
  ActionAssignment truncated(std::size_t last) const {
    return ActionAssignment(space_, model_, base_, {exponents_.begin(), exponents_.begin() + static_cast<std::ptrdiff_t>(last + 1)});
  }

  /// Common period of every map in every coordinate.
  std::int64_t period() const {
    std::int64_t p = 1;
    for (auto o : orders_) p = detail::lcm64(p, o);
    return p;
  }

  Perm perm(std::size_t i, const Point& n) const {
    if (static_cast<int>(n.size()) != model_.arity()) throw MismatchError("group element has wrong arity");
    Perm out = Perm::identity(static_cast<int>(space_.size()));
    for (std::size_t k = 0; k < base_.size(); ++k) out = out * powers_[k][static_cast<std::size_t>(compiled_[i][k](n))];
    return out;
  }

  Op op(std::size_t i, const Point& n) const { return Op(perm(i, n)); }

 private:
  FiniteMPSpace space_;
  GroupModel model_;
  std::vector<Perm> base_;
  std::vector<std::vector<Poly>> exponents_;
  std::vector<std::int64_t> orders_;
  std::vector<std::vector<Perm>> powers_;
  std::vector<std::vector<detail::ModPoly>> compiled_;
};

namespace detail {

/// Observables over a common denominator.
struct ScaledObservables {
  std::vector<std::vector<BigInt>> num;
  BigInt den = 1;
  bool small = true;  // every numerator fits comfortably in int64
  std::vector<std::vector<std::int64_t>> num64;
};

inline ScaledObservables scale_observables(const std::vector<Observable>& fs) {
  ScaledObservables s;
  for (const auto& f : fs) {
    BigInt d = 1;
    for (const auto& v : f) d = lcm(d, BigInt(denominator(v)));
    std::vector<BigInt> row;
    for (const auto& v : f) row.push_back(BigInt(numerator(v)) * (d / BigInt(denominator(v))));
    s.den *= d;
    s.num.push_back(std::move(row));
  }
  // int128 accumulation is safe if the products times 2^40 terms stay below 2^126
  std::size_t bits = 0;
  for (const auto& row : s.num) {
    std::size_t b = 0;
    for (const auto& v : row) b = std::max(b, bit_length(abs(v)));
    bits += b;
  }
  s.small = bits <= 80;
  if (s.small)
    for (const auto& row : s.num) {
      std::vector<std::int64_t> r;
      for (const auto& v : row) r.push_back(v.convert_to<std::int64_t>());
      s.num64.push_back(std::move(r));
    }
  return s;
}

/// Sum over n of prod_i (g_i(n) f_i), scaled by den.
template <class ForEachPoint>
std::vector<BigInt> scaled_sum(const ActionAssignment& act, const ScaledObservables& s, ForEachPoint&& for_each) {
  const std::size_t X = act.space().size(), J = act.j();
  std::vector<BigInt> out(X, BigInt(0));
  std::vector<Perm> perms(J + 1);
  if (s.small) {
    std::vector<__int128> acc(X, 0);
    std::size_t pending = 0;
    auto flush = [&] {
      for (std::size_t x = 0; x < X; ++x) {
        __int128 v = acc[x];
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
        BigInt big = BigInt(static_cast<std::uint64_t>(u >> 64));
        big <<= 64;
        big += BigInt(static_cast<std::uint64_t>(u));
        out[x] += neg ? BigInt(-big) : big;
        acc[x] = 0;
      }
      pending = 0;
    };
    for_each([&](const Point& n) {
      for (std::size_t i = 0; i <= J; ++i) perms[i] = act.perm(i, n);
      for (std::size_t x = 0; x < X; ++x) {
        __int128 prod = 1;
        for (std::size_t i = 0; i <= J; ++i)
          prod *= s.num64[i][static_cast<std::size_t>(perms[i](static_cast<int>(x)))];
        acc[x] += prod;
      }
      if (++pending == (std::size_t{1} << 30)) flush();
    });
    flush();
    return out;
  }
  for_each([&](const Point& n) {
    for (std::size_t i = 0; i <= J; ++i) perms[i] = act.perm(i, n);
    for (std::size_t x = 0; x < X; ++x) {
      BigInt prod = 1;
      for (std::size_t i = 0; i <= J; ++i) prod *= s.num[i][static_cast<std::size_t>(perms[i](static_cast<int>(x)))];
      out[x] += prod;
    }
  });
  return out;
}

inline void check_observables(const ActionAssignment& act, const std::vector<Observable>& fs) {
  if (fs.size() != act.j() + 1) throw MismatchError("need one observable per map g_0..g_j");
  for (const auto& f : fs) require_size(act.space(), f);
}

inline Observable unscale(const std::vector<BigInt>& sum, const BigInt& den) {
  Observable out;
  for (const auto& v : sum) out.emplace_back(Rational(v, den));
  return out;
}

}  // namespace detail

/// Av_I[f_0..f_j] = E_{n in I} prod_i g_i(n) f_i.
inline Observable av(const ActionAssignment& act, const FolnerSet& I, const std::vector<Observable>& fs) {
  detail::check_observables(act, fs);
  if (!(I.model() == act.model())) throw MismatchError("Folner set and action use different groups");
  auto s = detail::scale_observables(fs);
  auto sum = detail::scaled_sum(act, s, [&](auto&& fn) { I.for_each(fn); });
  return detail::unscale(sum, s.den * I.measure());
}

/// Average over an explicit finite list of group elements.
inline Observable av_points(const ActionAssignment& act, const std::vector<Point>& pts, const std::vector<Observable>& fs) {
  detail::check_observables(act, fs);
  if (pts.empty()) throw Error("average over an empty set");
  auto s = detail::scale_observables(fs);
  auto sum = detail::scaled_sum(act, s, [&](auto&& fn) {
    for (const auto& p : pts) fn(p);
  });
  return detail::unscale(sum, s.den * static_cast<std::int64_t>(pts.size()));
}

inline Observable av_diff(const ActionAssignment& act, const FolnerSet& I, const FolnerSet& I2,
                          const std::vector<Observable>& fs) {
  return av(act, I, fs) - av(act, I2, fs);
}

struct LimitResult {
  Observable value;
  bool exact = false;  // average over a full period box
  std::int64_t period = 0;
};

/// Limit along Folner sequences: the average over [0,P)^arity when the period
/// box has at most `cap` points, else the average over F_horizon (approximate).
inline LimitResult limit_oracle(const ActionAssignment& act, const std::vector<Observable>& fs,
                                std::int64_t horizon = 64, std::uint64_t cap = 1u << 22) {
  LimitResult res;
  res.period = act.period();
  BigInt box = ipow(BigInt(res.period), static_cast<std::uint64_t>(act.model().arity()));
  if (box <= cap) {
    Box b{std::vector<std::int64_t>(static_cast<std::size_t>(act.model().arity()), 0),
          std::vector<std::int64_t>(static_cast<std::size_t>(act.model().arity()), res.period)};
    detail::check_observables(act, fs);
    auto s = detail::scale_observables(fs);
    auto sum = detail::scaled_sum(act, s, [&](auto&& fn) { for_each_in_box(b, fn); });
    res.value = detail::unscale(sum, s.den * box);
    res.exact = true;
  } else {
    res.value = av(act, FolnerSet(act.model(), horizon), fs);
  }
  return res;
}

/// Exact limit of Av over a F_N b (a, b fixed) along N = qP + residue. Sum and
/// count are polynomials in q of degree D; the ratio of their D-th differences is the limit.
inline Observable sequence_limit(const ActionAssignment& act, const std::vector<Observable>& fs, FolnerFamily family,
                                 const Point& a, const Point& b, std::int64_t residue) {
  const std::int64_t P = act.period();
  if (residue < 0 || residue >= P) throw Error("residue must lie in [0, period)");
  const int D = count_degree(act.model());
  detail::check_observables(act, fs);
  auto s = detail::scale_observables(fs);
  std::vector<BigInt> dsum(act.space().size(), BigInt(0));
  BigInt dcount = 0;
  BigInt binom = 1;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) binom = binom * (D - k + 1) / k;
    const BigInt coef = ((D - k) % 2 == 0 ? 1 : -1) * binom;
    const std::int64_t N = (k + 1) * P + residue;
    FolnerSet I(act.model(), N, a, b, family);
    auto sum = detail::scaled_sum(act, s, [&](auto&& fn) { I.for_each(fn); });
    for (std::size_t x = 0; x < dsum.size(); ++x) dsum[x] += coef * sum[x];
    dcount += coef * I.measure();
  }
  return detail::unscale(dsum, s.den * dcount);
}

// ---------------------------------------------------------------------------
// Metastability scans

struct ShiftPair {
  Point a, b;
};

struct ScanConfig {
  Rational epsilon;
  Rational gamma;  // parameter of the ceiling
  GrowthFunction F;
  std::int64_t M_lo = 1, M_hi = 1;
  std::vector<ShiftPair> shifts;  // empty: identity only
};

struct ScanRow {
  std::int64_t M = 0;
  std::size_t pairs = 0;
  Rational max_osc_sq = 0;  // max of ||Av_{I,I'}||_2^2 over qualifying pairs
  std::int64_t worst_N = 0, worst_N2 = 0;
  std::size_t worst_shift = 0, worst_shift2 = 0;
  bool pass = true;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::optional<std::int64_t> least_passing;
};

/// For each M in the window: all pairs I = a F_N b, I' = a' F_N' b' with shifts
/// from the window, M <= N, N' <= F(M) and ceil_gamma(I, I') <= F(M).
inline ScanReport metastability_scan(const ActionAssignment& act, const std::vector<Observable>& fs,
                                     const ScanConfig& cfg) {
  std::vector<ShiftPair> shifts = cfg.shifts;
  if (shifts.empty()) shifts.push_back({act.model().identity<std::int64_t>(), act.model().identity<std::int64_t>()});
  const Rational eps_sq = cfg.epsilon * cfg.epsilon;
  ScanReport report;
  std::map<std::pair<std::int64_t, std::size_t>, Observable> cache;
  auto average = [&](std::int64_t N, std::size_t s) -> const Observable& {
    auto key = std::make_pair(N, s);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, av(act, FolnerSet(act.model(), N, shifts[s].a, shifts[s].b), fs)).first;
    return it->second;
  };
  for (std::int64_t M = cfg.M_lo; M <= cfg.M_hi; ++M) {
    ScanRow row;
    row.M = M;
    const std::int64_t top = cfg.F(BigInt(M)).convert_to<std::int64_t>();
    struct Cand {
      std::int64_t N, N2;
      std::size_t s, s2;
    };
    std::vector<Cand> cands;
    for (std::int64_t N = M; N <= top; ++N)
      for (std::int64_t N2 = N; N2 <= top; ++N2)
        for (std::size_t s = 0; s < shifts.size(); ++s)
          for (std::size_t s2 = 0; s2 < shifts.size(); ++s2) {
            if (N == N2 && s2 < s) continue;
            cands.push_back({N, N2, s, s2});
          }
    auto qualifies = parallel_map(cands.size(), [&](std::size_t k) -> char {
      const Cand& c = cands[k];
      try {
        Ceil ceil(FolnerSet(act.model(), c.N, shifts[c.s].a, shifts[c.s].b),
                  FolnerSet(act.model(), c.N2, shifts[c.s2].a, shifts[c.s2].b), cfg.gamma, top);
        return ceil.N0() <= top;
      } catch (const CapExceeded&) {
        return 0;
      }
    });
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (!qualifies[k]) continue;
      const Cand& c = cands[k];
      Rational osc = norm2_sq(act.space(), average(c.N, c.s) - average(c.N2, c.s2));
      ++row.pairs;
      if (osc > row.max_osc_sq || row.pairs == 1) {
        row.max_osc_sq = osc;
        row.worst_N = c.N;
        row.worst_N2 = c.N2;
        row.worst_shift = c.s;
        row.worst_shift2 = c.s2;
      }
    }
    row.pass = row.max_osc_sq < eps_sq;
    if (row.pass && !report.least_passing) report.least_passing = M;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sigma-seminorms

using AtomSet = std::vector<Observable>;

struct ExtendedValue {
  bool infinite = false;
  Rational value = 0;
  std::vector<Rational> coefficients;  // lambda_t of an optimal representation
};

/// inf sum |lambda_t| over f = sum lambda_t sigma_t, as an exact LP in (lambda+, lambda-).
inline ExtendedValue sigma_norm(const Observable& f, const AtomSet& atoms) {
  const std::size_t n = f.size(), T = atoms.size();
  for (const auto& s : atoms)
    if (s.size() != n) throw MismatchError("atom has wrong dimension");
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(2 * T, Rational(0)));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t t = 0; t < T; ++t) {
      A[x][t] = atoms[t][x];
      A[x][T + t] = -atoms[t][x];
    }
  std::vector<Rational> c(2 * T, Rational(1));
  auto lp = solve_lp(A, f, c);
  ExtendedValue out;
  if (lp.status != LpResult::Status::Optimal) {
    out.infinite = true;
    return out;
  }
  out.value = lp.value;
  for (std::size_t t = 0; t < T; ++t) out.coefficients.push_back(lp.x[t] - lp.x[T + t]);
  return out;
}

/// sup over atoms of |<f, sigma>|.
inline Rational sigma_dual(const FiniteMPSpace& X, const Observable& f, const AtomSet& atoms) {
  Rational best = 0;
  for (const auto& s : atoms) best = std::max(best, Rational(abs(inner(X, f, s))));
  return best;
}

// ---------------------------------------------------------------------------
// Reducibility

/// (J, a, b_0..b_{j-1}) for one probe set.
struct ReducibilityCandidate {
  FolnerSet J;
  Point a;
  std::vector<Observable> b;
};

/// max over l in I of || g_j(l) sigma - E_{m in J} prod_i <g_j|g_i>_{a,m}(l) b_i ||_inf,
/// where <g_j|g_i>_{a,m}(l) = g_j(l) g_j(alm)^-1 g_i(alm).
inline Rational reducibility_error(const ActionAssignment& act, const Observable& sigma, const FolnerSet& I,
                                   const ReducibilityCandidate& cand) {
  const std::size_t J = act.j();
  if (cand.b.size() != J) throw MismatchError("need b_0..b_{j-1}");
  const GroupModel& G = act.model();
  std::vector<Point> Jpts = cand.J.members();
  auto s = detail::scale_observables(cand.b);
  const std::size_t X = act.space().size();
  Rational worst = 0;
  I.for_each([&](const Point& l) {
    Op gl = act.op(J, l);
    std::vector<BigInt> acc(X, BigInt(0));
    for (const auto& m : Jpts) {
      Point alm = point_mul(G, point_mul(G, cand.a, l), m);
      Op base = gl * act.op(J, alm).inverse();
      std::vector<std::vector<int>> maps;
      for (std::size_t i = 0; i < J; ++i) maps.push_back((base * act.op(i, alm)).perm().images());
      for (std::size_t x = 0; x < X; ++x) {
        BigInt prod = 1;
        for (std::size_t i = 0; i < J; ++i) prod *= s.num[i][static_cast<std::size_t>(maps[i][x])];
        acc[x] += prod;
      }
    }
    Observable target = gl(sigma);
    Rational denom = Rational(s.den * static_cast<std::int64_t>(Jpts.size()));
    for (std::size_t x = 0; x < X; ++x) worst = std::max(worst, Rational(abs(target[x] - Rational(acc[x]) / denom)));
  });
  return worst;
}

/// Candidate family searched by is_reducible for each probe.
struct WitnessSearch {
  std::vector<std::vector<Observable>> dictionary;  // tuples b_0..b_{j-1}; the zero tuple is always added
  std::vector<std::int64_t> J_sizes{1};
  std::vector<ShiftPair> J_shifts;  // empty: identity
  std::vector<Point> a_window;      // empty: identity
  /// Probe-dependent candidates (e.g. the inverse-theorem construction).
  std::function<std::vector<ReducibilityCandidate>(const FolnerSet&)> derived;
};

struct ReducibilityReport {
  bool reducible = false;
  bool sampled = true;  // only the given probe sets were checked
  std::string reason;
  std::vector<Rational> probe_errors;  // best error per probe (in order)
};

/// phi_gamma(L) for the action's group: closed form on Z^r, else a capped search.
inline std::int64_t phi_for(const GroupModel& G, const Rational& gamma, std::int64_t L) {
  if (G.kind() == GroupModel::Kind::Zr) {
    BigInt v = phi_zr_closed(G.arity(), gamma, BigInt(L));
    return v > BigInt(std::numeric_limits<std::int64_t>::max()) ? std::numeric_limits<std::int64_t>::max()
                                                                : v.convert_to<std::int64_t>();
  }
  return phi(G, gamma, L).N;
}

inline ReducibilityReport is_reducible(const Observable& sigma, const ActionAssignment& act, const Rational& gamma,
                                       std::int64_t N, const std::vector<FolnerSet>& probes,
                                       const WitnessSearch& search) {
  ReducibilityReport rep;
  if (sup_norm(sigma) > 1) {
    rep.reason = "sigma is not bounded by one";
    return rep;
  }
  const std::size_t j = act.j();
  if (j == 0) throw Error("reducibility needs j >= 1");
  std::vector<std::vector<Observable>> dict = search.dictionary;
  dict.push_back(std::vector<Observable>(j, Observable(act.space().size(), Rational(0))));
  std::vector<ShiftPair> Jshifts = search.J_shifts;
  if (Jshifts.empty()) Jshifts.push_back({act.model().identity<std::int64_t>(), act.model().identity<std::int64_t>()});
  std::vector<Point> as = search.a_window;
  if (as.empty()) as.push_back(act.model().identity<std::int64_t>());

  for (const auto& I : probes) {
    if (phi_for(act.model(), gamma, I.floor()) > N) throw Error("probe set violates phi_gamma(floor(I)) <= N");
    std::vector<ReducibilityCandidate> cands;
    if (search.derived)
      for (auto& c : search.derived(I)) cands.push_back(std::move(c));
    for (const auto& b : dict)
      for (auto size : search.J_sizes)
        for (const auto& sh : Jshifts)
          for (const auto& a : as) cands.push_back({FolnerSet(act.model(), size, sh.a, sh.b), a, b});
    std::optional<Rational> best;
    for (const auto& c : cands) {
      for (const auto& bi : c.b)
        if (sup_norm(bi) > 1) throw Error("candidate b_i is not bounded by one");
      Rational e = reducibility_error(act, sigma, I, c);
      if (!best || e < *best) best = e;
      if (e < gamma) break;
    }
    rep.probe_errors.push_back(*best);
    if (!(*best < gamma)) {
      rep.reason = "no witness in the candidate family for a probe set";
      return rep;
    }
  }
  rep.reducible = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Inverse theorem

struct InverseConstruction {
  Observable sigma;
  std::vector<Observable> b;  // b_0..b_{j-1}
  Point a, bshift;
  std::int64_t N = 0;
  Rational u_sup;
  Rational av_norm_sq;  // ||Av_I[f_0..f_{j-1}, u]||_2^2
  Rational inner_u_sigma;
  Rational two_eta;

  /// Witness (J, a', b) for a probe a~ F_L b~: J = b~^-1 F_N b, a' = a a~^-1.
  ReducibilityCandidate witness_for(const GroupModel& G, const FolnerSet& probe) const {
    return {FolnerSet(G, N, point_inv(G, probe.b()), bshift), point_mul(G, a, point_inv(G, probe.a())), b};
  }
};

struct InverseDiagnostic {
  std::string reason;
};

inline Rational eta_of(const Rational& eps, const Rational& x) { return eps * eps / (216 * x); }

/// sigma = E_{m in F_N} prod_{i<j} g_j(amb)^-1 g_i(amb) b_i with
/// b_0 = Av_I[f_0..f_{j-1}, u] f_0 / ||u||_inf, b_i = f_i.
inline std::variant<InverseConstruction, InverseDiagnostic> inverse_witness(
    const ActionAssignment& act, const FolnerSet& I, const std::vector<Observable>& fs, const Observable& u,
    const Rational& C, const Rational& eps) {
  const std::size_t j = act.j();
  if (j == 0) return InverseDiagnostic{"j must be >= 1"};
  if (fs.size() != j) return InverseDiagnostic{"need f_0..f_{j-1}"};
  for (const auto& f : fs)
    if (sup_norm(f) > 1) return InverseDiagnostic{"some f_i is not bounded by one"};
  Rational usup = sup_norm(u);
  if (usup > 3 * C) return InverseDiagnostic{"||u||_inf exceeds 3C"};
  if (usup == 0) return InverseDiagnostic{"u vanishes"};
  std::vector<Observable> all = fs;
  all.push_back(u);
  Observable A = av(act, I, all);
  Rational nsq = norm2_sq(act.space(), A);
  if (!(nsq > eps * eps / 36)) return InverseDiagnostic{"||Av_I||_2 <= eps/6"};

  InverseConstruction out;
  out.N = I.N();
  out.a = I.a();
  out.bshift = I.b();
  out.u_sup = usup;
  out.av_norm_sq = nsq;
  out.b = fs;
  out.b[0] = (Rational(1) / usup) * pointwise(A, fs[0]);
  const GroupModel& G = act.model();
  const std::size_t X = act.space().size();
  Observable sigma(X, Rational(0));
  FolnerSet(G, I.N()).for_each([&](const Point& m) {
    Point amb = point_mul(G, point_mul(G, I.a(), m), I.b());
    Op inv = act.op(j, amb).inverse();
    Observable prod(X, Rational(1));
    for (std::size_t i = 0; i < j; ++i) prod = pointwise(prod, (inv * act.op(i, amb))(out.b[i]));
    sigma = sigma + prod;
  });
  out.sigma = (Rational(1) / Rational(I.measure())) * sigma;
  out.inner_u_sigma = inner(act.space(), u, out.sigma);
  out.two_eta = 2 * eta_of(eps, C);
  if (out.inner_u_sigma != nsq / usup) throw Error("inverse construction: <u,sigma> differs from ||Av||^2/||u||");
  if (!(out.inner_u_sigma > out.two_eta)) throw Error("inverse construction: <u,sigma> <= 2 eta(C)");
  return out;
}

// ---------------------------------------------------------------------------
// Structure decompositions

struct DecompositionParams {
  Rational delta;
  std::function<Rational(const Rational&)> eta;
  std::vector<Rational> C;  // C_1, C_2, ...
  AtomSet sigma_B;          // atoms of the B-seminorm
  AtomSet sigma_M;          // atoms whose dual norm bounds u
};

struct DecompositionCheck {
  bool sums = false, sigma_ok = false, u_ok = false, v_ok = false;
  ExtendedValue sigma_norm_value;
  Rational u_dual = 0, v_norm_sq = 0;
  bool ok() const { return sums && sigma_ok && u_ok && v_ok; }
};

/// f = sigma + u + v, ||sigma||_B < C_i, ||u||*_{M_i} < eta(C_i), ||v||_2 < delta (i is 1-based).
inline DecompositionCheck verify_decomposition(const FiniteMPSpace& X, const Observable& f, const Observable& sigma,
                                               const Observable& u, const Observable& v, std::size_t i,
                                               const DecompositionParams& p) {
  if (i < 1 || i > p.C.size()) throw Error("decomposition index out of range");
  const Rational& Ci = p.C[i - 1];
  DecompositionCheck c;
  c.sums = (sigma + u + v) == f;
  bool sigma_zero = std::all_of(sigma.begin(), sigma.end(), [](const Rational& r) { return r == 0; });
  if (sigma_zero) {
    c.sigma_norm_value.value = 0;
  } else {
    c.sigma_norm_value = sigma_norm(sigma, p.sigma_B);
  }
  c.sigma_ok = !c.sigma_norm_value.infinite && c.sigma_norm_value.value < Ci;
  c.u_dual = sigma_dual(X, u, p.sigma_M);
  c.u_ok = c.u_dual < p.eta(Ci);
  c.v_norm_sq = norm2_sq(X, v);
  c.v_ok = c.v_norm_sq < p.delta * p.delta;
  return c;
}

/// <f, phi> >= 1 and <v, phi> < 1/c_i for every sampled v in V_i.
inline bool separation_verify(const FiniteMPSpace& X, const Observable& f, const Observable& phi,
                              const std::vector<std::vector<Observable>>& samples, const std::vector<Rational>& c) {
  if (samples.size() != c.size()) throw MismatchError("need one constant per sample family");
  if (inner(X, f, phi) < 1) return false;
  for (std::size_t k = 0; k < samples.size(); ++k)
    for (const auto& v : samples[k])
      if (!(inner(X, v, phi) < Rational(1) / c[k])) return false;
  return true;
}

}  // namespace walshlab
