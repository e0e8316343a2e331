#pragma once

// Quantitative mean ergodic theorem for the multiplicator f(λ) -> λ f(λ) on
// L^2 of an atomic measure on the circle. Angles are exact rationals in turns.

#include "walshlab/growth.hpp"
#include "walshlab/random.hpp"

#include <boost/math/constants/constants.hpp>

namespace walshlab {

struct Complex {
  Real re = 0, im = 0;

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    Real d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Real norm_sq() const { return re * re + im * im; }
};

inline Real to_real(const Rational& q) { return Real(BigInt(numerator(q))) / Real(BigInt(denominator(q))); }

inline const Real& pi_real() {
  static const Real pi = boost::math::constants::pi<Real>();
  return pi;
}

/// x - k for the integer k nearest to x, in [-1/2, 1/2], and the parity of k.
inline std::pair<Rational, bool> reduce_half(const Rational& x) {
  BigInt k = floor_div(x + Rational(1, 2));
  return {x - Rational(k), k % 2 != 0};
}

/// sin(pi x) with exact reduction, so small values keep relative precision.
inline Real sin_pi(const Rational& x) {
  auto [r, odd] = reduce_half(x);
  Real v = sin(pi_real() * to_real(r));
  return odd ? Real(-v) : v;
}

inline Real cos_pi(const Rational& x) {
  auto [r, odd] = reduce_half(x);
  Real v = cos(pi_real() * to_real(r));
  return odd ? Real(-v) : v;
}

/// exp(2 pi i theta) for theta in turns.
inline Complex unit(const Rational& theta) { return {cos_pi(2 * theta), sin_pi(2 * theta)}; }

/// Chordal distance |1 - λ| = 2|sin(pi theta)|.
inline Real chordal(const Rational& theta) { return 2 * abs(sin_pi(theta)); }

/// Fractional part of N theta, exactly.
inline Rational frac_times(const Rational& theta, const BigInt& N) {
  BigInt p = numerator(theta), q = denominator(theta);
  BigInt r = (N * p) % q;
  if (r < 0) r += q;
  return Rational(r, q);
}

/// (1/N) sum_{n=1}^N λ^n = e^{i pi (N+1) t} sin(pi N t) / (N sin(pi t)), and 1 at λ = 1.
inline Complex geometric_mean(const Rational& theta, const BigInt& N) {
  if (N < 1) throw Error("N must be >= 1");
  Rational t = theta - Rational(floor_div(theta));
  if (t == 0) return {Real(1), Real(0)};
  // N t and (N+1) t modulo 2, exactly
  Rational Nt = frac_times(t / 2, N) * 2;
  Rational N1t = frac_times(t / 2, N + 1) * 2;
  Real amp = sin_pi(Nt) / (Real(N) * sin_pi(t));
  return {cos_pi(N1t) * amp, sin_pi(N1t) * amp};
}

class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<Rational> angles, std::vector<Rational> weights)
      : angles_(std::move(angles)), weights_(std::move(weights)) {
    if (angles_.size() != weights_.size() || angles_.empty()) throw Error("atomic measure needs matching nonempty lists");
    Rational total = 0;
    for (auto& a : angles_) {
      a -= Rational(floor_div(a));
    }
    for (const auto& w : weights_) {
      if (w <= 0) throw Error("atom weights must be positive");
      total += w;
    }
    if (total != 1) throw Error("atom weights must sum to 1");
  }

  std::size_t size() const { return angles_.size(); }
  const Rational& angle(std::size_t k) const { return angles_[k]; }
  const Rational& weight(std::size_t k) const { return weights_[k]; }
  const std::vector<Rational>& angles() const { return angles_; }
  const std::vector<Rational>& weights() const { return weights_; }

 private:
  std::vector<Rational> angles_, weights_;
};

/// Real values of f at the atoms.
using CircleObservable = std::vector<Rational>;

inline Rational norm2_sq(const AtomicMeasure& mu, const CircleObservable& f) {
  if (f.size() != mu.size()) throw MismatchError("observable size differs from atom count");
  Rational s = 0;
  for (std::size_t k = 0; k < f.size(); ++k) s += mu.weight(k) * f[k] * f[k];
  return s;
}

/// a_N(λ_k) = f(λ_k) (1/N) sum_{n=1}^N λ_k^n.
inline std::vector<Complex> ergodic_avg(const CircleObservable& f, const AtomicMeasure& mu, const BigInt& N) {
  if (f.size() != mu.size()) throw MismatchError("observable size differs from atom count");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    Complex s = geometric_mean(mu.angle(k), N);
    Real v = to_real(f[k]);
    out.push_back({v * s.re, v * s.im});
  }
  return out;
}

enum class Region { A, B, E };

inline char to_char(Region r) { return r == Region::A ? 'A' : r == Region::B ? 'B' : 'E'; }

/// A: |1-λ| < eps/(6F(M)); B: |1-λ| >= 12/(eps M); E: the rest.
struct Regions {
  Rational epsilon;
  BigInt M, FM;
  Real rA, rB;

  Regions(const Rational& eps, const GrowthFunction& F, const BigInt& M_) : epsilon(eps), M(M_), FM(F(M_)) {
    if (eps <= 0) throw Error("epsilon must be > 0");
    if (M < 1) throw Error("M must be >= 1");
    rA = to_real(eps / (6 * Rational(FM)));
    rB = to_real(Rational(12) / (eps * Rational(M)));
  }

  Region classify_distance(const Real& d) const {
    if (d < rA) return Region::A;
    if (d >= rB) return Region::B;
    return Region::E;
  }
  Region classify(const Rational& theta) const { return classify_distance(chordal(theta)); }
};

/// K = floor(36/eps^2) + 1.
inline BigInt vn_count(const Rational& eps) { return floor_div(Rational(36) / (eps * eps)) + 1; }

/// M_1 = M_start, M_{i+1} = floor(72 F(M_i)/eps^2) + 1, K terms.
inline std::vector<BigInt> vn_sequence(const Rational& eps, const GrowthFunction& F, const BigInt& M_start) {
  if (eps <= 0) throw Error("epsilon must be > 0");
  BigInt K = vn_count(eps);
  if (K > 1000000) throw Error("vn_sequence: K too large");
  std::vector<BigInt> Ms{M_start};
  while (BigInt(static_cast<std::int64_t>(Ms.size())) < K)
    Ms.push_back(floor_div(Rational(72) * Rational(F(Ms.back())) / (eps * eps)) + 1);
  return Ms;
}

struct PigeonholeResult {
  std::size_t i = 0;  // 1-based
  CircleObservable sigma, u, v;
  std::vector<Rational> e_mass;  // ||f E_{M_i}||_2^2 for every i
  std::vector<Region> regions;   // of each atom at the chosen i
};

/// i = first argmin of ||f E_{M_i}||_2; sigma = f 1_A, u = f 1_B, v = f 1_E.
inline PigeonholeResult pigeonhole_decompose(const CircleObservable& f, const AtomicMeasure& mu, const Rational& eps,
                                             const GrowthFunction& F, const std::vector<BigInt>& Ms) {
  if (f.size() != mu.size()) throw MismatchError("observable size differs from atom count");
  if (norm2_sq(mu, f) > 1) throw Error("pigeonhole_decompose needs ||f||_2 <= 1");
  std::vector<Real> d;
  for (const auto& a : mu.angles()) d.push_back(chordal(a));
  PigeonholeResult res;
  std::vector<std::vector<Region>> all;
  for (const auto& M : Ms) {
    Regions R(eps, F, M);
    std::vector<Region> regs;
    Rational mass = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      regs.push_back(R.classify_distance(d[k]));
      if (regs.back() == Region::E) mass += mu.weight(k) * f[k] * f[k];
    }
    res.e_mass.push_back(mass);
    all.push_back(std::move(regs));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < res.e_mass.size(); ++k)
    if (res.e_mass[k] < res.e_mass[best]) best = k;
  res.i = best + 1;
  res.regions = all[best];
  res.sigma = res.u = res.v = CircleObservable(f.size(), Rational(0));
  for (std::size_t k = 0; k < f.size(); ++k) {
    switch (res.regions[k]) {
      case Region::A: res.sigma[k] = f[k]; break;
      case Region::B: res.u[k] = f[k]; break;
      case Region::E: res.v[k] = f[k]; break;
    }
  }
  return res;
}

struct MetastabilityCheck {
  Real max_osc;      // exhaustive maximum, or certified upper bound
  Real lower;        // sampled lower bound (equals max_osc when exhaustive)
  bool exhaustive = false;
  bool pass = false;
};

inline const Real& comparison_margin() {
  static const Real m("1e-30");
  return m;
}

namespace detail {

inline Real pair_osc_sq(const CircleObservable& f, const AtomicMeasure& mu, const std::vector<Complex>& s,
                        const std::vector<Complex>& t) {
  Real acc = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    Real w = to_real(mu.weight(k) * f[k] * f[k]);
    acc += w * (s[k] - t[k]).norm_sq();
  }
  return acc;
}

inline std::vector<Complex> means_at(const AtomicMeasure& mu, const BigInt& N) {
  std::vector<Complex> out;
  for (const auto& a : mu.angles()) out.push_back(geometric_mean(a, N));
  return out;
}

}  // namespace detail

/// max over M <= N, N' <= F(M) of ||a_N - a_N'||_2 against eps. Windows with at
/// most `exhaustive_cap` values are checked pairwise; larger ones use the bound
/// |s_N - s_N'| <= min(2, (F(M)+1)|1-λ|, 4/(M|1-λ|)) per atom.
inline MetastabilityCheck check_metastability(const CircleObservable& f, const AtomicMeasure& mu, const Rational& eps,
                                              const BigInt& M, const GrowthFunction& F,
                                              std::uint64_t exhaustive_cap = 64) {
  if (f.size() != mu.size()) throw MismatchError("observable size differs from atom count");
  const BigInt FM = F(M);
  if (FM < M) throw Error("window is empty: F(M) < M");
  MetastabilityCheck out;
  const Real eps_r = to_real(eps);
  auto scan_pairs = [&](const std::vector<BigInt>& Ns) {
    std::vector<std::vector<Complex>> means;
    for (const auto& N : Ns) means.push_back(detail::means_at(mu, N));
    Real best = 0;
    for (std::size_t x = 0; x < means.size(); ++x)
      for (std::size_t y = x + 1; y < means.size(); ++y) best = std::max(best, detail::pair_osc_sq(f, mu, means[x], means[y]));
    return sqrt(best);
  };
  if (FM - M + 1 <= exhaustive_cap) {
    std::vector<BigInt> Ns;
    for (BigInt N = M; N <= FM; ++N) Ns.push_back(N);
    out.max_osc = out.lower = scan_pairs(Ns);
    out.exhaustive = true;
  } else {
    Real bound = 0;
    const Real Mr = Real(M), F1 = Real(FM + 1);
    for (std::size_t k = 0; k < f.size(); ++k) {
      Real d = chordal(mu.angle(k));
      Real b = 2;
      b = std::min(b, F1 * d);
      if (d > 0) b = std::min(b, Real(4) / (Mr * d));
      bound += to_real(mu.weight(k) * f[k] * f[k]) * b * b;
    }
    out.max_osc = sqrt(bound);
    std::vector<BigInt> Ns;
    const BigInt span = FM - M;
    for (int k = 0; k <= 16; ++k) Ns.push_back(M + span * k / 16);
    for (int k = 1; k <= 8; ++k) Ns.push_back(M + k);
    std::sort(Ns.begin(), Ns.end());
    Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
    out.lower = scan_pairs(Ns);
  }
  out.pass = out.max_osc + comparison_margin() < eps_r;
  return out;
}

struct VnCase {
  AtomicMeasure mu;
  CircleObservable f;
};

/// Random atomic measure with at most max_atoms atoms, mixing λ = 1, generic
/// angles and angles at distance about 10^-e from 1, and f with ||f||_2 <= 1.
inline VnCase random_vn_case(Rng& rng, std::size_t max_atoms, int max_exponent) {
  std::size_t n = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_atoms)));
  std::vector<Rational> angles, weights;
  std::int64_t wsum = 0;
  std::vector<std::int64_t> raw;
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t kind = rng.below(10);
    Rational theta;
    if (kind == 0) {
      theta = 0;
    } else if (kind <= 3) {
      theta = Rational(rng.range(0, 999999), 1000000);
    } else {
      int e = static_cast<int>(rng.range(0, max_exponent));
      theta = Rational(rng.range(100, 999), 100) / Rational(ipow(BigInt(10), static_cast<std::uint64_t>(e)));
      if (theta >= 1) theta -= Rational(floor_div(theta));
      if (rng.coin()) theta = 1 - theta;
    }
    angles.push_back(theta);
    raw.push_back(rng.range(1, 1000));
    wsum += raw.back();
  }
  for (auto r : raw) weights.emplace_back(Rational(r, wsum));
  AtomicMeasure mu(std::move(angles), std::move(weights));
  CircleObservable f;
  for (std::size_t k = 0; k < n; ++k) f.push_back(rng.rational(-1, 1, 1000));
  Rational n2 = norm2_sq(mu, f);
  if (n2 > 1) {
    Rational s = Rational(1) / Rational(floor_div(n2) + 1);
    for (auto& v : f) v *= s;
  }
  return {std::move(mu), std::move(f)};
}

}  // namespace walshlab
