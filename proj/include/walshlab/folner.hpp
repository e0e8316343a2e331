#pragma once

// Two-sided translates a F_N b of canonical Folner sets in Z^r and H3(Z),
// the function phi_gamma, approximate inclusion and the Folner ceiling.

#include "walshlab/gamma.hpp"

#include <set>

namespace walshlab {

class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Canonical: Z^r boxes [0,N)^r, Heis {0<=x,y<N, 0<=z<N^2}.
/// Alternate: Z^r with first side [N^2, N^2+2N), Heis {x<N, y<2N, z<2N^2}.
enum class FolnerFamily { Canonical, Alternate };

inline std::string to_string(FolnerFamily f) { return f == FolnerFamily::Canonical ? "canonical" : "alternate"; }

/// Half-open coordinate box.
struct Box {
  std::vector<std::int64_t> lo, hi;

  std::int64_t side(std::size_t k) const { return hi[k] - lo[k]; }
  bool contains(const Point& p) const {
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (p[k] < lo[k] || p[k] >= hi[k]) return false;
    return true;
  }
  BigInt count() const {
    BigInt c = 1;
    for (std::size_t k = 0; k < lo.size(); ++k) c *= std::max<std::int64_t>(0, side(k));
    return c;
  }
};

inline Box base_box(const GroupModel& model, std::int64_t N, FolnerFamily family = FolnerFamily::Canonical) {
  if (N < 1) throw Error("Folner index N must be >= 1");
  const auto r = static_cast<std::size_t>(model.arity());
  Box box{std::vector<std::int64_t>(r, 0), std::vector<std::int64_t>(r, N)};
  if (model.kind() == GroupModel::Kind::Heis) {
    box.hi[2] = N * N;
    if (family == FolnerFamily::Alternate) {
      box.hi[1] = 2 * N;
      box.hi[2] = 2 * N * N;
    }
  } else if (family == FolnerFamily::Alternate) {
    box.lo[0] = N * N;
    box.hi[0] = N * N + 2 * N;
  }
  return box;
}

/// Degree in N of |F_N| for the family.
inline int count_degree(const GroupModel& model) { return model.kind() == GroupModel::Kind::Heis ? 4 : model.arity(); }

inline Point point_mul(const GroupModel& m, const Point& x, const Point& y) { return m.mul(x, y); }
inline Point point_inv(const GroupModel& m, const Point& x) { return m.inv(x); }

template <class Fn>
void for_each_in_box(const Box& box, Fn&& fn) {
  const std::size_t r = box.lo.size();
  for (std::size_t k = 0; k < r; ++k)
    if (box.lo[k] >= box.hi[k]) return;
  Point p = box.lo;
  while (true) {
    fn(static_cast<const Point&>(p));
    std::size_t k = r;
    while (k > 0) {
      --k;
      if (++p[k] < box.hi[k]) break;
      p[k] = box.lo[k];
      if (k == 0) return;
    }
  }
}

class FolnerSet {
 public:
  FolnerSet(GroupModel model, std::int64_t N, Point a = {}, Point b = {}, FolnerFamily family = FolnerFamily::Canonical)
      : model_(model), N_(N), a_(a.empty() ? model.identity<std::int64_t>() : std::move(a)),
        b_(b.empty() ? model.identity<std::int64_t>() : std::move(b)), family_(family), box_(base_box(model, N, family)) {
    if (static_cast<int>(a_.size()) != model.arity() || static_cast<int>(b_.size()) != model.arity())
      throw MismatchError("shift element has wrong arity");
  }

  const GroupModel& model() const { return model_; }
  std::int64_t N() const { return N_; }
  /// floor(I) = N.
  std::int64_t floor() const { return N_; }
  const Point& a() const { return a_; }
  const Point& b() const { return b_; }
  FolnerFamily family() const { return family_; }
  const Box& box() const { return box_; }

  BigInt measure() const { return box_.count(); }

  template <class Fn>
  void for_each_base(Fn&& fn) const {
    for_each_in_box(box_, fn);
  }

  /// Calls fn(a m b) for m in F_N, in the box's lexicographic order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for_each_in_box(box_, [&](const Point& m) { fn(point_mul(model_, point_mul(model_, a_, m), b_)); });
  }

  std::vector<Point> members() const {
    std::vector<Point> out;
    for_each([&](const Point& p) { out.push_back(p); });
    return out;
  }

  bool contains(const Point& p) const {
    return box_.contains(point_mul(model_, point_mul(model_, point_inv(model_, a_), p), point_inv(model_, b_)));
  }

 private:
  GroupModel model_;
  std::int64_t N_;
  Point a_, b_;
  FolnerFamily family_;
  Box box_;
};

/// |l B ∩ B| for a base box B.
inline BigInt left_overlap(const GroupModel& model, const Point& l, const Box& box) {
  auto overlap = [](std::int64_t len, std::int64_t shift) { return std::max<std::int64_t>(0, len - std::abs(shift)); };
  if (model.kind() == GroupModel::Kind::Zr) {
    BigInt c = 1;
    for (std::size_t k = 0; k < box.lo.size(); ++k) c *= overlap(box.side(k), l[k]);
    return c;
  }
  // (lx+x, ly+y, lz+z+lx*y): z-overlap depends on y only
  BigInt cx = overlap(box.side(0), l[0]);
  if (cx == 0) return 0;
  BigInt sum = 0;
  for (std::int64_t y = box.lo[1]; y < box.hi[1]; ++y) {
    if (y + l[1] < box.lo[1] || y + l[1] >= box.hi[1]) continue;
    sum += overlap(box.side(2), l[2] + l[0] * y);
  }
  return cx * sum;
}

/// |l F_N Δ F_N| / |F_N|.
inline Rational symdiff_ratio(const GroupModel& model, const Point& l, std::int64_t N,
                              FolnerFamily family = FolnerFamily::Canonical) {
  Box box = base_box(model, N, family);
  BigInt total = box.count();
  return Rational(2 * (total - left_overlap(model, l, box)), total);
}

/// Closed form for Z^r boxes at l = (L-1,...,L-1): 2(1 - (1-(L-1)/N)^r).
inline Rational zr_sup_ratio(int r, std::int64_t L, std::int64_t N) {
  if (L - 1 >= N) return 2;
  return 2 * (1 - rpow(Rational(N - (L - 1), N), static_cast<std::uint64_t>(r)));
}

/// phi_gamma(L) = floor(2(L-1)/gamma) + 1 on Z (1 if gamma > 2).
inline BigInt phi_z_closed(const Rational& gamma, const BigInt& L) {
  if (gamma <= 0) throw Error("gamma must be > 0");
  if (L < 1) throw Error("L must be >= 1");
  if (gamma > 2) return 1;
  return floor_div(Rational(2 * (L - 1)) / gamma) + 1;
}

/// Least N with 2(1-(1-(L-1)/N)^r) < gamma, by bisection on the monotone closed form.
inline BigInt phi_zr_closed(int r, const Rational& gamma, const BigInt& L) {
  if (r == 1) return phi_z_closed(gamma, L);
  if (gamma > 2) return 1;
  auto holds = [&](const BigInt& N) {
    if (L - 1 >= N) return false;
    return 2 * (1 - rpow(Rational(N - (L - 1), N), static_cast<std::uint64_t>(r))) < gamma;
  };
  BigInt hi = 1;
  while (!holds(hi)) hi *= 2;
  BigInt lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct PhiResult {
  std::int64_t N = 0;
  bool verified_monotone = false;  // holds at every N' in [N, window_end]
  std::int64_t window_end = 0;
};

inline Rational sup_symdiff(const GroupModel& model, std::int64_t L, std::int64_t N) {
  Rational best = 0;
  FolnerSet(model, L).for_each_base([&](const Point& l) { best = std::max(best, symdiff_ratio(model, l, N)); });
  return best;
}

/// Least N <= cap with sup_{l in F_L} |lF_N Δ F_N|/|F_N| < gamma.
inline PhiResult phi(const GroupModel& model, const Rational& gamma, std::int64_t L, std::int64_t cap = 256) {
  if (gamma <= 0) throw Error("gamma must be > 0");
  PhiResult res;
  for (std::int64_t N = 1; N <= cap; ++N) {
    if (sup_symdiff(model, L, N) < gamma) {
      res.N = N;
      break;
    }
  }
  if (res.N == 0) throw CapExceeded("phi: search cap exceeded");
  res.window_end = cap;
  res.verified_monotone = true;
  for (std::int64_t N = res.N + 1; N <= cap && res.verified_monotone; ++N)
    res.verified_monotone = sup_symdiff(model, L, N) < gamma;
  return res;
}

/// |K \ I| / |K| < gamma.
inline bool approx_included(const std::vector<Point>& K, const FolnerSet& I, const Rational& gamma) {
  if (K.empty()) throw Error("approx_included needs a nonempty K");
  std::int64_t outside = 0;
  for (const auto& k : K)
    if (!I.contains(k)) ++outside;
  return Rational(outside, static_cast<std::int64_t>(K.size())) < gamma;
}

struct CeilWitness {
  Point b;
  std::int64_t hits = 0;  // |K ∩ F_N b|
  bool verified = false;  // I and I' both gamma-approximately included in F_N b
};

class Ceil {
 public:
  Ceil(const FolnerSet& I, const FolnerSet& I2, Rational gamma, std::int64_t cap = 64)
      : I_(I), I2_(I2), gamma_(std::move(gamma)), cap_(cap) {
    if (gamma_ <= 0) throw Error("gamma must be > 0");
    if (!(I.model() == I2.model())) throw MismatchError("Folner sets live in different groups");
    std::set<Point> k;
    I.for_each([&](const Point& p) { k.insert(p); });
    I2.for_each([&](const Point& p) { k.insert(p); });
    K_.assign(k.begin(), k.end());
    BigInt m = std::min(I.measure(), I2.measure());
    beta_ = gamma_ * Rational(m) / Rational(static_cast<std::int64_t>(K_.size()));
    N0_ = 0;
    for (std::int64_t N = cap_; N >= 1; --N) {
      if (!condition(N)) break;
      N0_ = N;
    }
    if (N0_ == 0) throw CapExceeded("ceil: property fails at the search cap");
  }

  std::int64_t N0() const { return N0_; }
  const Rational& beta() const { return beta_; }
  const std::vector<Point>& K() const { return K_; }

  /// min over l in K of |lF_N ∩ F_N|/|F_N| > 1 - beta.
  bool condition(std::int64_t N) const {
    Box box = base_box(I_.model(), N);
    BigInt total = box.count();
    for (const auto& l : K_)
      if (Rational(left_overlap(I_.model(), l, box), total) <= 1 - beta_) return false;
    return true;
  }

  /// b = bt^-1 maximizing |K ∩ F_N b| over bt in F_N.
  CeilWitness witness(std::int64_t N) const {
    const GroupModel& m = I_.model();
    Box box = base_box(m, N);
    CeilWitness best;
    best.hits = -1;
    for_each_in_box(box, [&](const Point& bt) {
      std::int64_t hits = 0;
      for (const auto& k : K_)
        if (box.contains(point_mul(m, k, bt))) ++hits;
      if (hits > best.hits) {
        best.hits = hits;
        best.b = point_inv(m, bt);
      }
    });
    FolnerSet target(m, N, {}, best.b);
    best.verified = approx_included(I_.members(), target, gamma_) && approx_included(I2_.members(), target, gamma_);
    return best;
  }

 private:
  FolnerSet I_, I2_;
  Rational gamma_;
  std::int64_t cap_;
  std::vector<Point> K_;
  Rational beta_;
  std::int64_t N0_;
};

}  // namespace walshlab
