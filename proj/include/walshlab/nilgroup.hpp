#pragma once

// Ambient groups: upper unitriangular matrices UT(n) over an exact ring and
// finite permutation groups, plus superdiagonal-pattern prefiltrations.

#include "walshlab/numeric.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

namespace walshlab {

/// Upper unitriangular matrix with entries in a commutative ring R.
/// Only the strictly upper part is stored; the diagonal is 1 and the lower part 0.
template <class R>
class UTMatrix {
 public:
  UTMatrix() = default;
  explicit UTMatrix(int dim) : dim_(dim), upper_(static_cast<std::size_t>(dim * (dim - 1) / 2), R(0)) {
    if (dim < 1) throw Error("UT dimension must be >= 1");
  }

  static UTMatrix identity(int dim) { return UTMatrix(dim); }

  /// Elementary matrix E_{row,col}(value), 0-based indices, row < col.
  static UTMatrix elementary(int dim, int row, int col, R value) {
    UTMatrix m(dim);
    m.at(row, col) = std::move(value);
    return m;
  }

  int dim() const { return dim_; }

  R& at(int row, int col) { return upper_[index(row, col)]; }
  const R& at(int row, int col) const { return upper_[index(row, col)]; }

  /// Full entry access including the implicit diagonal and lower triangle.
  R entry(int row, int col) const {
    if (row == col) return R(1);
    if (row > col) return R(0);
    return at(row, col);
  }

  bool is_identity() const {
    return std::all_of(upper_.begin(), upper_.end(), [](const R& x) { return x == R(0); });
  }

  friend UTMatrix operator*(const UTMatrix& a, const UTMatrix& b) {
    require_same(a, b);
    UTMatrix c(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int j = i + 1; j < a.dim_; ++j) {
        R sum = a.at(i, j) + b.at(i, j);
        for (int k = i + 1; k < j; ++k) {
          if (a.at(i, k) == R(0) || b.at(k, j) == R(0)) continue;
          sum += a.at(i, k) * b.at(k, j);
        }
        c.at(i, j) = std::move(sum);
      }
    return c;
  }

  /// Back substitution: X_ij = -sum_{i<k<=j} A_ik X_kj.
  UTMatrix inverse() const {
    UTMatrix x(dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = j - 1; i >= 0; --i) {
        R sum = at(i, j);
        for (int k = i + 1; k < j; ++k) {
          if (at(i, k) == R(0) || x.at(k, j) == R(0)) continue;
          sum += at(i, k) * x.at(k, j);
        }
        x.at(i, j) = -sum;
      }
    return x;
  }

  friend bool operator==(const UTMatrix& a, const UTMatrix& b) {
    return a.dim_ == b.dim_ && a.upper_ == b.upper_;
  }

  /// Strictly upper entries in row-major order.
  const std::vector<R>& upper() const { return upper_; }
  std::vector<R>& upper() { return upper_; }

  template <class F>
  auto map(F&& fn) const -> UTMatrix<decltype(fn(std::declval<const R&>()))> {
    UTMatrix<decltype(fn(std::declval<const R&>()))> out(dim_);
    for (std::size_t k = 0; k < upper_.size(); ++k) out.upper()[k] = fn(upper_[k]);
    return out;
  }

  static void require_same(const UTMatrix& a, const UTMatrix& b) {
    if (a.dim_ != b.dim_)
      throw MismatchError("UT dimension mismatch: " + std::to_string(a.dim_) + " vs " +
                          std::to_string(b.dim_));
  }

 private:
  std::size_t index(int row, int col) const {
    // rows 0..row-1 contribute (dim-1) + (dim-2) + ... entries
    return static_cast<std::size_t>(row * (2 * dim_ - row - 1) / 2 + (col - row - 1));
  }

  int dim_ = 1;
  std::vector<R> upper_;
};

/// Permutation of {0, ..., degree-1}. Products compose right-to-left:
/// (p * q)(x) = p(q(x)), so the right factor is applied first.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int v : images_) {
      if (v < 0 || v >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(v)])
        throw Error("permutation images are not a bijection");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  static Perm identity(int degree) {
    std::vector<int> im(static_cast<std::size_t>(degree));
    std::iota(im.begin(), im.end(), 0);
    return Perm(std::move(im));
  }

  /// Builds a permutation from disjoint cycles.
  static Perm from_cycles(int degree, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> im(static_cast<std::size_t>(degree));
    std::iota(im.begin(), im.end(), 0);
    for (const auto& cyc : cycles)
      for (std::size_t k = 0; k < cyc.size(); ++k)
        im[static_cast<std::size_t>(cyc[k])] = cyc[(k + 1) % cyc.size()];
    return Perm(std::move(im));
  }

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int x) const { return images_[static_cast<std::size_t>(x)]; }
  const std::vector<int>& images() const { return images_; }

  bool is_identity() const {
    for (std::size_t k = 0; k < images_.size(); ++k)
      if (images_[k] != static_cast<int>(k)) return false;
    return true;
  }

  friend Perm operator*(const Perm& p, const Perm& q) {
    if (p.degree() != q.degree()) throw MismatchError("permutation degree mismatch");
    std::vector<int> im(p.images_.size());
    for (std::size_t x = 0; x < im.size(); ++x) im[x] = p(q(static_cast<int>(x)));
    return Perm(std::move(im));
  }

  Perm inverse() const {
    std::vector<int> im(images_.size());
    for (std::size_t x = 0; x < im.size(); ++x) im[static_cast<std::size_t>(images_[x])] = static_cast<int>(x);
    return Perm(std::move(im));
  }

  Perm pow(std::int64_t e) const {
    Perm base = e < 0 ? inverse() : *this;
    std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
    Perm result = identity(degree());
    while (k) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return result;
  }

  std::int64_t order() const {
    std::int64_t ord = 1;
    std::vector<char> seen(images_.size(), 0);
    for (std::size_t x = 0; x < images_.size(); ++x) {
      if (seen[x]) continue;
      std::int64_t len = 0;
      for (std::size_t y = x; !seen[y]; y = static_cast<std::size_t>(images_[y])) {
        seen[y] = 1;
        ++len;
      }
      ord = std::lcm(ord, len);
    }
    return ord;
  }

  friend bool operator==(const Perm&, const Perm&) = default;

 private:
  std::vector<int> images_;
};

using UTElement = UTMatrix<BigInt>;

/// An element of one of the ambient groups.
class GroupElement {
 public:
  GroupElement(UTElement m) : value_(std::move(m)) {}
  GroupElement(Perm p) : value_(std::move(p)) {}

  static GroupElement ut_identity(int dim) { return UTElement::identity(dim); }
  static GroupElement perm_identity(int degree) { return Perm::identity(degree); }

  bool is_ut() const { return std::holds_alternative<UTElement>(value_); }
  bool is_perm() const { return std::holds_alternative<Perm>(value_); }
  const UTElement& ut() const { return std::get<UTElement>(value_); }
  const Perm& perm() const { return std::get<Perm>(value_); }

  bool is_identity() const {
    return std::visit([](const auto& v) { return v.is_identity(); }, value_);
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  friend GroupElement mul(const GroupElement&, const GroupElement&);
  friend GroupElement inv(const GroupElement&);
  std::variant<UTElement, Perm> value_;
};

inline GroupElement mul(const GroupElement& g, const GroupElement& h) {
  if (g.is_ut() != h.is_ut()) throw MismatchError("group element variant mismatch");
  if (g.is_ut()) return g.ut() * h.ut();
  return g.perm() * h.perm();
}

inline GroupElement inv(const GroupElement& g) {
  if (g.is_ut()) return g.ut().inverse();
  return g.perm().inverse();
}

/// [g, h] = g^-1 h^-1 g h.
inline GroupElement commutator(const GroupElement& g, const GroupElement& h) {
  return mul(mul(inv(g), inv(h)), mul(g, h));
}

template <class R>
UTMatrix<R> commutator(const UTMatrix<R>& g, const UTMatrix<R>& h) {
  return g.inverse() * h.inverse() * g * h;
}

/// Negative-infinity sentinel for prefiltration lengths.
inline constexpr int kMinusInfinity = -1;

/// Prefiltration of UT(dim) by superdiagonal zero patterns. Level i is
/// {g : g[r][c] = 0 whenever 0 < c - r < offset(i)}; offset >= dim is the
/// trivial group. Levels beyond the stored list are trivial.
class Prefiltration {
 public:
  Prefiltration(int dim, std::vector<int> offsets) : dim_(dim), offsets_(std::move(offsets)) {
    if (dim < 1) throw Error("prefiltration dimension must be >= 1");
    for (int& k : offsets_) {
      if (k < 1) throw Error("prefiltration offsets must be >= 1");
      k = std::min(k, dim_);
    }
    for (std::size_t i = 1; i < offsets_.size(); ++i)
      if (offsets_[i] < offsets_[i - 1]) throw Error("prefiltration levels are not monotone");
    while (!offsets_.empty() && offsets_.back() >= dim_ &&
           (offsets_.size() < 2 || offsets_[offsets_.size() - 2] >= dim_))
      offsets_.pop_back();
    if (offsets_.empty() || offsets_.back() < dim_) offsets_.push_back(dim_);
  }

  int dim() const { return dim_; }

  int offset(int level) const {
    if (level < 0) throw Error("prefiltration level must be >= 0");
    if (static_cast<std::size_t>(level) >= offsets_.size()) return dim_;
    return offsets_[static_cast<std::size_t>(level)];
  }

  /// Stored offsets, always terminated by one trivial level.
  const std::vector<int>& offsets() const { return offsets_; }

  bool level_trivial(int level) const { return offset(level) >= dim_; }

  /// d such that level d+1 is trivial, or kMinusInfinity if level 0 is trivial.
  int length() const {
    if (level_trivial(0)) return kMinusInfinity;
    int d = 0;
    while (!level_trivial(d + 1)) ++d;
    return d;
  }

  /// (G[+t])_i = G_{i+t}.
  Prefiltration shifted(int t) const {
    std::vector<int> rest;
    for (std::size_t i = static_cast<std::size_t>(t); i < offsets_.size(); ++i) rest.push_back(offsets_[i]);
    if (rest.empty()) rest.push_back(dim_);
    return Prefiltration(dim_, std::move(rest));
  }

  /// Exact test of [G_i, G_j] within G_{i+j} for superdiagonal patterns:
  /// commutators of offset-k and offset-l patterns have offset k + l.
  bool satisfies_commutator_condition() const {
    int n = static_cast<int>(offsets_.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::min(offset(i) + offset(j), dim_) < offset(i + j)) return false;
    return true;
  }

  friend bool operator==(const Prefiltration&, const Prefiltration&) = default;

 private:
  int dim_;
  std::vector<int> offsets_;
};

template <class R>
bool member(const UTMatrix<R>& g, const Prefiltration& filt, int level) {
  if (g.dim() != filt.dim()) throw MismatchError("element and prefiltration dimensions differ");
  int k = filt.offset(level);
  for (int r = 0; r < g.dim(); ++r)
    for (int c = r + 1; c < g.dim() && c - r < k; ++c)
      if (!(g.at(r, c) == R(0))) return false;
  return true;
}

inline bool member(const GroupElement& g, const Prefiltration& filt, int level) {
  if (!g.is_ut()) throw MismatchError("prefiltration membership needs a UT element");
  return member(g.ut(), filt, level);
}

/// Lower central series of UT(dim): G_0 = G_1 = UT, G_i = offset i, G_dim trivial.
inline Prefiltration lcs(int dim) {
  std::vector<int> offs{1};
  for (int i = 1; i <= dim; ++i) offs.push_back(i);
  return Prefiltration(dim, std::move(offs));
}

/// G_0 followed by each nontrivial lower-central level G_1..G_s repeated d times.
inline Prefiltration refine_scalar(const Prefiltration& series, int d) {
  if (d < 1) throw Error("refine_scalar needs d >= 1");
  std::vector<int> offs{series.offset(0)};
  int top = series.length();
  for (int s = 1; s <= top; ++s)
    for (int rep = 0; rep < d; ++rep) offs.push_back(series.offset(s));
  offs.push_back(series.dim());
  return Prefiltration(series.dim(), std::move(offs));
}

}  // namespace walshlab
