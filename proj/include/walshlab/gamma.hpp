#pragma once

// Discrete amenable groups used as index groups: Z^r and the discrete
// Heisenberg group H3(Z) with (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y').

#include "walshlab/poly.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace walshlab {

class GroupModel {
 public:
  enum class Kind { Zr, Heis };

  static GroupModel zr(int rank) {
    if (rank < 1 || rank > 3) throw Error("Z^r models support rank 1..3");
    return GroupModel(Kind::Zr, rank);
  }
  static GroupModel heis() { return GroupModel(Kind::Heis, 3); }

  Kind kind() const { return kind_; }
  bool abelian() const { return kind_ == Kind::Zr; }
  /// Number of integer coordinates of an element.
  int arity() const { return arity_; }

  std::string name() const { return kind_ == Kind::Heis ? "heis" : "Z" + std::to_string(arity_); }

  /// Symbolic product of coordinate vectors.
  template <class R>
  std::vector<R> mul(const std::vector<R>& a, const std::vector<R>& b) const {
    check(a);
    check(b);
    std::vector<R> out(static_cast<std::size_t>(arity_));
    for (int k = 0; k < arity_; ++k) out[k] = a[k] + b[k];
    if (kind_ == Kind::Heis) out[2] = out[2] + a[0] * b[1];
    return out;
  }

  template <class R>
  std::vector<R> inv(const std::vector<R>& a) const {
    check(a);
    std::vector<R> out(static_cast<std::size_t>(arity_));
    for (int k = 0; k < arity_; ++k) out[k] = -a[k];
    if (kind_ == Kind::Heis) out[2] = out[2] + a[0] * a[1];
    return out;
  }

  template <class R>
  std::vector<R> identity() const {
    return std::vector<R>(static_cast<std::size_t>(arity_), R(0));
  }

  /// Coordinate polynomials of n itself (variables 0..arity-1).
  std::vector<Poly> coordinates() const {
    std::vector<Poly> out;
    for (int k = 0; k < arity_; ++k) out.push_back(Poly::var(static_cast<Var>(k)));
    return out;
  }

  friend bool operator==(const GroupModel&, const GroupModel&) = default;

 private:
  GroupModel(Kind k, int arity) : kind_(k), arity_(arity) {}

  template <class R>
  void check(const std::vector<R>& a) const {
    if (static_cast<int>(a.size()) != arity_) throw MismatchError("group element has wrong arity for " + name());
  }

  Kind kind_;
  int arity_;
};

/// Concrete element of an index group.
using Point = std::vector<std::int64_t>;

/// Symbolic element: coordinate polynomials, concrete when all are constants.
using SymPoint = std::vector<Poly>;

inline SymPoint to_symbolic(const Point& p) {
  SymPoint out;
  for (auto c : p) out.emplace_back(BigInt(c));
  return out;
}

/// Allocates fresh symbolic group elements above every variable in use.
class ParamAllocator {
 public:
  explicit ParamAllocator(Var next = kFirstParam) : next_(std::max(next, kFirstParam)) {}

  SymPoint fresh(const GroupModel& model) {
    SymPoint out;
    for (int k = 0; k < model.arity(); ++k) out.push_back(Poly::var(next_++));
    return out;
  }

  Var next() const { return next_; }

 private:
  Var next_;
};

}  // namespace walshlab
