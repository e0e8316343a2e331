#pragma once

// Seeded draws that do not depend on the standard library's distributions.

#include "walshlab/numeric.hpp"

#include <random>

namespace walshlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform on [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = gen_();
    while (v >= limit);
    return v % n;
  }

  /// Uniform on [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin(std::uint64_t num = 1, std::uint64_t den = 2) { return below(den) < num; }

  /// p/den with p uniform in [lo*den, hi*den].
  Rational rational(std::int64_t lo, std::int64_t hi, std::int64_t den) {
    return Rational(range(lo * den, hi * den), den);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace walshlab
