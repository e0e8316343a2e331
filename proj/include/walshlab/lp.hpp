#pragma once

// Exact rational linear programming: minimize c.x subject to A x = b, x >= 0.
// Dense two-phase tableau simplex with Bland's rule.

#include "walshlab/numeric.hpp"

#include <optional>
#include <vector>

namespace walshlab {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Rational value = 0;
  std::vector<Rational> x;
};

namespace detail {

class Tableau {
 public:
  // rows: constraint rows with rhs in the last column; obj: reduced costs with -value last
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> obj;
  std::vector<std::size_t> basis;

  std::size_t cols() const { return obj.size() - 1; }

  void pivot(std::size_t r, std::size_t c) {
    Rational p = rows[r][c];
    for (auto& v : rows[r]) v /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t k = 0; k < rows[i].size(); ++k)
        if (rows[r][k] != 0) rows[i][k] -= f * rows[r][k];
    }
    if (obj[c] != 0) {
      Rational f = obj[c];
      for (std::size_t k = 0; k < obj.size(); ++k)
        if (rows[r][k] != 0) obj[k] -= f * rows[r][k];
    }
    basis[r] = c;
  }

  /// Bland's rule; `allowed` masks entering columns. Returns false if unbounded.
  bool run(const std::vector<bool>& allowed) {
    while (true) {
      std::size_t enter = cols();
      for (std::size_t c = 0; c < cols(); ++c)
        if (allowed[c] && obj[c] < 0) {
          enter = c;
          break;
        }
      if (enter == cols()) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r][enter] <= 0) continue;
        Rational ratio = rows[r].back() / rows[r][enter];
        if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, enter);
    }
  }
};

}  // namespace detail

inline LpResult solve_lp(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                         const std::vector<Rational>& c) {
  const std::size_t m = A.size(), n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw MismatchError("LP constraint row has wrong length");
  if (b.size() != m) throw MismatchError("LP right-hand side has wrong length");

  detail::Tableau t;
  const std::size_t total = n + m;  // originals then artificials
  t.rows.assign(m, std::vector<Rational>(total + 1, Rational(0)));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool flip = b[i] < 0;
    for (std::size_t k = 0; k < n; ++k) t.rows[i][k] = flip ? Rational(-A[i][k]) : A[i][k];
    t.rows[i][n + i] = 1;
    t.rows[i][total] = flip ? Rational(-b[i]) : b[i];
    t.basis[i] = n + i;
  }
  // phase 1: minimize the sum of artificials
  t.obj.assign(total + 1, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k <= total; ++k)
      if (k < n || k == total) t.obj[k] -= t.rows[i][k];
  std::vector<bool> all(total, true);
  t.run(all);
  LpResult res;
  if (-t.obj[total] != 0) return res;

  // drive artificials out of the basis, dropping redundant rows
  for (std::size_t r = 0; r < t.rows.size();) {
    if (t.basis[r] < n) {
      ++r;
      continue;
    }
    std::size_t c = n;
    for (std::size_t k = 0; k < n; ++k)
      if (t.rows[r][k] != 0) {
        c = k;
        break;
      }
    if (c == n) {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(r));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(r));
      continue;
    }
    t.pivot(r, c);
    ++r;
  }

  // phase 2
  t.obj.assign(total + 1, Rational(0));
  for (std::size_t k = 0; k < n; ++k) t.obj[k] = c[k];
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Rational f = t.obj[t.basis[r]];
    if (f == 0) continue;
    for (std::size_t k = 0; k <= total; ++k) t.obj[k] -= f * t.rows[r][k];
  }
  std::vector<bool> originals(total, false);
  for (std::size_t k = 0; k < n; ++k) originals[k] = true;
  if (!t.run(originals)) {
    res.status = LpResult::Status::Unbounded;
    return res;
  }
  res.status = LpResult::Status::Optimal;
  res.value = -t.obj[total];
  res.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (t.basis[r] < n) res.x[t.basis[r]] = t.rows[r][total];
  return res;
}

}  // namespace walshlab
