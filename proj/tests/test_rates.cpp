#include "support.hpp"
#include "walshlab/rates.hpp"

#include <gtest/gtest.h>

using namespace walshlab;

namespace {

RateOverrides toy() {
  RateOverrides ov;
  ov.ladder_length = BigInt(2);
  return ov;
}

oracle::Fn as_fn(const GrowthFunction& F) {
  return [F](const BigInt& x) { return F(x); };
}

std::vector<BigInt> engine_theorem(TupleEngine& e, int c, const Rational& eps, const GrowthFunction& F, const BigInt& M) {
  std::vector<BigInt> out;
  for (BigInt i = 0; i < e.count_theorem(c, eps); ++i) out.push_back(e.entry_theorem(c, eps, F, M, i));
  return out;
}

}  // namespace

TEST(Constants, DeltaEtaLadder) {
  EXPECT_EQ(delta(Rational(6)), Rational(1, 6));
  EXPECT_EQ(eta(Rational(6), Rational(2)), Rational(36, 432));
  EXPECT_EQ(ladder_length(Rational(6)), 72);
  EXPECT_EQ(ladder_length(Rational(3)), 288);
  EXPECT_EQ(ladder_length(Rational(1)), 2592);
  EXPECT_EQ(ladder_length(Rational(1), toy()), 2);
  EXPECT_THROW(delta(Rational(0)), Error);
}

TEST(CSequence, DecreasingWithEtaCondition) {
  for (auto eps : {Rational(6), Rational(3), Rational(1)}) {
    auto C = c_sequence(eps);
    ASSERT_EQ(BigInt(static_cast<std::int64_t>(C.size())), ladder_length(eps));
    EXPECT_EQ(C.back(), 1);
    for (std::size_t i = 1; i < C.size(); ++i) {
      EXPECT_GT(C[i - 1], C[i]);
      EXPECT_GE(C[i - 1] * eta(eps, C[i]), 2);
      EXPECT_EQ(C[i - 1], c_ratio(eps) * C[i]);
    }
    EXPECT_EQ(*c_star(eps), C.front());
  }
}

TEST(CSequence, RatioIsOneForLargeEpsilon) {
  EXPECT_EQ(c_ratio(Rational(30)), 1);
  EXPECT_EQ(*c_star(Rational(30)), 1);
}

TEST(Gamma, FirstIterateMatchesLiteralRecursion) {
  for (auto eps : {Rational(6), Rational(3)}) EXPECT_EQ(*gamma1(eps), oracle::gamma_one(eps, ladder_length(eps).convert_to<std::uint64_t>()));
  EXPECT_EQ(*gamma1(Rational(6), toy()), Rational(1, 48));
}

TEST(Gamma, IteratesStrictlyDecrease) {
  for (auto eps : {Rational(6), Rational(1)}) {
    GammaMagnitude prev;
    prev.exact = eps;
    for (int c = 1; c <= 5; ++c) {
      auto g = gamma_iter(eps, c);
      EXPECT_TRUE(smaller(g, prev)) << c;
      prev = g;
    }
  }
  auto a = gamma_iter(Rational(6), 2, toy()), b = gamma_iter(Rational(6), 1, toy());
  ASSERT_TRUE(a.exact && b.exact);
  EXPECT_EQ(*a.exact, oracle::gamma_one(*b.exact, 2));
}

TEST(RMin, ExactMinimality) {
  Rng rng(60);
  for (int trial = 0; trial < 40; ++trial) {
    BigInt K = rng.range(2, 200);
    Rational g(rng.range(1, 99), 100);
    auto r = r_min(K, g);
    Rational q(K - 1, K);
    EXPECT_LT(rpow(q, r), g);
    EXPECT_GE(rpow(q, r - 1), g);
    EXPECT_EQ(r, oracle::r_by_scan(K, g));
  }
  EXPECT_EQ(r_min(1, Rational(1, 2)), 1u);
}

TEST(StructureSequence, HandUnrolledLadders) {
  auto s = structure_sequence(Rational(1), GrowthFunction::parse("2*M"), GrowthFunction::parse("M+3"), BigInt(1), {}, 4);
  EXPECT_EQ(s.A, (std::vector<BigInt>{1, 5, 13, 29}));
  EXPECT_EQ(s.M, (std::vector<BigInt>{2, 10, 26, 58}));
  EXPECT_EQ(s.B, (std::vector<BigInt>{5, 13, 29, 61}));
  // constants fall back to the identity
  auto t = structure_sequence(Rational(1), GrowthFunction::constant(3), GrowthFunction::parse("M^2"), BigInt(2), {}, 3);
  EXPECT_EQ(t.M, (std::vector<BigInt>{3, 9, 81}));
  EXPECT_EQ(t.B, (std::vector<BigInt>{9, 81, 6561}));
  EXPECT_EQ(structure_sequence(Rational(6), GrowthFunction::identity(), GrowthFunction::identity(), BigInt(1)).A.size(), 72u);
}

TEST(Tuples, ComplexityZeroIsSingleton) {
  TupleEngine e;
  auto F = GrowthFunction::parse("2*M");
  EXPECT_EQ(e.count_theorem(0, Rational(6)), 1);
  EXPECT_EQ(e.entry_theorem(0, Rational(6), F, BigInt(7), BigInt(0)), 7);
  oracle::TupleOracle o{72};
  EXPECT_EQ(engine_theorem(e, 0, Rational(6), F, BigInt(7)), o.theorem(0, Rational(6), as_fn(F), BigInt(7)));
}

TEST(Tuples, ToyComplexityOne) {
  TupleEngine e(toy());
  auto F = GrowthFunction::parse("2*M");
  Rational eps(6);
  EXPECT_EQ(e.gamma(eps), Rational(1, 48));
  EXPECT_EQ(engine_theorem(e, 1, eps, F, BigInt(1)), (std::vector<BigInt>{1, 97}));
  EXPECT_EQ(e.count_prop(1, eps), 64);
  EXPECT_EQ(e.count_theorem(2, eps), 128);
  oracle::TupleOracle o{2};
  for (std::int64_t M : {1, 3, 10})
    EXPECT_EQ(engine_theorem(e, 1, eps, F, BigInt(M)), o.theorem(1, eps, as_fn(F), BigInt(M))) << M;
  EXPECT_EQ(e.count_prop(1, eps), ipow(BigInt(o.count(1, o.gamma(eps))), o.r(1, eps)));
}

TEST(Tuples, ToyPropositionPath) {
  TupleEngine e(toy());
  auto F = GrowthFunction::parse("M+1");
  Rational eps(6);
  oracle::TupleOracle o{2};
  auto want = o.prop(1, eps, as_fn(F), BigInt(2));
  ASSERT_EQ(want.size(), 64u);
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_EQ(e.entry_prop(1, eps, F, BigInt(2), BigInt(k)), want[k]) << k;
  auto path = e.prop_path(1, eps, F, BigInt(2), BigInt(63));
  EXPECT_EQ(path.size(), 7u);
  EXPECT_EQ(path.back(), want.back());
}
