#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace walshlab;
using namespace walshlab::testing;

TEST(Folner, BoxSizes) {
  EXPECT_EQ(FolnerSet(GroupModel::zr(2), 5).measure(), 25);
  EXPECT_EQ(FolnerSet(GroupModel::heis(), 3).measure(), 81);
  EXPECT_EQ(FolnerSet(GroupModel::zr(1), 4, {}, {}, FolnerFamily::Alternate).measure(), 8);
  EXPECT_EQ(FolnerSet(GroupModel::heis(), 2, {}, {}, FolnerFamily::Alternate).measure(), 2 * 4 * 8);
  EXPECT_EQ(count_degree(GroupModel::heis()), 4);
  EXPECT_THROW(FolnerSet(GroupModel::zr(1), 0), Error);
}

TEST(Folner, ShiftedMembership) {
  GroupModel H = GroupModel::heis();
  FolnerSet I(H, 2, {1, -1, 2}, {0, 3, 1});
  for (const auto& p : I.members()) EXPECT_TRUE(I.contains(p));
  for (const auto& m : oracle::box_points(3, true, 2)) {
    auto p = oracle::heis_mul(oracle::heis_mul({1, -1, 2}, m), {0, 3, 1});
    EXPECT_TRUE(I.contains(p));
  }
  EXPECT_FALSE(I.contains({100, 0, 0}));
}

TEST(Folner, SymdiffMatchesSetEnumeration) {
  Rng rng(30);
  for (const auto& G : index_groups()) {
    bool heis = G.kind() == GroupModel::Kind::Heis;
    for (int trial = 0; trial < 20; ++trial) {
      std::int64_t N = rng.range(1, heis ? 4 : 7);
      Point l;
      for (int k = 0; k < G.arity(); ++k) l.push_back(rng.range(-4, 4));
      EXPECT_EQ(symdiff_ratio(G, l, N), oracle::symdiff_by_sets(G.arity(), heis, l, N));
    }
  }
}

TEST(Folner, PhiClosedFormOnZ) {
  GroupModel Z = GroupModel::zr(1);
  for (auto g : {Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(1), Rational(3, 2), Rational(1, 7)})
    for (std::int64_t L = 1; L <= 6; ++L) {
      EXPECT_EQ(phi(Z, g, L, 400).N, phi_z_closed(g, BigInt(L)).convert_to<std::int64_t>());
      EXPECT_EQ(phi_z_closed(g, BigInt(L)), oracle::phi_z(g, BigInt(L)));
    }
}

TEST(Folner, PhiOnZ2AndHeis) {
  GroupModel Z2 = GroupModel::zr(2);
  for (std::int64_t L = 1; L <= 4; ++L) EXPECT_EQ(BigInt(phi(Z2, Rational(1, 2), L).N), phi_zr_closed(2, Rational(1, 2), BigInt(L)));
  auto r = phi(GroupModel::heis(), Rational(1, 2), 2, 64);
  EXPECT_EQ(r.N, 10);
  EXPECT_TRUE(r.verified_monotone);
  EXPECT_THROW(phi(GroupModel::heis(), Rational(1, 100), 3, 4), CapExceeded);
}

TEST(Ceil, WitnessBeyondN0) {
  GroupModel Z = GroupModel::zr(1);
  FolnerSet I(Z, 3, {2}), I2(Z, 5, {-1});
  Ceil ceil(I, I2, Rational(1, 3), 60);
  EXPECT_LE(ceil.N0(), 60);
  for (std::int64_t N = ceil.N0(); N <= 60; ++N) {
    EXPECT_TRUE(ceil.condition(N));
    EXPECT_TRUE(ceil.witness(N).verified) << N;
  }
}

TEST(Ceil, WitnessOnHeisenberg) {
  GroupModel H = GroupModel::heis();
  FolnerSet I(H, 1, {1, 0, 0}), I2(H, 1, {0, 1, 0});
  Ceil ceil(I, I2, Rational(3, 4), 12);
  auto w = ceil.witness(ceil.N0());
  EXPECT_TRUE(w.verified);
  EXPECT_EQ(w.hits, 2);
}

TEST(ApproxIncluded, Definition) {
  GroupModel Z = GroupModel::zr(1);
  FolnerSet I(Z, 4);
  EXPECT_TRUE(approx_included({{0}, {1}, {2}, {9}}, I, Rational(1, 2)));
  EXPECT_FALSE(approx_included({{0}, {1}, {8}, {9}}, I, Rational(1, 2)));
}
