#include "support.hpp"

#include <gtest/gtest.h>

using namespace walshlab;
using namespace walshlab::testing;

namespace {

Point random_point(Rng& rng, const GroupModel& G, int span = 4) {
  Point p;
  for (int k = 0; k < G.arity(); ++k) p.push_back(rng.range(-span, span));
  return p;
}

std::map<Var, BigInt> bind_params(const SymPoint& sym, const Point& val) {
  std::map<Var, BigInt> out;
  for (std::size_t k = 0; k < sym.size(); ++k)
    if (!sym[k].is_constant()) out[sym[k].vars().front()] = val[k];
  return out;
}

}  // namespace

TEST(PolyMap, PointwiseOperationsMatchEvaluation) {
  Rng rng(10);
  for (const auto& G : index_groups()) {
    for (int trial = 0; trial < 20; ++trial) {
      PolyMap g = random_polymap(rng, G, 4, 2), h = random_polymap(rng, G, 4, 2);
      Point n = random_point(rng, G);
      EXPECT_EQ(pointwise_mul(g, h).evaluate(n), g.evaluate(n) * h.evaluate(n));
      EXPECT_EQ(pointwise_inv(g).evaluate(n), g.evaluate(n).inverse());
    }
  }
}

TEST(PolyMap, DerivativeMatchesNumericDefinition) {
  Rng rng(11);
  for (const auto& G : index_groups()) {
    for (int trial = 0; trial < 20; ++trial) {
      PolyMap g = random_polymap(rng, G, 3, 2);
      ParamAllocator alloc(g.var_bound());
      auto [a, b] = fresh_shift_pair(G, alloc);
      PolyMap dg = derivative(g, a, b);
      Point n = random_point(rng, G), av = random_point(rng, G), bv = random_point(rng, G);
      if (G.abelian()) bv = G.identity<std::int64_t>();
      auto params = bind_params(a, av);
      for (auto& kv : bind_params(b, bv)) params.insert(kv);
      Point anb = G.mul(G.mul(av, n), bv);
      EXPECT_EQ(dg.evaluate(n, params), g.evaluate(n).inverse() * g.evaluate(anb));
    }
  }
}

TEST(PolyMap, HeisenbergCoordinateMapIsAHomomorphism) {
  GroupModel H = GroupModel::heis();
  Poly x = Poly::var(0), y = Poly::var(1), z = Poly::var(2);
  PolyMap g = pointwise_mul(pointwise_mul(PolyMap::elementary(H, 3, 0, 1, x), PolyMap::elementary(H, 3, 1, 2, y)),
                            PolyMap::elementary(H, 3, 0, 2, z - x * y));
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Point p = random_point(rng, H), q = random_point(rng, H);
    EXPECT_EQ(g.evaluate(H.mul(p, q)), g.evaluate(p) * g.evaluate(q));
  }
  EXPECT_TRUE(is_polynomial(g, lcs(3)).certified());
}

TEST(IsPolynomial, ElementaryExamples) {
  GroupModel Z = GroupModel::zr(1);
  Poly n = Poly::var(0);
  EXPECT_TRUE(is_polynomial(PolyMap::elementary(Z, 3, 0, 2, n * n), lcs(3)).certified());
  EXPECT_TRUE(is_polynomial(PolyMap::elementary(Z, 3, 0, 1, n), lcs(3)).certified());
  auto v = is_polynomial(PolyMap::elementary(Z, 3, 0, 1, n * n), lcs(3));
  EXPECT_TRUE(v.refuted());
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->row, 0);
  EXPECT_EQ(v.witness->col, 1);
  EXPECT_TRUE(is_polynomial(PolyMap::elementary(Z, 3, 0, 1, n * n), refine_scalar(lcs(3), 2)).certified());
  EXPECT_TRUE(is_polynomial(PolyMap::identity(Z, 3), lcs(3)).certified());
}

TEST(IsPolynomial, ScalarDegreeImpliesRefinedCertificate) {
  Rng rng(13);
  int checked = 0;
  for (const auto& G : index_groups())
    for (int trial = 0; trial < 15; ++trial) {
      int dim = 3 + trial % 2;
      PolyMap g = random_polymap(rng, G, dim, 2);
      for (int d = 1; d <= 4; ++d)
        if (scalar_degree_check(g, d)) {
          EXPECT_TRUE(is_polynomial(g, refine_scalar(lcs(dim), d)).certified());
          ++checked;
          break;
        }
    }
  EXPECT_GT(checked, 30);
}

TEST(IsPolynomial, CertificateBoundsScalarDegreeByLength) {
  Rng rng(14);
  for (const auto& G : index_groups())
    for (int trial = 0; trial < 15; ++trial) {
      int dim = 3 + trial % 2;
      Prefiltration filt = refine_scalar(lcs(dim), 2);
      PolyMap g = random_polymap(rng, G, dim, 2);
      if (is_polynomial(g, filt).certified()) EXPECT_TRUE(scalar_degree_check(g, filt.length()));
    }
}

TEST(IsPolynomial, ScalarDegreeIsNotEquivalentToRefinedCertificate) {
  // E02(n^2) passes the d = 1 refinement (which is lcs itself) yet has scalar degree 2.
  GroupModel Z = GroupModel::zr(1);
  Poly n = Poly::var(0);
  PolyMap g = PolyMap::elementary(Z, 3, 0, 2, n * n);
  EXPECT_TRUE(is_polynomial(g, refine_scalar(lcs(3), 1)).certified());
  EXPECT_FALSE(scalar_degree_check(g, 1));
  EXPECT_TRUE(scalar_degree_check(g, 2));
}

TEST(IsPolynomial, ClosedUnderProductsAndInverses) {
  Rng rng(15);
  int pairs = 0;
  for (int trial = 0; trial < 60; ++trial) {
    GroupModel G = index_groups()[static_cast<std::size_t>(trial % 3)];
    int dim = 3 + trial % 2;
    Prefiltration filt = refine_scalar(lcs(dim), 2);
    PolyMap g = random_polymap(rng, G, dim, 2), h = random_polymap(rng, G, dim, 2);
    if (!is_polynomial(g, filt).certified() || !is_polynomial(h, filt).certified()) continue;
    ++pairs;
    EXPECT_TRUE(is_polynomial(pointwise_mul(g, h), filt).certified());
    EXPECT_TRUE(is_polynomial(pointwise_inv(g), filt).certified());
  }
  EXPECT_GE(pairs, 50);
}

TEST(IsPolynomial, DihedralSequences) {
  auto J = load_fixture("verify_dihedral_product.json");
  std::vector<Perm> gens;
  for (const auto& p : J["generators"]) gens.push_back(json_perm(p, 3, "generators"));
  GroupModel Z = GroupModel::zr(1);
  PermWordMap g1(Z, gens, {{0, Poly::var(0)}}), g2(Z, gens, {{1, Poly::var(0)}});
  EXPECT_TRUE(is_polynomial(g1, 1).certified());
  EXPECT_TRUE(is_polynomial(g2, 1).certified());
  PermWordMap prod = pointwise_mul(g1, g2);
  EXPECT_TRUE(is_polynomial(prod, 1).refuted());
  EXPECT_TRUE(is_polynomial(prod, 3).refuted());
  // odd n gives the rotation, even n the identity
  EXPECT_EQ(prod.evaluate({1}), Perm::from_cycles(3, {{0, 1, 2}}));
  EXPECT_TRUE(prod.evaluate({2}).is_identity());
}

TEST(IsPolynomial, DepthCapGivesInconclusive) {
  GroupModel Z = GroupModel::zr(1);
  Poly n = Poly::var(0);
  auto v = is_polynomial(PolyMap::elementary(Z, 4, 0, 3, n * n * n), lcs(4), 1);
  EXPECT_EQ(v.status, PolyVerdict::Status::Inconclusive);
  EXPECT_THROW(is_polynomial(PolyMap::identity(Z, 3), lcs(4)), MismatchError);
}
