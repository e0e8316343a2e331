#include "support.hpp"

#include <gtest/gtest.h>

using namespace walshlab;
using namespace walshlab::testing;

namespace {

Observable naive_average(const oracle::PeriodicAction& A, const std::vector<oracle::Pt>& pts,
                         const std::vector<Observable>& fs) {
  Observable acc(A.weights.size(), Rational(0));
  for (const auto& n : pts)
    for (std::size_t x = 0; x < acc.size(); ++x) {
      Rational prod = 1;
      for (std::size_t i = 0; i < fs.size(); ++i) prod *= fs[i][static_cast<std::size_t>(oracle::map_perm(A, i, n)[x])];
      acc[x] += prod;
    }
  for (auto& v : acc) v /= Rational(static_cast<std::int64_t>(pts.size()));
  return acc;
}

std::vector<oracle::Pt> shifted_box(bool heis, int arity, std::int64_t N, const Point& a, const Point& b) {
  std::vector<oracle::Pt> out;
  for (const auto& m : oracle::box_points(arity, heis, N))
    out.push_back(heis ? oracle::heis_mul(oracle::heis_mul(a, m), b) : oracle::add(oracle::add(a, m), b));
  return out;
}

}  // namespace

TEST(Action, PermMatchesNaiveComposition) {
  for (const auto& name : periodic_names()) {
    auto fx = load_periodic(name);
    Rng rng(40);
    for (int trial = 0; trial < 10; ++trial) {
      Point n;
      for (int k = 0; k < fx.act.model().arity(); ++k) n.push_back(rng.range(-20, 20));
      for (std::size_t i = 0; i <= fx.act.j(); ++i) EXPECT_EQ(fx.act.perm(i, n).images(), oracle::map_perm(fx.plain, i, n));
    }
  }
}

TEST(Action, RejectsMeasureBreakingPermutation) {
  FiniteMPSpace X({Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  EXPECT_THROW(ActionAssignment(X, GroupModel::zr(1), {Perm({1, 0, 2})}, {{Poly(0)}, {Poly::var(0)}}), Error);
  EXPECT_THROW(ActionAssignment(FiniteMPSpace::uniform(3), GroupModel::zr(1), {Perm({1, 2, 0})}, {{Poly::var(0)}}), Error);
}

TEST(Average, MatchesNaiveSumOverShiftedSets) {
  for (const auto& name : periodic_names()) {
    auto fx = load_periodic(name);
    bool heis = fx.act.model().kind() == GroupModel::Kind::Heis;
    for (const auto& sh : fx.shifts)
      for (std::int64_t N : {1, 2, 3}) {
        FolnerSet I(fx.act.model(), N, sh.a, sh.b);
        EXPECT_EQ(av(fx.act, I, fx.fs), naive_average(fx.plain, shifted_box(heis, fx.plain.arity, N, sh.a, sh.b), fx.fs))
            << name << " N=" << N;
      }
  }
}

TEST(Limit, SequenceLimitEqualsPeriodCellAverage) {
  for (const auto& name : periodic_names()) {
    auto fx = load_periodic(name);
    Observable want = oracle::period_cell_average(fx.plain, fx.fs);
    auto lim = limit_oracle(fx.act, fx.fs);
    EXPECT_TRUE(lim.exact);
    EXPECT_EQ(lim.value, want) << name;
    const auto& sh = fx.shifts.back();
    EXPECT_EQ(sequence_limit(fx.act, fx.fs, FolnerFamily::Canonical, sh.a, sh.b, 0), want) << name;
    EXPECT_EQ(sequence_limit(fx.act, fx.fs, FolnerFamily::Alternate, sh.a, sh.b, fx.act.period() - 1), want) << name;
  }
}

TEST(Limit, Z4RotationKnownValue) {
  auto fx = load_periodic("z4_rotation");
  // f0 = f1 = 1_{0}; only x = 0 with n = 0 mod 4 contributes, times f2(0) = 1/2.
  EXPECT_EQ(limit_oracle(fx.act, fx.fs).value, (Observable{Rational(1, 8), 0, 0, 0}));
}

TEST(Inverse, ConstructionOnStructuredFixture) {
  auto fx = load_periodic("z4_rotation");
  const Json& s = fx.raw["structured"];
  std::vector<Observable> f;
  for (const auto& v : s["f"]) f.push_back(json_observable(v, 4, "f"));
  Observable u = json_observable(s["u"], 4, "u");
  ActionAssignment act = fx.act.truncated(f.size());
  FolnerSet I = json_folner(s["I"], act.model(), "I");
  Rational C = json_rational(s["C"], "C"), eps = json_rational(s["epsilon"], "epsilon");
  auto res = inverse_witness(act, I, f, u, C, eps);
  ASSERT_TRUE(std::holds_alternative<InverseConstruction>(res));
  const auto& w = std::get<InverseConstruction>(res);
  EXPECT_GT(w.inner_u_sigma, w.two_eta);
  EXPECT_EQ(w.inner_u_sigma, w.av_norm_sq / w.u_sup);
  EXPECT_LE(sup_norm(w.sigma), 1);

  WitnessSearch search;
  search.derived = [&](const FolnerSet& probe) { return std::vector<ReducibilityCandidate>{w.witness_for(act.model(), probe)}; };
  std::vector<FolnerSet> probes{FolnerSet(act.model(), 1, {2}), FolnerSet(act.model(), 2, {-1}, {0})};
  auto rep = is_reducible(w.sigma, act, Rational(1, 2), w.N, probes, search);
  EXPECT_TRUE(rep.reducible) << rep.reason;
  for (const auto& e : rep.probe_errors) EXPECT_LT(e, Rational(1, 2));
}

TEST(Inverse, DiagnosticsWhenPremiseFails) {
  auto fx = load_periodic("z4_rotation");
  ActionAssignment act = fx.act.truncated(1);
  Observable zero(4, Rational(0)), one(4, Rational(1));
  FolnerSet I(act.model(), 4);
  EXPECT_TRUE(std::holds_alternative<InverseDiagnostic>(inverse_witness(act, I, {one}, zero, 1, Rational(1, 2))));
  EXPECT_TRUE(std::holds_alternative<InverseDiagnostic>(inverse_witness(act, I, {one}, 4 * one, 1, Rational(1, 2))));
  EXPECT_TRUE(std::holds_alternative<InverseDiagnostic>(inverse_witness(act, I, {2 * one}, one, 1, Rational(1, 2))));
}

TEST(SigmaNorm, LpAndDuality) {
  FiniteMPSpace X = FiniteMPSpace::uniform(3);
  AtomSet atoms{{1, 0, 0}, {0, 1, 0}, {1, 1, 1}};
  auto v = sigma_norm({2, 2, 2}, atoms);
  ASSERT_FALSE(v.infinite);
  EXPECT_EQ(v.value, 2);
  auto w = sigma_norm({1, -1, 0}, atoms);
  EXPECT_EQ(w.value, 2);
  EXPECT_TRUE(sigma_norm({0, 0, 1}, {{1, 0, 0}}).infinite);
  Observable phi{Rational(1, 2), 1, -1};
  EXPECT_EQ(sigma_dual(X, phi, atoms), Rational(1, 3));
  for (const auto& a : atoms) EXPECT_LE(sigma_norm(a, atoms).value, 1);
}

TEST(Decomposition, VerifyAndSeparate) {
  FiniteMPSpace X = FiniteMPSpace::uniform(2);
  DecompositionParams p;
  p.delta = Rational(1, 2);
  p.eta = [](const Rational& c) { return Rational(1, 10) / c; };
  p.C = {Rational(4), Rational(2)};
  p.sigma_B = {{1, 0}, {0, 1}};
  p.sigma_M = {{1, 1}};
  Observable f{1, Rational(1, 2)}, sigma{1, 0}, u{Rational(1, 20), Rational(-1, 20)}, v = f - sigma - u;
  auto c = verify_decomposition(X, f, sigma, u, v, 1, p);
  EXPECT_TRUE(c.ok());
  EXPECT_FALSE(verify_decomposition(X, f, sigma, u, f, 1, p).sums);
  EXPECT_THROW(verify_decomposition(X, f, sigma, u, v, 3, p), Error);
  EXPECT_TRUE(separation_verify(X, {1, 1}, {1, 1}, {{{Rational(1, 4), 0}}}, {Rational(2)}));
  EXPECT_FALSE(separation_verify(X, {1, 1}, {1, 1}, {{{1, 1}}}, {Rational(2)}));
}

TEST(Scan, RotationOscillationShrinks) {
  auto J = load_fixture("scan_z4.json");
  ActionAssignment act = json_action(J["action"], "scan");
  std::vector<Observable> fs;
  for (const auto& f : J["observables"]) fs.push_back(json_observable(f, 4, "obs"));
  ScanConfig cfg{Rational(1, 2), Rational(1, 4), GrowthFunction::parse("16*M"), 2, 3, {}};
  auto rep = metastability_scan(act, fs, cfg);
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& r : rep.rows) {
    EXPECT_GT(r.pairs, 0u);
    EXPECT_TRUE(r.pass);
  }
  EXPECT_EQ(rep.least_passing, 2);
}
