#pragma once

// Shared generators and fixture loading for the test executables.

#include "oracles.hpp"
#include "walshlab/json_io.hpp"
#include "walshlab/random.hpp"
#include "walshlab/dynamics.hpp"
#include "walshlab/systems.hpp"

#include <fstream>
#include <string>

namespace walshlab::testing {

inline std::string fixture_path(const std::string& rel) { return std::string(WALSHLAB_FIXTURES) + "/" + rel; }

inline Json load_fixture(const std::string& rel) {
  std::ifstream in(fixture_path(rel));
  if (!in) throw Error("missing fixture " + rel);
  return Json::parse(in);
}

// Random polynomial in the coordinates of n with weighted degree <= max_deg,
// where z counts twice on the Heisenberg group.
inline Poly random_poly(Rng& rng, const GroupModel& G, int max_deg, int terms = 2) {
  Poly p = 0;
  auto weight = [&](int k) { return (G.kind() == GroupModel::Kind::Heis && k == 2) ? 2 : 1; };
  for (int t = 0; t < terms; ++t) {
    Poly m = Poly(BigInt(rng.range(-3, 3)));
    int budget = static_cast<int>(rng.range(0, max_deg));
    while (budget > 0) {
      int k = static_cast<int>(rng.range(0, G.arity() - 1));
      if (weight(k) > budget) break;
      m *= Poly::var(static_cast<Var>(k));
      budget -= weight(k);
    }
    p += m;
  }
  return p;
}

// Product of a few elementary factors E_rc(p) with random polynomial p.
inline PolyMap random_polymap(Rng& rng, const GroupModel& G, int dim, int max_deg, int factors = 3) {
  PolyMap g = PolyMap::identity(G, dim);
  for (int f = 0; f < factors; ++f) {
    int r = static_cast<int>(rng.range(0, dim - 2));
    int c = static_cast<int>(rng.range(r + 1, dim - 1));
    g = pointwise_mul(g, PolyMap::elementary(G, dim, r, c, random_poly(rng, G, max_deg)));
  }
  return g;
}

struct PeriodicFixture {
  std::string name;
  Json raw;
  ActionAssignment act;
  std::vector<Observable> fs;
  std::vector<ShiftPair> shifts;
  oracle::PeriodicAction plain;
};

inline const std::vector<std::string>& periodic_names() {
  static const std::vector<std::string> names{"z4_rotation", "z6x6_shifts", "ut3_mod3_z",
                                              "ut3_mod3_heis", "z5_quadratic", "weighted_s3"};
  return names;
}

inline PeriodicFixture load_periodic(const std::string& name) {
  Json j = load_fixture("periodic/" + name + ".json");
  ActionAssignment act = json_action(j["action"], name);
  std::vector<Observable> fs;
  for (const auto& f : j["observables"]) fs.push_back(json_observable(f, act.space().size(), name));
  std::vector<ShiftPair> shifts;
  for (const auto& s : j["shifts"]) shifts.push_back({json_point(s["a"], act.model(), name), json_point(s["b"], act.model(), name)});
  oracle::PeriodicAction plain;
  for (std::size_t x = 0; x < act.space().size(); ++x) plain.weights.push_back(act.space().weight(x));
  plain.arity = act.model().arity();
  for (const auto& T : j["action"]["base"]) plain.base.push_back(T.get<std::vector<int>>());
  for (const auto& row : j["action"]["maps"]) {
    std::vector<Poly> ps;
    for (const auto& e : row) ps.push_back(parse_poly(e.get<std::string>()));
    plain.exponents.push_back(ps);
  }
  return {name, j, act, fs, shifts, plain};
}

inline std::vector<GroupModel> index_groups() { return {GroupModel::zr(1), GroupModel::zr(2), GroupModel::heis()}; }

}  // namespace walshlab::testing
