// walshlab command-line interface.

#include "walshlab/json_io.hpp"
#include "walshlab/rates.hpp"
#include "walshlab/vncircle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace walshlab;

namespace {

constexpr const char* kGrowthHelp =
    "Growth expressions: integers, M, + * ^, max(a,b), parentheses, and\n"
    "postfix composition E(E2) meaning E applied to E2. Example: \"max(2*M, (M+1)^2)\".";

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fixed(const Real& x) { return x.str(12, std::ios::scientific); }

Rational rational_flag(const std::string& text, const std::string& name) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw SchemaError("--" + name + ": " + e.what());
  }
}

GrowthFunction growth_flag(const std::string& text) {
  try {
    return GrowthFunction::parse(text);
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_verify_poly(const std::string& input, const std::string& output, bool strict) {
  Json j = read_json(input);
  Json out;
  PolyVerdict v;
  if (j.contains("target") && j["target"] == "perm") {
    require_keys(j, {"group", "target", "generators", "word", "scalar_degree"}, {}, "verify-poly");
    GroupModel G = group_from_name(json_string(j["group"], "group"));
    if (!j["generators"].is_array() || j["generators"].empty()) throw SchemaError("generators must be a nonempty array");
    const std::size_t n = j["generators"][0].size();
    std::vector<Perm> gens;
    for (const auto& p : j["generators"]) gens.push_back(json_perm(p, n, "generators"));
    std::vector<PermWordMap::Letter> word;
    for (const auto& l : j["word"]) {
      require_keys(l, {"gen", "exp"}, {}, "word");
      word.push_back({static_cast<int>(json_int(l["gen"], "word.gen")), parse_poly(json_string(l["exp"], "word.exp"))});
    }
    int d = static_cast<int>(json_int(j["scalar_degree"], "scalar_degree"));
    try {
      v = is_polynomial(PermWordMap(G, gens, word), d);
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(e.what());
    }
  } else {
    require_keys(j, {"group", "dim", "map"}, {"prefiltration", "depth_cap"}, "verify-poly");
    GroupModel G = group_from_name(json_string(j["group"], "group"));
    int dim = static_cast<int>(json_int(j["dim"], "dim"));
    if (dim < 2 || dim > 12) throw SchemaError("dim must lie in 2..12");
    PolyMap g = json_polymap(j["map"], G, dim, "map");
    Prefiltration filt = j.contains("prefiltration") ? json_prefiltration(j["prefiltration"], dim, "prefiltration") : lcs(dim);
    v = j.contains("depth_cap") ? is_polynomial(g, filt, static_cast<int>(json_int(j["depth_cap"], "depth_cap")))
                                : is_polynomial(g, filt);
  }
  out["status"] = to_string(v.status);
  Json trace = Json::array();
  for (const auto& t : v.trace)
    trace.push_back({{"level", t.level}, {"offset", t.offset}, {"terms", t.terms}, {"n_degree", t.n_degree}});
  out["trace"] = trace;
  if (v.witness) {
    Json w{{"level", v.witness->level}, {"row", v.witness->row}, {"col", v.witness->col}, {"detail", v.witness->detail}};
    Json asg = Json::object();
    for (const auto& [var, val] : v.witness->assignment) asg[Poly::var_name(var)] = val.str();
    w["assignment"] = asg;
    out["witness"] = w;
  }
  Output o(output);
  o.os() << out.dump(2) << "\n";
  return strict && !v.certified() ? 1 : 0;
}

int cmd_complexity(const std::string& input, const std::string& output, const std::vector<int>& bound, bool strict) {
  Output o(output);
  if (!bound.empty()) {
    if (bound.size() != 2) throw SchemaError("--bound takes d and j");
    auto c = complexity_bound(bound[0] < 0 ? kMinusInfinity : bound[0], bound[1]);
    Json out{{"d", bound[0]}, {"j", bound[1]}, {"value", c ? Json(c->str()) : Json(nullptr)}, {"overflow", !c}};
    o.os() << out.dump(2) << "\n";
    return 0;
  }
  Json j = read_json(input);
  require_keys(j, {"group", "dim", "maps"}, {"budget", "mode", "max_nodes"}, "complexity");
  GroupModel G = group_from_name(json_string(j["group"], "group"));
  int dim = static_cast<int>(json_int(j["dim"], "dim"));
  if (dim < 2 || dim > 12) throw SchemaError("dim must lie in 2..12");
  std::vector<PolyMap> tail;
  for (const auto& m : j["maps"]) tail.push_back(json_polymap(m, G, dim, "maps"));
  if (tail.empty()) throw SchemaError("maps must list g_1..g_j");
  System s = System::with_identity(tail);
  int budget = j.contains("budget") ? static_cast<int>(json_int(j["budget"], "budget")) : 8;
  CertifyOptions opt;
  if (j.contains("max_nodes")) opt.max_nodes = static_cast<std::size_t>(json_int(j["max_nodes"], "max_nodes"));
  std::string mode = j.contains("mode") ? json_string(j["mode"], "mode") : "two-sided";
  if (mode != "two-sided" && mode != "right") throw SchemaError("mode must be two-sided or right");
  opt.right_only = mode == "right";
  ComplexityResult r = certify_complexity(s, budget, opt);
  std::uint32_t d = 0;
  for (const auto& g : tail) d = std::max(d, g.n_degree());
  auto cb = complexity_bound(static_cast<int>(d), static_cast<int>(tail.size()));
  Json out;
  out["status"] = r.certified() ? "certified" : "inconclusive";
  out["bound"] = r.certified() ? Json(r.bound) : Json(nullptr);
  out["nodes"] = r.nodes_explored;
  out["degree"] = d;
  out["j"] = tail.size();
  out["complexity_bound"] = cb ? Json(cb->str()) : Json("overflow");
  if (r.certificate) out["certificate"] = json_of(*r.certificate);
  o.os() << out.dump(2) << "\n";
  return strict && !r.certified() ? 1 : 0;
}

int cmd_folner(const std::string& group, const std::string& gamma_text, std::int64_t L, std::int64_t nmax,
               const std::string& output) {
  GroupModel G = group_from_name(group);
  Rational gamma = rational_flag(gamma_text, "gamma");
  if (gamma <= 0) throw SchemaError("--gamma must be > 0");
  if (L < 1 || nmax < 1) throw SchemaError("--L and --nmax must be >= 1");
  Output o(output);
  o.os() << "N,sup_ratio,below_gamma\n";
  std::optional<std::int64_t> first;
  for (std::int64_t N = 1; N <= nmax; ++N) {
    Rational s = sup_symdiff(G, L, N);
    bool below = s < gamma;
    if (below && !first) first = N;
    o.os() << N << "," << to_string(s) << "," << (below ? 1 : 0) << "\n";
  }
  if (first)
    std::cerr << "phi: least N = " << *first << "\n";
  else
    std::cerr << "phi: not reached within N <= " << nmax << "\n";
  return first ? 0 : 1;
}

std::vector<Observable> json_observables(const Json& j, std::size_t n) {
  if (!j.is_array()) throw SchemaError("observables must be an array");
  std::vector<Observable> fs;
  for (const auto& f : j) fs.push_back(json_observable(f, n, "observables"));
  return fs;
}

int cmd_simulate(const std::string& input, const std::string& output) {
  Json j = read_json(input);
  require_keys(j, {"action", "observables", "sets"}, {"limit"}, "simulate");
  ActionAssignment act = json_action(j["action"], "action");
  auto fs = json_observables(j["observables"], act.space().size());
  if (fs.size() != act.j() + 1) throw SchemaError("need one observable per map");
  Json out;
  Json avs = Json::array();
  for (const auto& sj : j["sets"]) {
    FolnerSet I = json_folner(sj, act.model(), "sets");
    avs.push_back({{"N", I.N()}, {"a", json_of(I.a())}, {"b", json_of(I.b())}, {"family", to_string(I.family())},
                   {"value", json_of(av(act, I, fs))}});
  }
  out["averages"] = avs;
  if (!j.contains("limit") || j["limit"].get<bool>()) {
    LimitResult lim = limit_oracle(act, fs);
    out["limit"] = {{"exact", lim.exact}, {"period", lim.period}, {"value", json_of(lim.value)}};
  }
  Output o(output);
  o.os() << out.dump(2) << "\n";
  return 0;
}

int cmd_scan(const std::string& input, const std::string& output) {
  Json j = read_json(input);
  require_keys(j, {"action", "observables", "epsilon", "gamma", "growth", "M_lo", "M_hi"}, {"shifts"}, "scan");
  ActionAssignment act = json_action(j["action"], "action");
  auto fs = json_observables(j["observables"], act.space().size());
  if (fs.size() != act.j() + 1) throw SchemaError("need one observable per map");
  ScanConfig cfg;
  cfg.epsilon = json_rational(j["epsilon"], "epsilon");
  cfg.gamma = json_rational(j["gamma"], "gamma");
  cfg.F = growth_flag(json_string(j["growth"], "growth"));
  cfg.M_lo = json_int(j["M_lo"], "M_lo");
  cfg.M_hi = json_int(j["M_hi"], "M_hi");
  if (cfg.epsilon <= 0 || cfg.gamma <= 0 || cfg.M_lo < 1 || cfg.M_hi < cfg.M_lo) throw SchemaError("scan parameters out of range");
  if (j.contains("shifts"))
    for (const auto& s : j["shifts"]) {
      require_keys(s, {"a", "b"}, {}, "shifts");
      cfg.shifts.push_back({json_point(s["a"], act.model(), "shifts.a"), json_point(s["b"], act.model(), "shifts.b")});
    }
  ScanReport rep = metastability_scan(act, fs, cfg);
  Output o(output);
  o.os() << "M,N,N2,shift,l2_oscillation,l2_oscillation_sq,pairs,pass\n";
  for (const auto& r : rep.rows) {
    Real osc = sqrt(to_real(r.max_osc_sq));
    o.os() << r.M << "," << r.worst_N << "," << r.worst_N2 << "," << r.worst_shift << "|" << r.worst_shift2 << ","
           << fixed(osc) << "," << to_string(r.max_osc_sq) << "," << r.pairs << "," << (r.pass ? 1 : 0) << "\n";
  }
  if (rep.least_passing)
    std::cerr << "least passing M = " << *rep.least_passing << "\n";
  else
    std::cerr << "window exhausted without a pass\n";
  return 0;
}

int cmd_vn(const std::string& eps_text, const std::string& growth, std::int64_t m0, std::int64_t cases,
           std::uint64_t seed, std::int64_t max_atoms, const std::string& output) {
  Rational eps = rational_flag(eps_text, "epsilon");
  if (eps <= 0) throw SchemaError("--epsilon must be > 0");
  if (m0 < 1 || cases < 0 || max_atoms < 1) throw SchemaError("--m0, --cases, --max-atoms out of range");
  GrowthFunction F = growth_flag(growth);
  auto Ms = vn_sequence(eps, F, BigInt(m0));
  int max_exp = static_cast<int>(detail::log10_big(Ms.back()).convert_to<double>()) + 4;
  Rng rng(seed);
  std::vector<VnCase> corpus;
  for (std::int64_t k = 0; k < cases; ++k) corpus.push_back(random_vn_case(rng, static_cast<std::size_t>(max_atoms), max_exp));
  struct Row {
    std::size_t i;
    MetastabilityCheck chk;
  };
  auto rows = parallel_map(corpus.size(), [&](std::size_t k) {
    auto ph = pigeonhole_decompose(corpus[k].f, corpus[k].mu, eps, F, Ms);
    return Row{ph.i, check_metastability(corpus[k].f, corpus[k].mu, eps, Ms[ph.i - 1], F)};
  });
  Output o(output);
  o.os() << "case,i,max_oscillation,exhaustive,pass\n";
  bool all = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    all = all && rows[k].chk.pass;
    o.os() << k << "," << rows[k].i << "," << fixed(rows[k].chk.max_osc) << "," << (rows[k].chk.exhaustive ? 1 : 0)
           << "," << (rows[k].chk.pass ? 1 : 0) << "\n";
  }
  return all ? 0 : 1;
}

int cmd_rates(const std::string& eps_text, int c, const std::string& growth, const std::string& m_text,
              const std::string& mode, std::int64_t entries, std::int64_t ladder_override, const std::string& output) {
  Rational eps = rational_flag(eps_text, "epsilon");
  if (eps <= 0) throw SchemaError("--epsilon must be > 0");
  if (c < 0) throw SchemaError("--complexity must be >= 0");
  if (mode != "exact" && mode != "deferred") throw SchemaError("--mode must be exact or deferred");
  BigInt M;
  try {
    M = BigInt(m_text);
  } catch (...) {
    throw SchemaError("--m must be a positive integer");
  }
  if (M < 1) throw SchemaError("--m must be >= 1");
  GrowthFunction F = growth_flag(growth);
  RateOverrides ov;
  if (ladder_override > 0) ov.ladder_length = BigInt(ladder_override);
  Json out;
  out["epsilon"] = to_string(eps);
  out["complexity"] = c;
  out["delta"] = to_string(delta(eps));
  out["ladder_length"] = ladder_length(eps, ov).str();
  if (ov.any()) out["non_conforming_override"] = true;
  if (c >= 1) {
    GammaMagnitude g = gamma_iter(eps, c, ov);
    Json gj{{"value", g.describe()}, {"approximate", g.approximate}};
    if (auto d = g.digits()) gj["denominator_digits"] = d->str();
    out["gamma"] = gj;
  }
  bool exact_ok = mode == "exact";
  if (exact_ok) {
    try {
      TupleEngine eng(ov);
      BigInt count = eng.count_theorem(c, eps);
      out["count"] = count.str();
      Json es = Json::array();
      for (BigInt k = 0; k < count && k < entries; ++k) es.push_back(eng.entry_theorem(c, eps, F, M, k).str());
      out["entries"] = es;
      if (c >= 1) {
        // N of the proposition that feeds the first ladder rung
        out["N"] = eng.n_prop(c - 1, eps, F, M).str();
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      exact_ok = false;
      out["exact_unavailable"] = e.what();
    }
  }
  if (!exact_ok) {
    out["mode"] = "deferred";
    if (auto lg = count_theorem_log10(c, eps, ov)) {
      if (*lg < Real("1e15"))
        out["count_digits"] = (floor(*lg) + 1).str(0, std::ios::fixed);
      else
        out["count_digits"] = "10^" + log10(*lg).str(12);
    } else {
      out["count_digits"] = "beyond representable magnitude";
    }
  } else {
    out["mode"] = "exact";
  }
  Output o(output);
  o.os() << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walshlab: nilpotent multiple ergodic averages, complexity calculus and metastability rates"};
  app.require_subcommand(1);
  app.footer(kGrowthHelp);
  std::string output, input;
  std::uint64_t seed = 1;
  bool strict = false;

  auto* vp = app.add_subcommand("verify-poly", "Certify or refute polynomiality of a map");
  vp->add_option("--input", input, "map descriptor (JSON)")->required();
  vp->add_option("--output", output, "output path (default stdout)");
  vp->add_flag("--strict", strict, "exit 1 unless Certified");

  std::vector<int> bound;
  auto* cx = app.add_subcommand("complexity", "Certify complexity of a system, or evaluate c(d,j)");
  cx->add_option("--input", input, "system descriptor (JSON)");
  cx->add_option("--bound", bound, "evaluate c(d, j); d = -1 means -infinity")->expected(2);
  cx->add_option("--output", output, "output path (default stdout)");
  cx->add_flag("--strict", strict, "exit 1 unless Certified");

  std::string group = "Z1", gamma = "1/2";
  std::int64_t L = 2, nmax = 40;
  auto* fo = app.add_subcommand("folner", "CSV table of sup_{l in F_L} |lF_N Δ F_N|/|F_N|");
  fo->add_option("--group", group, "Z1, Z2, Z3 or heis");
  fo->add_option("--gamma", gamma, "threshold p/q");
  fo->add_option("--L", L, "size of the set of translations F_L");
  fo->add_option("--nmax", nmax, "largest N");
  fo->add_option("--output", output, "output path (default stdout)");

  auto* si = app.add_subcommand("simulate", "Exact multiple ergodic averages and limits");
  si->add_option("--input", input, "simulation descriptor (JSON)")->required();
  si->add_option("--output", output, "output path (default stdout)");

  auto* sc = app.add_subcommand("scan", "Metastability scan over Folner pairs");
  sc->add_option("--input", input, "scan descriptor (JSON)")->required();
  sc->add_option("--output", output, "output path (default stdout)");

  std::string eps = "1/2", growth = "2*M", m_text = "1", mode = "exact";
  std::int64_t m0 = 10, cases = 1000, max_atoms = 50, entries = 8, ladder_override = 0;
  int complexity = 1;
  auto* vn = app.add_subcommand("vn", "Quantitative von Neumann theorem on random atomic measures");
  vn->add_option("--epsilon", eps, "epsilon p/q");
  vn->add_option("--growth", growth, "growth function F");
  vn->add_option("--m0", m0, "M_1");
  vn->add_option("--cases", cases, "number of random cases");
  vn->add_option("--seed", seed, "64-bit seed");
  vn->add_option("--max-atoms", max_atoms, "atoms per measure");
  vn->add_option("--output", output, "output path (default stdout)");

  auto* ra = app.add_subcommand("rates", "Constants, counts and tuple entries");
  ra->add_option("--epsilon", eps, "epsilon p/q");
  ra->add_option("--complexity", complexity, "complexity c");
  ra->add_option("--growth", growth, "growth function F");
  ra->add_option("--m", m_text, "lower bound M");
  ra->add_option("--mode", mode, "exact or deferred");
  ra->add_option("--entries", entries, "number of tuple entries to print");
  ra->add_option("--ladder-override", ladder_override, "non-conforming toy ladder length (tests only)");
  ra->add_option("--output", output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (vp->parsed()) return cmd_verify_poly(input, output, strict);
    if (cx->parsed()) {
      if (input.empty() && bound.empty()) throw SchemaError("complexity needs --input or --bound");
      return cmd_complexity(input, output, bound, strict);
    }
    if (fo->parsed()) return cmd_folner(group, gamma, L, nmax, output);
    if (si->parsed()) return cmd_simulate(input, output);
    if (sc->parsed()) return cmd_scan(input, output);
    if (vn->parsed()) return cmd_vn(eps, growth, m0, cases, seed, max_atoms, output);
    if (ra->parsed()) return cmd_rates(eps, complexity, growth, m_text, mode, entries, ladder_override, output);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
