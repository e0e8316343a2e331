#pragma once

// JSON descriptors for maps, systems, actions and observables. Rationals are
// "p/q" strings; polynomials are strings over n0..n7 (x, y, z alias n0..n2).

#include "walshlab/dynamics.hpp"
#include "walshlab/polymap.hpp"
#include "walshlab/systems.hpp"

#include <json.hpp>

#include <cctype>
#include <set>

namespace walshlab {

using Json = nlohmann::json;

/// Malformed or unexpected input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

inline void require_keys(const Json& j, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  std::set<std::string> allowed;
  for (auto k : required) {
    allowed.insert(k);
    if (!j.contains(k)) throw SchemaError(where + ": missing field '" + k + "'");
  }
  for (auto k : optional) allowed.insert(k);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw SchemaError(where + ": unknown field '" + it.key() + "'");
}

inline Rational json_rational(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": expected a rational \"p/q\" string or an integer");
}

inline Json json_of(const Rational& q) { return to_string(q); }

inline std::int64_t json_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::string json_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  Poly parse() {
    Poly p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw SchemaError("polynomial '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Poly expr() {
    Poly p = term();
    while (true) {
      if (eat('+'))
        p = p + term();
      else if (eat('-'))
        p = p - term();
      else
        return p;
    }
  }
  Poly term() {
    Poly p = factor();
    while (eat('*')) p = p * factor();
    return p;
  }
  Poly factor() {
    if (eat('-')) return -factor();
    Poly b = base();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      b = b.pow(std::stoul(s_.substr(start, pos_ - start)));
    }
    return b;
  }
  Poly base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Poly(BigInt(s_.substr(start, pos_ - start)));
    }
    if (c == 'x' || c == 'y' || c == 'z') {
      ++pos_;
      return Poly::var(static_cast<Var>(c - 'x'));
    }
    if (c == 'n') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a coordinate index after 'n'");
      auto v = std::stoul(s_.substr(start, pos_ - start));
      if (v >= kFirstParam) fail("coordinate index too large");
      return Poly::var(static_cast<Var>(v));
    }
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Poly parse_poly(const std::string& text) { return detail::PolyParser(text).parse(); }

inline GroupModel group_from_name(const std::string& name) {
  if (name == "Z" || name == "Z1") return GroupModel::zr(1);
  if (name == "Z2") return GroupModel::zr(2);
  if (name == "Z3") return GroupModel::zr(3);
  if (name == "heis") return GroupModel::heis();
  throw SchemaError("unknown group '" + name + "' (expected Z1, Z2, Z3 or heis)");
}

inline Point json_point(const Json& j, const GroupModel& G, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != G.arity())
    throw SchemaError(where + ": expected " + std::to_string(G.arity()) + " integer coordinates");
  Point p;
  for (const auto& v : j) p.push_back(json_int(v, where));
  return p;
}

inline Json json_of(const Point& p) {
  Json out = Json::array();
  for (auto v : p) out.push_back(v);
  return out;
}

/// {"entries": [{"row":r, "col":c, "poly":"..."}]} over UT(dim).
inline PolyMap json_polymap(const Json& j, const GroupModel& G, int dim, const std::string& where) {
  require_keys(j, {"entries"}, {}, where);
  if (!j["entries"].is_array()) throw SchemaError(where + ": entries must be an array");
  SymUT m(dim);
  SymUT out = m;
  for (const auto& e : j["entries"]) {
    require_keys(e, {"row", "col", "poly"}, {}, where + ".entries");
    auto r = json_int(e["row"], where), c = json_int(e["col"], where);
    if (r < 0 || c <= r || c >= dim) throw SchemaError(where + ": entry must be strictly upper triangular");
    Poly p = parse_poly(json_string(e["poly"], where));
    try {
      out = out * SymUT::elementary(dim, static_cast<int>(r), static_cast<int>(c), p);
    } catch (const Error& err) {
      throw SchemaError(where + ": " + err.what());
    }
  }
  try {
    return PolyMap(G, out);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& err) {
    throw SchemaError(where + ": " + err.what());
  }
}

inline Json json_of(const PolyMap& g) {
  Json entries = Json::array();
  const int d = g.dim();
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      const Poly& p = g.entries().at(r, c);
      if (!p.is_zero()) entries.push_back({{"row", r}, {"col", c}, {"poly", p.str()}});
    }
  return Json{{"entries", entries}};
}

inline Json json_of(const System& s) {
  Json maps = Json::array();
  for (const auto& g : s.maps()) maps.push_back(json_of(g));
  return maps;
}

inline Json json_of(const CertificateNode& node) {
  Json out;
  out["system"] = json_of(node.normalized);
  if (node.a) {
    Json a = Json::array(), b = Json::array();
    for (const auto& p : *node.a) a.push_back(p.str());
    for (const auto& p : *node.b) b.push_back(p.str());
    out["a"] = a;
    out["b"] = b;
    out["reduced_index"] = node.reduced_index;
  }
  Json children = Json::array();
  for (const auto& c : node.children) children.push_back(json_of(c));
  out["children"] = children;
  return out;
}

inline Prefiltration json_prefiltration(const Json& j, int dim, const std::string& where) {
  require_keys(j, {}, {"kind", "offsets", "refine"}, where);
  Prefiltration base = lcs(dim);
  if (j.contains("offsets")) {
    std::vector<int> offs;
    for (const auto& v : j["offsets"]) offs.push_back(static_cast<int>(json_int(v, where)));
    try {
      base = Prefiltration(dim, offs);
    } catch (const Error& e) {
      throw SchemaError(where + ": " + e.what());
    }
  } else if (j.contains("kind") && json_string(j["kind"], where) != "lcs") {
    throw SchemaError(where + ": unknown prefiltration kind");
  }
  if (j.contains("refine")) base = refine_scalar(base, static_cast<int>(json_int(j["refine"], where)));
  return base;
}

inline Observable json_observable(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) throw SchemaError(where + ": expected " + std::to_string(n) + " values");
  Observable f;
  for (const auto& v : j) f.push_back(json_rational(v, where));
  return f;
}

inline Json json_of(const Observable& f) {
  Json out = Json::array();
  for (const auto& v : f) out.push_back(to_string(v));
  return out;
}

inline Perm json_perm(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) throw SchemaError(where + ": permutation must list " + std::to_string(n) + " images");
  std::vector<int> im;
  for (const auto& v : j) im.push_back(static_cast<int>(json_int(v, where)));
  try {
    return Perm(im);
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

/// Action descriptor:
/// {"group", "space": {"size"} | {"weights"}, "base": [perm...], "maps": [[poly per base]...]}
inline ActionAssignment json_action(const Json& j, const std::string& where) {
  require_keys(j, {"group", "space", "base", "maps"}, {}, where);
  GroupModel G = group_from_name(json_string(j["group"], where + ".group"));
  const Json& sp = j["space"];
  require_keys(sp, {}, {"size", "weights"}, where + ".space");
  std::vector<Rational> w;
  if (sp.contains("weights")) {
    for (const auto& v : sp["weights"]) w.push_back(json_rational(v, where + ".space.weights"));
  } else if (sp.contains("size")) {
    auto n = json_int(sp["size"], where + ".space.size");
    if (n < 1) throw SchemaError(where + ".space.size must be >= 1");
    w.assign(static_cast<std::size_t>(n), Rational(1, n));
  } else {
    throw SchemaError(where + ".space: need size or weights");
  }
  try {
    FiniteMPSpace X(w);
    std::vector<Perm> base;
    for (const auto& p : j["base"]) base.push_back(json_perm(p, X.size(), where + ".base"));
    std::vector<std::vector<Poly>> maps;
    for (const auto& row : j["maps"]) {
      if (!row.is_array() || row.size() != base.size()) throw SchemaError(where + ".maps: one exponent per base permutation");
      std::vector<Poly> ps;
      for (const auto& e : row) ps.push_back(parse_poly(json_string(e, where + ".maps")));
      maps.push_back(std::move(ps));
    }
    return ActionAssignment(X, G, base, maps);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

inline FolnerFamily json_family(const Json& j, const std::string& where) {
  auto s = json_string(j, where);
  if (s == "canonical") return FolnerFamily::Canonical;
  if (s == "alternate") return FolnerFamily::Alternate;
  throw SchemaError(where + ": family must be canonical or alternate");
}

/// {"N", "a"?, "b"?, "family"?}
inline FolnerSet json_folner(const Json& j, const GroupModel& G, const std::string& where) {
  require_keys(j, {"N"}, {"a", "b", "family"}, where);
  auto N = json_int(j["N"], where + ".N");
  if (N < 1) throw SchemaError(where + ".N must be >= 1");
  Point a = j.contains("a") ? json_point(j["a"], G, where + ".a") : G.identity<std::int64_t>();
  Point b = j.contains("b") ? json_point(j["b"], G, where + ".b") : G.identity<std::int64_t>();
  FolnerFamily fam = j.contains("family") ? json_family(j["family"], where + ".family") : FolnerFamily::Canonical;
  return FolnerSet(G, N, a, b, fam);
}

}  // namespace walshlab
