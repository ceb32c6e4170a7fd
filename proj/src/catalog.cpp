#include "ijets/catalog.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ijets/parser.hpp"

#ifndef IJETS_DEFAULT_CATALOG_DIR
#define IJETS_DEFAULT_CATALOG_DIR "catalog"
#endif

namespace ijets {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> strings(const json& j) {
  std::vector<std::string> out;
  for (const auto& s : j) out.push_back(s.get<std::string>());
  return out;
}

std::string text_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("expected a string or integer, got " + v.dump());
}

std::vector<int> int_list(const json& j) { return j.get<std::vector<int>>(); }

}  // namespace

namespace {

CatalogEntry load_plain(CatalogEntry& c, const json& j) {
  const auto& nm = j.at("names");
  JetSpace s;
  s.names.base = strings(nm.at("base"));
  s.names.jet = strings(nm.at("unknowns"));
  s.p = static_cast<int>(s.names.base.size());
  s.m = static_cast<int>(s.names.jet.size());
  const auto& sj = j.at("system");
  std::vector<int> vo = sj.contains("variable_order") ? int_list(sj["variable_order"]) : std::vector<int>{};
  std::vector<int> dord = sj.contains("dep_order") ? int_list(sj["dep_order"]) : std::vector<int>{};
  c.plain = true;
  c.p = s.p;
  c.q = 0;
  c.group.p = s.p;
  c.group.q = 0;
  c.group.system = DifferentialSystem(s, ClassTermOrder(s.p, vo, dord));
  add_equations(c.group.system, sj.at("equations"));
  c.group.nstar = sj.value("order", 1);
  return c;
}

}  // namespace

void add_equations(DifferentialSystem& sys, const json& eqs) {
  auto one = [&](const std::string& l, const json& r) {
    Var lhs = parse_var(l, sys.space.names);
    if (lhs.kind != VarKind::Jet) throw InputError("equation lhs must be an unknown jet: " + l);
    sys.add(lhs, parse_expr(text_of(r), sys.space.names));
  };
  if (eqs.is_array()) {
    for (const auto& e : eqs) {
      if (!e.is_array() || e.size() != 2) throw InputError("equation entries must be [lhs, rhs]");
      one(e[0].get<std::string>(), e[1]);
    }
  } else if (eqs.is_object()) {
    for (const auto& [k, v] : eqs.items()) one(k, v);
  } else {
    throw InputError("equations must be an array or object");
  }
}

JetPoint CatalogEntry::section(std::uint64_t seed) const {
  JetPoint pt(seed * 7919 + 17);
  for (const auto& [v, q] : section_overrides) pt.set(v, q);
  return pt;
}

std::vector<Expr> CatalogEntry::element(const std::vector<Expr>& fns, const std::vector<Q>& pars) const {
  if (!law) throw InputError(id + " has no group law");
  if (fns.size() != law->args.size() || pars.size() != law->names.par.size())
    throw InputError("group element: wrong number of functions or parameters");
  auto inst = [&](const Var& v) -> std::optional<Expr> {
    if (v.kind == VarKind::Par) return cst(pars.at(v.dep - 1));
    if (v.kind != VarKind::Fn) return std::nullopt;
    Expr d = fns.at(v.dep - 1);
    for (int i : v.idx.entries()) d = partial(d, base_var(i));
    const auto& args = law->args.at(v.dep - 1);
    std::map<Var, Expr> m;
    for (std::size_t i = 0; i < args.size(); ++i) m[base_var(static_cast<int>(i) + 1)] = args[i];
    return substitute(d, m);
  };
  std::vector<Expr> out;
  for (const auto& e : law->maps) out.push_back(substitute(e, inst));
  return out;
}

std::vector<Expr> CatalogEntry::random_element(std::uint64_t seed, int degree) const {
  if (!law) throw InputError(id + " has no group law");
  RationalSampler rng(seed * 2654435761ULL + 3);
  auto small = [&](int den) -> Q { return rng.next() / Q(den); };
  std::vector<Expr> fns;
  if (law->constraint.rfind("cauchy-riemann:", 0) == 0) {
    // f + i g = h(x + i y) for a random complex polynomial h
    std::string spec = law->constraint.substr(15);
    auto comma = spec.find(',');
    if (comma == std::string::npos) throw InputError("cauchy-riemann constraint needs two functions");
    auto fi = std::find(law->names.fn.begin(), law->names.fn.end(), spec.substr(0, comma)) - law->names.fn.begin();
    auto gi = std::find(law->names.fn.begin(), law->names.fn.end(), spec.substr(comma + 1)) - law->names.fn.begin();
    if (fi >= static_cast<long>(law->names.fn.size()) || gi >= static_cast<long>(law->names.fn.size()))
      throw InputError("cauchy-riemann constraint names unknown functions");
    Expr x = sym(base_var(1)), y = sym(base_var(2));
    std::vector<Expr> re, im;
    for (int k = 0; k <= degree; ++k) {
      Q a = k == 1 ? Q(Q(1) + small(40)) : Q(small(k == 0 ? 9 : 100));
      Q b = small(k == 1 ? 40 : 100);
      // (a + i b)(x + i y)^k
      for (int j = 0; j <= k; ++j) {
        Expr mono = mul({cst(binomial(k, j)), pow(x, k - j), pow(y, j)});
        int ph = j % 4;  // i^j
        Q sr = ph == 0 ? Q(1) : ph == 2 ? Q(-1) : Q(0);
        Q si = ph == 1 ? Q(1) : ph == 3 ? Q(-1) : Q(0);
        Q cr = a * sr - b * si, ci = a * si + b * sr;
        if (cr != 0) re.push_back(cst(cr) * mono);
        if (ci != 0) im.push_back(cst(ci) * mono);
      }
    }
    fns.assign(law->args.size(), cst(0));
    fns[fi] = add(std::move(re));
    fns[gi] = add(std::move(im));
    std::vector<Q> pars;
    for (std::size_t k = 0; k < law->names.par.size(); ++k) pars.push_back(small(3));
    return element(fns, pars);
  }
  for (const auto& args : law->args) {
    const int n = static_cast<int>(args.size());
    std::vector<Expr> terms{cst(small(9))};
    for (int i = 1; i <= n; ++i) terms.push_back(cst(Q(1) + small(40)) * sym(base_var(i)));
    for (int k = 2; k <= degree; ++k)
      for (const auto& J : all_of_order(n, k)) {
        std::vector<Expr> f{cst(small(100))};
        for (int i : J.entries()) f.push_back(sym(base_var(i)));
        terms.push_back(mul(std::move(f)));
      }
    fns.push_back(add(std::move(terms)));
  }
  std::vector<Q> pars;
  for (std::size_t k = 0; k < law->names.par.size(); ++k) pars.push_back(small(3));
  return element(fns, pars);
}

SectionJet CatalogEntry::target(int N, std::uint64_t seed) const {
  JetPoint pt = section(seed);
  std::vector<Q> base;
  for (int i = 1; i <= p; ++i) base.push_back(pt(base_var(i)));
  std::vector<QSeries> ser;
  for (int a = 1; a <= q; ++a) {
    QSeries s(p, N);
    const auto& tab = s.table();
    for (int m = 0; m < tab.size(); ++m) {
      Q f = 1;
      for (int e : tab.exps[m]) f *= factorial(e);
      s[m] = pt(sec_var(a, MultiIndex::from_exponents(tab.exps[m]))) / f;
    }
    ser.push_back(std::move(s));
  }
  return SectionJet::from_series(base, ser);
}

SectionJet CatalogEntry::target_from_json(const json& j, int N) const {
  if (!j.contains("polynomial")) {
    SectionJet s = section_from_json(j, p);
    if (s.series.empty()) throw InputError("target needs \"polynomial\" or \"series\"");
    return s;
  }
  std::vector<Q> base;
  if (j.contains("base"))
    for (const auto& b : j["base"]) base.push_back(b.is_string() ? parse_q(b.get<std::string>()) : Q(b.get<long>()));
  if (static_cast<int>(base.size()) != p) throw InputError("target base must have " + std::to_string(p) + " entries");
  Names nm;
  nm.base = group.reduced_names.base;
  std::vector<QSeries> ser;
  for (const auto& t : j["polynomial"]) {
    Expr e = parse_expr(t.get<std::string>(), nm);
    ser.push_back(eval_series<Q>(e, p, N, [&](const Var& v) {
      if (v.kind != VarKind::Base) throw InputError("target polynomial may only use the base variables");
      return QSeries::variable(p, N, v.dep, base[v.dep - 1]);
    }));
  }
  if (static_cast<int>(ser.size()) != q) throw InputError("target needs one polynomial per dependent variable");
  return SectionJet::from_series(base, ser);
}

std::string catalog_dir() {
  if (const char* env = std::getenv("IJETS_CATALOG_DIR"); env && *env) return env;
  return IJETS_DEFAULT_CATALOG_DIR;
}

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  fs::path dir(catalog_dir());
  if (!fs::is_directory(dir)) throw InputError("catalog directory not found: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

CatalogEntry load_entry(const json& j) {
  try {
    CatalogEntry c;
    c.raw = j;
    c.id = j.at("id").get<std::string>();
    c.description = j.value("description", "");
    if (j.value("kind", "") == "system") return load_plain(c, j);
    c.p = j.at("p").get<int>();
    c.q = j.at("q").get<int>();
    const auto& nm = j.at("names");
    auto base = strings(nm.at("base"));
    auto fiber = strings(nm.at("fiber"));
    auto group = strings(nm.at("group"));
    if (static_cast<int>(base.size()) != c.p || static_cast<int>(fiber.size()) != c.q ||
        static_cast<int>(group.size()) != c.p + c.q)
      throw InputError("names do not match p and q");

    // group system on (x, u)
    JetSpace gs;
    gs.p = c.p + c.q;
    gs.m = c.p + c.q;
    gs.names.base = base;
    gs.names.base.insert(gs.names.base.end(), fiber.begin(), fiber.end());
    gs.names.jet = group;
    const auto& gj = j.at("group");
    std::vector<int> vo = gj.contains("variable_order") ? int_list(gj["variable_order"]) : std::vector<int>{};
    std::vector<int> dord = gj.contains("dep_order") ? int_list(gj["dep_order"]) : std::vector<int>{};
    PseudoGroupSpec& g = c.group;
    g.p = c.p;
    g.q = c.q;
    g.system = DifferentialSystem(gs, ClassTermOrder(gs.p, vo, dord));
    g.system.identity_point = true;
    add_equations(g.system, gj.at("equations"));
    g.nstar = gj.at("nstar").get<int>();

    g.reduced_names.base = base;
    g.reduced_names.jet = group;
    g.reduced_names.sec = fiber;
    std::vector<int> rvo;
    if (j.contains("reduced") && j["reduced"].contains("variable_order")) rvo = int_list(j["reduced"]["variable_order"]);
    g.reduced_order = ClassTermOrder(c.p, rvo);

    if (j.contains("section")) {
      const auto& s = j["section"];
      Names sn;
      sn.base = base;
      sn.sec = fiber;
      for (const auto& [k, v] : s.items()) {
        Var var = parse_var(k, sn);
        if (var.kind != VarKind::Base && var.kind != VarKind::Sec) throw InputError("section override " + k);
        c.section_overrides[var] = parse_q(text_of(v));
      }
    }

    if (j.contains("law")) {
      const auto& l = j["law"];
      GroupLaw law;
      law.names.base = gs.names.base;
      for (const auto& f : l.value("functions", json::array())) {
        law.names.fn.push_back(f.at("name").get<std::string>());
        law.names.fn_index.push_back(strings(f.at("letters")));
      }
      law.names.par = strings(l.value("parameters", json::array()));
      std::size_t k = 0;
      for (const auto& f : l.value("functions", json::array())) {
        std::vector<Expr> args;
        for (const auto& a : f.at("args")) args.push_back(parse_expr(a.get<std::string>(), law.names));
        if (args.size() != law.names.fn_index[k].size()) throw InputError("function letters do not match arguments");
        law.args.push_back(std::move(args));
        ++k;
      }
      for (const auto& m : l.at("maps")) law.maps.push_back(parse_expr(m.get<std::string>(), law.names));
      if (static_cast<int>(law.maps.size()) != c.p + c.q) throw InputError("law needs one map per component");
      law.constraint = l.value("constraint", "");
      c.law = std::move(law);
    }

    if (j.contains("cross_section")) {
      c.cross_section = cross_section_from_json(j["cross_section"], c.p, c.q, g.reduced_names);
      c.nf = j["cross_section"].value("nf", 0);
    }
    if (j.contains("frame")) {
      const auto& f = j["frame"];
      FrameSpec fr;
      fr.nf = f.value("nf", 0);
      Names rn = g.reduced_names;
      const json forms = f.value("closed_forms", json::object());
      for (const auto& [k, v] : forms.items()) {
        Var var = parse_var(k, rn);
        if (var.kind != VarKind::Jet) throw InputError("closed form must name a reduced jet: " + k);
        fr.closed_forms[var] = parse_expr(text_of(v), rn);
      }
      c.frame = std::move(fr);
    }
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("catalog entry: ") + e.what());
  }
}

CatalogEntry load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return load_entry(j);
}

CatalogEntry load_catalog(const std::string& id) {
  fs::path p = fs::path(catalog_dir()) / (id + ".json");
  if (!fs::exists(p)) throw InputError("unknown catalog entry: " + id);
  return load_file(p.string());
}

}  // namespace ijets
