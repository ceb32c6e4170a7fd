#include "ijets/goldens.hpp"

#include <functional>
#include <sstream>

namespace ijets {

namespace {

using nlohmann::json;

std::string join(const std::vector<int>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
  return s.str();
}

// drop the unused class-0 slot
std::vector<int> by_class(const std::vector<int>& v) { return {v.begin() + 1, v.end()}; }

struct Symbolic {
  std::vector<int> beta, alpha;
  int rank = 0;
  bool involutive = false;
};

std::pair<bool, std::string> compare(const json& want, const Symbolic& got) {
  bool ok = true;
  if (want.contains("beta")) ok = ok && want["beta"].get<std::vector<int>>() == got.beta;
  if (want.contains("alpha")) ok = ok && want["alpha"].get<std::vector<int>>() == got.alpha;
  if (want.contains("rank")) ok = ok && want["rank"].get<int>() == got.rank;
  if (want.contains("involutive")) ok = ok && want["involutive"].get<bool>() == got.involutive;
  std::ostringstream d;
  d << "beta " << join(got.beta) << "; alpha " << join(got.alpha) << "; rank " << got.rank
    << "; involutive " << (got.involutive ? "yes" : "no");
  return {ok, d.str()};
}

Symbolic from_verdict(const InvolutivityVerdict& v) {
  return {by_class(v.report.beta), by_class(v.report.alpha), v.prolonged_rank, v.involutive};
}

}  // namespace

std::vector<GoldenResult> run_goldens(const CatalogEntry& c, std::uint64_t seed) {
  std::vector<GoldenResult> out;
  if (!c.raw.contains("golden")) return out;
  const json g = c.raw["golden"];
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    GoldenResult r{c.id, name, false, ""};
    try {
      std::tie(r.ok, r.detail) = f();
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    out.push_back(std::move(r));
  };
  JetPoint sec = c.section(seed);

  if (g.contains("group"))
    run("group", [&] { return compare(g["group"], from_verdict(involutivity(c.group.system, g["group"]["order"], seed))); });
  if (g.contains("dims"))
    run("dims", [&] {
      std::vector<int> got;
      for (int n : g["dims"]["orders"].get<std::vector<int>>()) got.push_back(c.group.dim(n));
      return std::make_pair(got == g["dims"]["d"].get<std::vector<int>>(), "d " + join(got));
    });
  if (g.contains("reduced"))
    for (const auto& w : g["reduced"]) {
      int n = w["order"];
      run("reduced order " + std::to_string(n), [&] {
        auto img = reduced_image(c.group, sec, n);
        return compare(w, {by_class(img.beta), by_class(img.alpha), img.actual_rank, img.involutive});
      });
    }
  if (g.contains("nf_system"))
    run("nf system", [&] {
      int n = g["nf_system"]["order"];
      auto nf = build_nf_system(c.group, reduce(c.group, sec, n), sec);
      return compare(g["nf_system"], from_verdict(involutivity(nf.system, n, seed)));
    });
  if (g.contains("reducibility"))
    run("reducibility", [&] {
      const json& w = g["reducibility"];
      auto r = reducibility_check(c.group, sec, w["lo"], w["hi"]);
      bool ok = true;
      if (w.contains("d")) ok = ok && w["d"].get<std::vector<int>>() == r.d;
      if (w.contains("dbar")) ok = ok && w["dbar"].get<std::vector<int>>() == r.dbar;
      if (w.contains("reducible")) ok = ok && w["reducible"].get<bool>() == r.reducible();
      if (w.contains("natural_order"))
        ok = ok && (w["natural_order"].is_null() ? !r.natural_order : r.natural_order == w["natural_order"].get<int>());
      return std::make_pair(ok, "d " + join(r.d) + "; dbar " + join(r.dbar) + "; reducible " +
                                    (r.reducible() ? "from " + std::to_string(*r.natural_order) : "no"));
    });
  if (g.contains("characters"))
    run("characters", [&] {
      auto cc = reduced_character_check(c.group, sec, g["characters"]["order"], seed);
      return std::make_pair(cc.ok == g["characters"]["ok"].get<bool>(), cc.ok ? "ok" : "fails: " + cc.reason);
    });
  if (g.contains("freeness"))
    run("freeness", [&] {
      auto n = freeness_order(c.group, sec, g["freeness"]["max"]);
      return std::make_pair(n && *n == g["freeness"]["order"].get<int>(), n ? std::to_string(*n) : "not free");
    });
  if (g.contains("wellposed"))
    run("wellposed", [&] {
      if (!c.cross_section) throw InputError("entry has no cross-section");
      auto w = wellposed_check(c.group, *c.cross_section, c.nf, 5, seed);
      std::vector<std::string> gens;
      for (const auto& x : w.generators) gens.push_back(x.index.str(c.group.reduced_names.base));
      std::string d = w.ok() ? "ok;" : "fails: " + w.reason + ";";
      for (const auto& s : gens) d += " " + s;
      return std::make_pair(w.ok() && gens == g["wellposed"]["generators"].get<std::vector<std::string>>(), d);
    });
  if (g.contains("probe"))
    run("probe", [&] {
      auto r = delta_regularity_probe(c.group.system, g["probe"]["order"], 20, seed);
      return std::make_pair(r.irregular == g["probe"]["irregular"].get<bool>(),
                            "weighted beta " + std::to_string(r.original) + " vs best " + std::to_string(r.best));
    });
  return out;
}

std::vector<GoldenResult> run_all_goldens(std::uint64_t seed) {
  std::vector<GoldenResult> out;
  for (const auto& id : catalog_ids()) {
    auto r = run_goldens(load_catalog(id), seed);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace ijets
