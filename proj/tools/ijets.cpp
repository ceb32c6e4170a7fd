// ijets command-line front end.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ijets/catalog.hpp"
#include "ijets/chains.hpp"
#include "ijets/goldens.hpp"

using namespace ijets;
using nlohmann::json;

namespace {

struct Options {
  std::string catalog, spec, target, cross_section, format, out, growth;
  int order = -1;
  std::uint64_t seed = 0;
  double span = 0.1, step = 1e-3;
};

CatalogEntry entry_of(const Options& o) {
  if (o.catalog.empty() == o.spec.empty()) throw InputError("give exactly one of --catalog and --spec");
  CatalogEntry c = o.catalog.empty() ? load_file(o.spec) : load_catalog(o.catalog);
  if (!o.cross_section.empty()) {
    std::ifstream in(o.cross_section);
    if (!in) throw InputError("cannot open " + o.cross_section);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(o.cross_section + ": " + e.what());
    }
    c.cross_section = cross_section_from_json(j, c.p, c.q, c.group.reduced_names);
    if (j.contains("nf")) c.nf = j["nf"];
  }
  return c;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

SectionJet target_of(const Options& o, const CatalogEntry& c, int N) {
  if (!o.target.empty()) return c.target_from_json(read_json(o.target), N);
  if (c.raw.contains("target")) return c.target_from_json(c.raw["target"], N);
  return c.target(N, o.seed);
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InputError("cannot write " + o.out);
  f << text;
}

std::string join(const std::vector<int>& v, std::size_t from = 1) {
  std::ostringstream s;
  for (std::size_t i = from; i < v.size(); ++i) s << (i > from ? " " : "") << v[i];
  return s.str();
}

json tail(const std::vector<int>& v) { return json(std::vector<int>(v.begin() + 1, v.end())); }

std::string fmt(long double x) {
  std::ostringstream s;
  s << std::setprecision(17) << static_cast<double>(x);
  return s.str();
}

int cmd_involutivity(const Options& o) {
  auto c = entry_of(o);
  int n = o.order >= 0 ? o.order : c.group.nstar;
  auto v = involutivity(c.group.system, n, o.seed);
  std::ostringstream s;
  if (o.format == "json") {
    json j{{"order", n},         {"indices", tail(v.report.beta)},       {"characters", tail(v.report.alpha)},
           {"weighted_beta", v.weighted_beta}, {"prolonged_rank", v.prolonged_rank},
           {"symbol_involutive", v.symbol_involutive}, {"integrability_conditions", v.conditions.size()},
           {"involutive", v.involutive}};
    s << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    s << "class,index,character\n";
    for (std::size_t k = 1; k < v.report.beta.size(); ++k) s << k << "," << v.report.beta[k] << "," << v.report.alpha[k] << "\n";
  } else {
    s << "indices " << join(v.report.beta) << "; characters " << join(v.report.alpha)
      << "; involutive: " << (v.involutive ? "yes" : "no") << "\n";
    if (!v.involutive) {
      s << "weighted indices " << v.weighted_beta << " vs prolonged rank " << v.prolonged_rank;
      if (!v.conditions.empty()) s << "; " << v.conditions.size() << " integrability condition(s)";
      s << "\n";
    }
  }
  emit(o, s.str());
  return v.involutive ? 0 : 1;
}

int cmd_reduce(const Options& o) {
  auto c = entry_of(o);
  if (c.plain) throw InputError("reduce needs a pseudo-group entry");
  int n = o.order >= 0 ? o.order : c.group.nstar;
  JetPoint sec = c.section(o.seed);
  auto img = reduced_image(c.group, sec, n);
  auto rc = reducibility_check(c.group, sec, 1, std::max(n, 1) + 3);
  const auto& nm = c.group.reduced_names;
  std::vector<std::string> params;
  for (const auto& p : img.parametric) params.push_back(nm.var(jet_var(p.dep, p.index)));
  std::ostringstream s;
  if (o.format == "json") {
    json j{{"order", n}, {"indices", tail(img.beta)}, {"characters", tail(img.alpha)},
           {"prolonged_rank", img.actual_rank}, {"involutive", img.involutive}, {"dims", img.cumulative},
           {"parametric", params}, {"reducibility", {{"orders", rc.orders}, {"d", rc.d}, {"dbar", rc.dbar}}}};
    j["reducibility"]["natural_order"] = rc.natural_order ? json(*rc.natural_order) : json(nullptr);
    try {
      auto red = reduce(c.group, sec, n);
      json eqs = json::array();
      for (const auto& e : red.system.equations()) eqs.push_back({nm.var(e.lhs), to_string(e.rhs, nm)});
      j["equations"] = eqs;
    } catch (const MathError& e) {
      j["equations_error"] = e.what();
    }
    s << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    s << "order,d,dbar\n";
    for (std::size_t k = 0; k < rc.orders.size(); ++k) s << rc.orders[k] << "," << rc.d[k] << "," << rc.dbar[k] << "\n";
  } else {
    s << "reduced indices " << join(img.beta) << "; characters " << join(img.alpha) << "; weighted "
      << img.weighted_beta() << " vs rank " << img.actual_rank << "; involutive: " << (img.involutive ? "yes" : "no")
      << "\n";
    s << "parametric:";
    for (const auto& p : params) s << " " << p;
    s << "\n";
    for (std::size_t k = 0; k < rc.orders.size(); ++k)
      s << "order " << rc.orders[k] << ": d " << rc.d[k] << ", reduced d " << rc.dbar[k] << "\n";
    s << "reducible: " << (rc.reducible() ? "yes, from order " + std::to_string(*rc.natural_order) : "no") << "\n";
    try {
      auto red = reduce(c.group, sec, n);
      for (const auto& e : red.system.equations()) s << nm.var(e.lhs) << " = " << to_string(e.rhs, nm) << "\n";
    } catch (const MathError& e) {
      s << "no symbolic reduced system: " << e.what() << "\n";
    }
  }
  emit(o, s.str());
  return 0;
}

void require_frame(const CatalogEntry& c) {
  if (!c.cross_section || !c.frame) throw InputError("entry " + c.id + " has no cross-section and frame");
}

std::string growth_csv(const NormalFormSeries& nf) {
  std::ostringstream s;
  s << "dep,order,max_abs_jet,max_abs_taylor,root\n";
  for (int a = 1; a <= nf.q; ++a)
    for (int k = 1; k <= nf.order; ++k) {
      long double jet = 0, taylor = 0;
      for (const auto& slot : nf.slots) {
        if (slot.dep != a || slot.index.order() != k) continue;
        long double v = nf.exact ? slot.value.get_d() : slot.approx;
        long double f = 1;
        for (int e : slot.index.exponents(nf.p)) f *= static_cast<long double>(factorial(e).get_d());
        jet = std::max(jet, std::fabs(v));
        taylor = std::max(taylor, std::fabs(v) / f);
      }
      s << a << "," << k << "," << fmt(jet) << "," << fmt(taylor) << "," << fmt(std::pow(taylor, 1.0L / k)) << "\n";
    }
  return s.str();
}

int cmd_normal_form(const Options& o) {
  auto c = entry_of(o);
  require_frame(c);
  int N = o.order >= 0 ? o.order : 6;
  auto tgt = target_of(o, c, N);
  auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, N);
  const auto& nm = c.group.reduced_names;
  if (o.format == "csv") {
    emit(o, nf.to_csv(nm));
  } else if (o.format == "json") {
    emit(o, nf.to_json(nm).dump(2) + "\n");
  } else {
    std::ostringstream s;
    s << "normal form through order " << N << (nf.exact ? " (exact)" : " (quad precision)") << "\n";
    for (const auto& slot : nf.slots)
      s << nm.var(sec_var(slot.dep, slot.index)) << " = " << (nf.exact ? q_str(slot.value) : fmt(slot.approx))
        << (slot.phantom ? "  [phantom]" : "") << "\n";
    emit(o, s.str());
  }
  if (!o.growth.empty()) {
    std::ofstream g(o.growth);
    if (!g) throw InputError("cannot write " + o.growth);
    g << growth_csv(nf);
  }
  return 0;
}

int cmd_frame(const Options& o) {
  auto c = entry_of(o);
  require_frame(c);
  int N = o.order >= 0 ? o.order : c.nf;
  auto tgt = target_of(o, c, N);
  auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, N);
  const auto& gn = c.group.system.space.names;
  const auto& rn = c.group.reduced_names;
  std::ostringstream s;
  if (o.format == "json") {
    json j{{"exact", fs.exact}, {"order", fs.order}};
    json params = json::object(), reduced = json::object();
    if (fs.exact) {
      for (const auto& [v, q] : fs.params) params[gn.var(v)] = q_str(q);
      for (const auto& [v, q] : fs.reduced) reduced[rn.var(v)] = q_str(q);
    } else {
      for (const auto& [v, x] : fs.approx) params[gn.var(v)] = static_cast<double>(x);
    }
    j["group_jets"] = params;
    j["reduced_jets"] = reduced;
    s << j.dump(2) << "\n";
  } else {
    const char* sep = o.format == "csv" ? "," : " = ";
    if (o.format == "csv") s << "jet,value\n";
    if (fs.exact) {
      for (const auto& [v, q] : fs.reduced) s << rn.var(v) << sep << q_str(q) << "\n";
      for (const auto& [v, q] : fs.params)
        if (v.order() > c.nf) s << gn.var(v) << sep << q_str(q) << "\n";
    } else {
      for (const auto& [v, x] : fs.approx) s << gn.var(v) << sep << fmt(x) << "\n";
    }
  }
  emit(o, s.str());
  return 0;
}

std::string trajectory_csv(const Trajectory& t, const std::vector<std::string>& cols) {
  std::ostringstream s;
  s << "x";
  for (const auto& n : cols) s << "," << n;
  s << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.x.size(); ++k) {
    s << t.x[k];
    for (double y : t.y[k]) s << "," << y;
    s << "\n";
  }
  return s.str();
}

int cmd_chain(const Options& o) {
  auto c = entry_of(o);
  std::string kind = c.raw.contains("chain") ? c.raw["chain"].value("kind", "") : "";
  int N = o.order >= 0 ? o.order : 8;
  auto tgt = target_of(o, c, N);
  Surface u = Surface::from_section(tgt);
  std::vector<double> base;
  for (const auto& b : tgt.base) base.push_back(b.get_d());
  std::ostringstream s;
  int status = 0;
  if (kind == "separable") {
    auto t = separable_chain(u, base.at(0), base.at(1), o.span, o.step);
    if (o.format == "csv")
      s << trajectory_csv(t, {"X"});
    else if (o.format == "json")
      s << json{{"x", t.x}, {"X", t.y}}.dump(2) << "\n";
    else
      s << "chain through (" << base[0] << ", " << base[1] << "): X(" << o.span << ") = " << std::setprecision(17)
        << t.y.back()[0] << "\n";
  } else if (kind == "running") {
    require_frame(c);
    RunningChain ch;
    auto t = rk4(ch.rhs(u), ch.initial(u, base.at(0), base.at(1)), 0, o.span, o.step);
    auto r = revalidate_running_chain(c.group, *c.frame, *c.cross_section, tgt, N, o.span, o.step);
    status = r.max() < 1e-6 ? 0 : 1;
    if (o.format == "csv") {
      s << trajectory_csv(t, {"X", "X_x", "Y"});
    } else if (o.format == "json") {
      s << json{{"x", t.x}, {"state", t.y},
                {"deviation",
                 {{"trajectory", r.trajectory}, {"curvature", r.curvature}, {"phantom_u", r.phantom_u},
                  {"phantom_u_y", r.phantom_uy}}}}
                  .dump(2)
        << "\n";
    } else {
      s << std::setprecision(3) << "revalidation over [0, " << o.span << "]: trajectory " << r.trajectory
        << ", invariants " << r.curvature << ", phantom u " << r.phantom_u << ", phantom u_y " << r.phantom_uy << "\n";
    }
  } else {
    throw InputError("entry " + c.id + " has no chain equations");
  }
  emit(o, s.str());
  return status;
}

int cmd_goldens(const Options& o) {
  std::vector<GoldenResult> res;
  if (!o.catalog.empty() || !o.spec.empty())
    res = run_goldens(entry_of(o), o.seed);
  else
    res = run_all_goldens(o.seed);
  int fails = 0;
  std::ostringstream s;
  if (o.format == "json") {
    json j = json::array();
    for (const auto& r : res) j.push_back({{"entry", r.entry}, {"check", r.check}, {"ok", r.ok}, {"detail", r.detail}});
    s << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    s << "entry,check,ok,detail\n";
    for (const auto& r : res) s << r.entry << "," << r.check << "," << (r.ok ? 1 : 0) << ",\"" << r.detail << "\"\n";
  } else {
    for (const auto& r : res) s << (r.ok ? "PASS " : "FAIL ") << r.entry << " " << r.check << ": " << r.detail << "\n";
  }
  for (const auto& r : res) fails += !r.ok;
  if (o.format == "text") s << res.size() - fails << "/" << res.size() << " golden checks pass\n";
  emit(o, s.str());
  return fails ? 1 : 0;
}

int cmd_probe(const Options& o) {
  auto c = entry_of(o);
  int n = o.order >= 0 ? o.order : c.group.nstar;
  auto r = delta_regularity_probe(c.group.system, n, 20, o.seed);
  std::ostringstream s;
  if (o.format == "json") {
    json w = json::array();
    for (const auto& row : r.witness) {
      json jr = json::array();
      for (const auto& x : row) jr.push_back(q_str(x));
      w.push_back(jr);
    }
    s << json{{"order", n}, {"weighted_beta", r.original}, {"best", r.best}, {"irregular", r.irregular}, {"witness", w}}
             .dump(2)
      << "\n";
  } else {
    s << "weighted indices " << r.original << ", best after a linear change " << r.best << "; coordinates "
      << (r.irregular ? "not delta-regular" : "look delta-regular") << "\n";
  }
  emit(o, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ijets: involutive jets, reduction and normal forms"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--catalog", o.catalog, "catalog entry id");
    sub->add_option("--spec", o.spec, "entry JSON file");
    sub->add_option("--order", o.order, "order");
    sub->add_option("--target", o.target, "target section JSON");
    sub->add_option("--cross-section", o.cross_section, "cross-section JSON");
    sub->add_option("--seed", o.seed, "seed for sample points")->capture_default_str();
    sub->add_option("--format", o.format, "output format (default: from --out, else text)")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", o.out, "output file");
  };
  std::map<std::string, std::function<int(const Options&)>> cmds{
      {"involutivity", cmd_involutivity}, {"reduce", cmd_reduce}, {"normal-form", cmd_normal_form},
      {"frame", cmd_frame},               {"chain", cmd_chain},   {"goldens", cmd_goldens},
      {"probe-delta", cmd_probe}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, f] : cmds) {
    auto* sub = app.add_subcommand(name);
    common(sub);
    subs[name] = sub;
  }
  subs["normal-form"]->add_option("--growth", o.growth, "write the coefficient-growth CSV here");
  subs["chain"]->add_option("--span", o.span, "integrate over [0, span]")->capture_default_str();
  subs["chain"]->add_option("--step", o.step, "RK4 step")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (o.format.empty()) {
    auto ends = [&](const std::string& ext) {
      return o.out.size() >= ext.size() && o.out.compare(o.out.size() - ext.size(), ext.size(), ext) == 0;
    };
    o.format = ends(".csv") ? "csv" : ends(".json") ? "json" : "text";
  }
  try {
    for (const auto& [name, sub] : subs)
      if (*sub) return cmds.at(name)(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const MathError& e) {
    std::cerr << "mathematical failure: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
