#include <cstdlib>

#include "doctest.h"
#include "ijets/catalog.hpp"
#include "ijets/goldens.hpp"

using namespace ijets;

TEST_CASE("every entry loads and its system vanishes at the identity") {
  auto ids = catalog_ids();
  CHECK(ids.size() >= 16);
  for (const auto& id : ids) {
    auto c = load_catalog(id);
    CHECK(c.id == id);
    if (c.plain) continue;
    JetPoint pt(4);
    // Z^a = z^a, Z^a_i = delta, higher jets zero
    auto identity = [&](const Var& x) -> Q {
      if (x.kind != VarKind::Jet) return pt(x);
      if (x.order() == 0) return pt(base_var(x.dep));
      if (x.order() == 1) return x.idx.entries()[0] == x.dep ? 1 : 0;
      return 0;
    };
    for (const auto& e : c.group.system.equations()) {
      Q v = eval<Q>(e.residual(), identity);
      CHECK_MESSAGE(v == 0, id);
    }
  }
}

TEST_CASE("sampled group elements satisfy the determining equations") {
  for (const auto& id : catalog_ids()) {
    auto c = load_catalog(id);
    if (!c.law) continue;
    auto maps = c.random_element(5, 3);
    JetPoint pt(11);
    // Z^a_B evaluated by differentiating the explicit maps
    auto value = [&](const Var& v) -> Q {
      if (v.kind != VarKind::Jet) return pt(v);
      Expr e = maps.at(v.dep - 1);
      for (int i : v.idx.entries()) e = partial(e, base_var(i));
      return pt.eval(e);
    };
    for (const auto& e : c.group.system.equations()) {
      if (e.lhs.order() > 3) continue;
      CHECK_MESSAGE(eval<Q>(e.residual(), value) == 0, (id + " " + c.group.system.space.names.var(e.lhs)));
    }
  }
}

TEST_CASE("unknown entries and bad files are input errors") {
  CHECK_THROWS_AS(load_catalog("no-such-entry"), InputError);
  CHECK_THROWS_AS(load_file("/nonexistent/x.json"), InputError);
  CHECK_THROWS_AS(load_entry(nlohmann::json{{"id", "broken"}}), InputError);
}

TEST_CASE("catalog directory override") {
  const char* old = std::getenv("IJETS_CATALOG_DIR");
  setenv("IJETS_CATALOG_DIR", "/nonexistent-dir", 1);
  CHECK(catalog_dir() == "/nonexistent-dir");
  CHECK_THROWS_AS(load_catalog("running"), InputError);
  if (old)
    setenv("IJETS_CATALOG_DIR", old, 1);
  else
    unsetenv("IJETS_CATALOG_DIR");
  CHECK_NOTHROW(load_catalog("running"));
}

TEST_CASE("golden blocks of single entries") {
  for (const char* id : {"running", "ex4", "ex15", "cm-complex"}) {
    auto res = run_goldens(load_catalog(id), 0);
    CHECK_FALSE(res.empty());
    for (const auto& r : res) CHECK_MESSAGE(r.ok, (r.entry + " " + r.check + ": " + r.detail));
  }
}

TEST_CASE("target from a polynomial") {
  auto c = load_catalog("running");
  auto t = c.target_from_json(nlohmann::json{{"base", {"1", "0"}}, {"polynomial", {"x^2*y + 3"}}}, 3);
  CHECK(t.value(1, {}) == 3);
  CHECK(t.value(1, {2}) == 1);
  CHECK(t.value(1, {1, 2}) == 2);
  CHECK(t.value(1, {1, 1, 2}) == 2);
  CHECK_THROWS_AS(c.target_from_json(nlohmann::json{{"base", {"0"}}, {"polynomial", {"x"}}}, 3), InputError);
}
