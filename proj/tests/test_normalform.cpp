#include "doctest.h"
#include "ijets/catalog.hpp"

using namespace ijets;

TEST_CASE("running example: freeness and compatibility") {
  auto c = load_catalog("running");
  auto sec = c.section(0);
  auto n = freeness_order(c.group, sec, 4);
  REQUIRE(n.has_value());
  CHECK(*n == 2);
  auto r = compatibility_check(c.group, sec, 2, 5);
  CHECK_FALSE(r.equal[0]);
  for (std::size_t k = 1; k < r.orders.size(); ++k) CHECK(r.equal[k]);
  CHECK_FALSE(r.psi_in_upsilon[0]);  // Υ^2 is empty
  for (std::size_t k = 1; k < r.orders.size(); ++k) CHECK(r.psi_in_upsilon[k]);
}

TEST_CASE("cross-section membership and counts") {
  auto c = load_catalog("running");
  const auto& cs = *c.cross_section;
  CHECK(cs.contains(1, MultiIndex{}));
  CHECK(cs.contains(1, MultiIndex{1, 1, 1}));
  CHECK(cs.contains(1, MultiIndex{1, 1, 2}));
  CHECK(cs.contains(1, MultiIndex{2, 2}));
  CHECK_FALSE(cs.contains(1, MultiIndex{1, 2, 2}));
  CHECK(cs.value(1, MultiIndex{2, 2}) == 1);
  // base point (2) + u, u_x, u_y, u_xx, u_xy, u_yy
  CHECK(cs.count_upto(2) == 8);
  CHECK(cs.count_upto(2) == c.group.dim(2));
  auto back = cross_section_from_json(cross_section_to_json(cs), 2, 1, c.group.reduced_names);
  for (int k = 0; k <= 4; ++k) CHECK(back.indices(k) == cs.indices(k));
}

TEST_CASE("normal form of a target already in normal form") {
  auto c = load_catalog("running");
  QSeries s(2, 5);
  s.set({0, 2}, Q(1, 2));
  s.set({1, 2}, Q(1, 3));
  s.set({0, 3}, Q(-1, 6));
  auto tgt = SectionJet::from_series({0, 0}, {s});
  auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, 5);
  REQUIRE(nf.exact);
  for (const auto& slot : nf.slots) CHECK(slot.value == tgt.value(1, slot.index));
  CHECK(fs.reduced.at(jet_var(1, {1})) == 1);
}

TEST_CASE("phantom values follow the cross-section") {
  auto c = load_catalog("pg12");
  auto tgt = c.target(4, 2);
  auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, 4);
  for (const auto& slot : nf.slots)
    if (slot.phantom) CHECK(slot.value == c.cross_section->value(1, slot.index));
  CHECK(nf.find(1, MultiIndex{1})->value == 1);
}

TEST_CASE("CSV rows") {
  auto c = load_catalog("running");
  auto tgt = c.target(3, 0);
  auto [fs, nf] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, 3);
  std::string csv = nf.to_csv(c.group.reduced_names);
  CHECK(csv.rfind("dep,index,kind,value\n", 0) == 0);
  CHECK(csv.find("u,-,phantom,0") != std::string::npos);
  CHECK(csv.find("u,yy,phantom,1") != std::string::npos);
  CHECK(csv.find("u,yyy,invariant,") != std::string::npos);
}

TEST_CASE("well-posedness fails for a cross-section missing a family") {
  auto c = load_catalog("running");
  CrossSection cs = *c.cross_section;
  cs.families.pop_back();
  auto w = wellposed_check(c.group, cs, c.nf, 3, 0);
  CHECK_FALSE(w.ok());
}

TEST_CASE("a transformed target has the same invariants") {
  auto c = load_catalog("ex13");
  auto tgt = c.target(5, 3);
  auto [f1, n1] = solve_frame(c.group, *c.frame, *c.cross_section, tgt, 5);
  auto moved = apply_transformation(c.p, c.q, c.random_element(9), tgt, 5);
  auto [f2, n2] = solve_frame(c.group, *c.frame, *c.cross_section, moved, 5);
  REQUIRE(n1.slots.size() == n2.slots.size());
  for (std::size_t k = 0; k < n1.slots.size(); ++k) CHECK(n1.slots[k].value == n2.slots[k].value);
}
