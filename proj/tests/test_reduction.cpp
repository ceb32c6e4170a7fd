#include "doctest.h"
#include "ijets/catalog.hpp"
#include "ijets/parser.hpp"

using namespace ijets;

namespace {

Expr rhs_of(const ReducedSystem& r, const std::string& lhs) {
  const auto* e = r.system.find(parse_var(lhs, r.system.space.names));
  REQUIRE_MESSAGE(e != nullptr, lhs);
  return e->rhs;
}

bool same_value(const Expr& a, const std::string& b, const Names& names) {
  RationalSampler rng(11);
  return semantically_equal(a, parse_expr(b, names), rng, 5);
}

}  // namespace

TEST_CASE("running example: group system involutive at order two") {
  auto c = load_catalog("running");
  auto v = involutivity(c.group.system, 2, 0);
  CHECK(v.report.beta == std::vector<int>{0, 7, 6, 3});
  CHECK(v.report.alpha == std::vector<int>{0, 2, 0, 0});
  CHECK(v.prolonged_rank == 28);
  CHECK(v.involutive);
  for (int n = 0; n <= 5; ++n) CHECK(c.group.dim(n) == (n == 0 ? 3 : 2 * n + 4));
}

TEST_CASE("running example: reduced image") {
  auto c = load_catalog("running");
  auto sec = c.section(0);
  auto img = reduced_image(c.group, sec, 2);
  CHECK(img.beta == std::vector<int>{0, 4, 3});
  CHECK(img.alpha == std::vector<int>{0, 2, 0});
  CHECK(img.actual_rank == 10);
  CHECK(img.prolonged_rank == 10);
  CHECK(img.involutive);
  CHECK(img.cumulative == std::vector<int>{3, 6, 8});
  auto r = reducibility_check(c.group, sec, 1, 6);
  for (std::size_t k = 0; k < r.orders.size(); ++k) CHECK(r.dbar[k] == 2 * r.orders[k] + 4);
  REQUIRE(r.natural_order.has_value());
  CHECK(*r.natural_order == 1);
  auto cc = reduced_character_check(c.group, sec, 2);
  CHECK(cc.ok);
}

TEST_CASE("running example: symbolic reduction") {
  auto c = load_catalog("running");
  auto sec = c.section(0);
  auto r = reduce(c.group, sec, 3);
  const auto& nm = r.system.space.names;
  CHECK(is_zero(rhs_of(r, "X_y")));
  CHECK(same_value(rhs_of(r, "Y_x"), "(U - u)*X_x", nm));
  CHECK(same_value(rhs_of(r, "Y_y"), "X_x", nm));
  CHECK(same_value(rhs_of(r, "X_xx"), "(U_y - u_y)*X_x", nm));
  CHECK(same_value(rhs_of(r, "Y_xx"), "(U_x - u_x + (U - u)*(U_y - u_y))*X_x", nm));
  CHECK(same_value(rhs_of(r, "Y_xy"), "(U_y - u_y)*X_x", nm));
  CHECK(same_value(rhs_of(r, "U_yy"), "u_yy", nm));
  CHECK(same_value(rhs_of(r, "X_xxx"), "((U_y - u_y)^2 + U_xy - u_xy)*X_x", nm));
  CHECK(same_value(rhs_of(r, "Y_xxy"), "(U_xy - u_xy + (U_y - u_y)^2)*X_x", nm));
  CHECK(same_value(rhs_of(r, "U_xyy"), "u_xyy", nm));
  CHECK(same_value(rhs_of(r, "U_yyy"), "u_yyy", nm));
  std::vector<std::string> params;
  for (const auto& v : r.parametric) params.push_back(nm.var(v));
  CHECK(params == std::vector<std::string>{"X", "Y", "U", "X_x", "U_x", "U_y", "U_xx", "U_xy", "U_xxx", "U_xxy"});
  // reduced identity annihilates every equation
  for (const auto& e : r.system.equations()) {
    auto val = eval<Q>(e.residual(), [&](const Var& v) {
      return v.kind == VarKind::Jet ? reduced_identity_value(c.group, v, sec) : sec(v);
    });
    CHECK(val == 0);
  }
}

TEST_CASE("ex4: reduced system involutive only at order three") {
  auto c = load_catalog("ex4");
  auto sec = c.section(0);
  auto two = reduced_image(c.group, sec, 2);
  CHECK(two.beta == std::vector<int>{0, 4, 2});
  CHECK(two.weighted_beta() == 8);
  CHECK(two.actual_rank == 9);
  CHECK_FALSE(two.involutive);
  auto three = reduced_image(c.group, sec, 3);
  CHECK(three.beta == std::vector<int>{0, 6, 3});
  CHECK(three.alpha == std::vector<int>{0, 3, 0});
  CHECK(three.actual_rank == 12);
  CHECK(three.involutive);
  auto r = reduce(c.group, sec, 3);
  CHECK(same_value(rhs_of(r, "U_yyy"), "u_yyy/u_yy*U_yy", r.system.space.names));
}

TEST_CASE("ex5: order of reducibility two") {
  auto c = load_catalog("ex5");
  auto sec = c.section(0);
  auto r = reducibility_check(c.group, sec, 1, 5);
  CHECK(r.dbar[0] == 4);
  for (std::size_t k = 1; k < r.dbar.size(); ++k) CHECK(r.dbar[k] == 5);
  for (int d : r.d) CHECK(d == 5);
  REQUIRE(r.natural_order.has_value());
  CHECK(*r.natural_order == 2);
  auto red = reduce(c.group, sec, 3);
  CHECK(same_value(rhs_of(red, "U_xxx"), "u_xxx/u_xx*U_xx", red.system.space.names));
  CHECK(is_zero(rhs_of(red, "X_xx")));
}

TEST_CASE("ex99: characters agree but the group is not reducible") {
  auto c = load_catalog("ex99");
  auto sec = c.section(0);
  auto r = reducibility_check(c.group, sec, 1, 6);
  for (std::size_t k = 0; k < r.orders.size(); ++k) {
    CHECK(r.d[k] == r.orders[k] + 3);
    CHECK(r.dbar[k] == r.orders[k] + 2);
  }
  CHECK_FALSE(r.reducible());
  CHECK(reduced_character_check(c.group, sec, 2).ok);
}

TEST_CASE("xfxu: function of two variables") {
  auto c = load_catalog("xfxu");
  auto sec = c.section(0);
  auto cc = reduced_character_check(c.group, sec, 1);
  CHECK_FALSE(cc.ok);
  auto r = reducibility_check(c.group, sec, 1, 5);
  CHECK_FALSE(r.reducible());
  for (std::size_t k = 0; k < r.orders.size(); ++k) {
    int n = r.orders[k];
    CHECK(r.d[k] == (n + 2) * (n + 1) / 2 + 0 * n);
    CHECK(r.dbar[k] == n + 1);
  }
}

TEST_CASE("redfree examples") {
  auto pg1 = load_catalog("redfree-pg1");
  CHECK_FALSE(reducibility_check(pg1.group, pg1.section(0), 1, 5).reducible());
  auto pg2 = load_catalog("redfree-pg2");
  CHECK_FALSE(reducibility_check(pg2.group, pg2.section(0), 1, 5).reducible());
  auto pg3 = load_catalog("redfree-pg3");
  CHECK(reducibility_check(pg3.group, pg3.section(0), 1, 5).reducible());
}
