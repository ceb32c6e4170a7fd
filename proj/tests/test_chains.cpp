#include <cmath>

#include "doctest.h"
#include "ijets/catalog.hpp"
#include "ijets/chains.hpp"

using namespace ijets;

namespace {

Surface surface(const std::string& poly, std::vector<Q> base = {0, 0}) {
  auto c = load_catalog("running");
  nlohmann::json j{{"base", {q_str(base[0]), q_str(base[1])}}, {"polynomial", {poly}}};
  return Surface::from_section(c.target_from_json(j, 4));
}

}  // namespace

TEST_CASE("surface evaluation and derivatives") {
  auto u = surface("1 + x*y + y^2/2", {1, 2});
  CHECK(u({0, 0}) == doctest::Approx(1.0));
  CHECK(u({1, 2}) == doctest::Approx(5.0));
  CHECK(u({1, 2}, MultiIndex{2}) == doctest::Approx(3.0));
  CHECK(u({1, 2}, MultiIndex{2, 2}) == doctest::Approx(1.0));
  CHECK(u({1, 2}, MultiIndex{1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("constant surface gives a linear separable chain") {
  auto u = surface("2");
  auto t = separable_chain(u, 0.25, 0, 1.0, 0.1);
  for (std::size_t k = 0; k < t.x.size(); ++k) CHECK(t.y[k][0] == doctest::Approx(0.25 + t.x[k] / 2).epsilon(1e-14));
  CHECK(t.x.back() == doctest::Approx(1.0));
}

TEST_CASE("running chain right hand side") {
  auto u = surface("y^2/2 + 1");
  RunningChain ch;
  auto d = ch.rhs(u)(0, {0, 1, 0});
  CHECK(d[0] == 1);
  CHECK(d[1] == 0);
  CHECK(d[2] == 1);
  auto s0 = ch.initial(surface("2*y^2"), 0, 0);
  CHECK(s0[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(ch.initial(surface("x"), 0, 0), MathError);
}

TEST_CASE("rk4 is fourth order on y' = y") {
  OdeRhs f = [](double, const OdeState& y) { return y; };
  double p = rk4_empirical_order(f, {1}, 0, 1, 0.1, [](double x) { return std::exp(x); });
  CHECK(p > 3.8);
  CHECK(p < 4.2);
  CHECK_THROWS_AS(rk4(f, {1}, 0, 1, 0), InputError);
}

TEST_CASE("separable chain leaves the domain") {
  auto u = surface("x");
  CHECK_THROWS_AS(separable_chain(u, 0, 0, 0.1, 0.01), MathError);
}
