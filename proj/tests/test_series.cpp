#include "doctest.h"
#include "ijets/parser.hpp"
#include "ijets/series.hpp"

using namespace ijets;

namespace {

QSeries poly(int nvars, int order, std::initializer_list<std::pair<std::vector<int>, Q>> terms) {
  QSeries s(nvars, order);
  for (const auto& [ex, c] : terms) s.set(ex, c);
  return s;
}

QSeries random_series(RationalSampler& rng, int nvars, int order) {
  QSeries s(nvars, order);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = rng.next();
  return s;
}

}  // namespace

TEST_CASE("series products") {
  auto a = poly(1, 3, {{{0}, 1}, {{1}, 1}});
  auto b = poly(1, 3, {{{0}, 1}, {{1}, -1}});
  CHECK(a * b == poly(1, 3, {{{0}, 1}, {{2}, -1}}));
  auto h = poly(1, 3, {{{2}, Q(1, 2)}});
  CHECK(h * h == QSeries(1, 3));
  auto s = poly(2, 2, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}});
  CHECK(s * s == poly(2, 2, {{{0, 0}, 1}, {{1, 0}, 2}, {{0, 1}, 2}, {{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, 1}}));
}

TEST_CASE("series inverse") {
  CHECK(poly(1, 3, {{{0}, 1}, {{1}, -1}}).inverse() == poly(1, 3, {{{0}, 1}, {{1}, 1}, {{2}, 1}, {{3}, 1}}));
  CHECK(QSeries::constant(2, 2, 2).inverse() == QSeries::constant(2, 2, Q(1, 2)));
  auto s = poly(2, 2, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}});
  CHECK(s.inverse() == poly(2, 2, {{{0, 0}, 1}, {{1, 0}, -1}, {{0, 1}, -1}, {{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, 1}}));
  CHECK_THROWS_AS(poly(1, 2, {{{1}, 1}}).inverse(), MathError);
}

TEST_CASE("series square root") {
  CHECK(poly(1, 2, {{{0}, 1}, {{1}, 2}}).sqrt() == poly(1, 2, {{{0}, 1}, {{1}, 1}, {{2}, Q(-1, 2)}}));
  CHECK(QSeries::constant(1, 0, 4).sqrt() == QSeries::constant(1, 0, 2));
  CHECK(poly(1, 1, {{{0}, 9}, {{1}, 18}}).sqrt() == poly(1, 1, {{{0}, 3}, {{1}, 3}}));
  CHECK_THROWS_AS(QSeries::constant(1, 2, 2).sqrt(), InexactSqrt);
  CHECK_THROWS_AS(QSeries::constant(1, 2, -4).sqrt(), MathError);
}

TEST_CASE("inverse and square root round trips") {
  RationalSampler rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    int nvars = 1 + trial % 3;
    int order = trial < 6 ? 8 : 5;
    if (nvars == 3) order = 4;
    auto s = random_series(rng, nvars, order);
    auto one = QSeries::constant(nvars, order, 1);
    CHECK(s * s.inverse() == one);
    CHECK(s.inverse() * s == one);
    s[0] = Q(rng.next_positive() * rng.next_positive());
    s[0] = s[0] * s[0];  // square constant term
    auto r = s.sqrt();
    CHECK(r * r == s);
  }
}

TEST_CASE("composition and map inversion") {
  // (1+y)^2 composed with y -> y + y^2
  auto f = poly(1, 4, {{{0}, 1}, {{1}, 2}, {{2}, 1}});
  auto g = poly(1, 4, {{{1}, 1}, {{2}, 1}});
  auto h = f.compose({g});
  auto direct = (QSeries::constant(1, 4, 1) + g) * (QSeries::constant(1, 4, 1) + g);
  CHECK(h == direct);

  RationalSampler rng(3);
  std::vector<QSeries> F;
  for (int i = 0; i < 2; ++i) {
    auto s = random_series(rng, 2, 5);
    s[0] = 0;
    F.push_back(s);
  }
  auto G = invert_map(F);
  for (int i = 0; i < 2; ++i) CHECK(F[i].compose(G) == QSeries::variable(2, 5, i + 1));
}

TEST_CASE("derivative of a series") {
  auto s = poly(2, 3, {{{2, 1}, 3}, {{1, 0}, 1}});
  auto d = s.derivative(1);
  CHECK(d.order() == 2);
  CHECK(d.coeff({1, 1}) == 6);
  CHECK(d.coeff({0, 0}) == 1);
}

TEST_CASE("dual numbers carry gradients") {
  using D = Dual<Q>;
  D x = D::seed(3, 2, 0), y = D::seed(5, 2, 1);
  D f = x * x * y + RingTraits<D>::inv(y);
  CHECK(f.v == Q(45) + Q(1, 5));
  CHECK(f.d[0] == 30);
  CHECK(f.d[1] == Q(9) - Q(1, 25));
}

TEST_CASE("series json round trip") {
  auto s = poly(2, 3, {{{0, 0}, Q(1, 3)}, {{1, 2}, -2}});
  CHECK(series_from_json(series_to_json(s)) == s);
}

TEST_CASE("evaluating expressions over series") {
  Names n;
  n.base = {"x", "y"};
  auto e = parse_expr("1/(1 - x)", n);
  auto r = eval_series<Q>(e, 2, 3, [](const Var& v) { return QSeries::variable(2, 3, v.dep); });
  CHECK(r.coeff({3, 0}) == 1);
  CHECK(r.coeff({1, 1}) == 0);
}
