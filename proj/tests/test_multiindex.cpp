#include <set>

#include "doctest.h"
#include "ijets/multiindex.hpp"

using namespace ijets;

TEST_CASE("class of a multi-index") {
  CHECK(MultiIndex{3}.cls() == 3);
  CHECK(MultiIndex{2, 1, 2}.cls() == 1);
  CHECK(MultiIndex{}.cls() == 0);
  CHECK(MultiIndex{2, 1} == MultiIndex{1, 2});
}

TEST_CASE("counting formulas") {
  CHECK(count_order(3, 1, 2) == 6);
  CHECK(count_order(2, 1, 0) == 1);
  CHECK(count_order(3, 3, 2) == 18);
  CHECK(count_class(3, 3, 2, 1) == 9);
  CHECK(count_class(3, 3, 2, 2) == 6);
  CHECK(count_class(3, 3, 2, 3) == 3);
  CHECK(count_class(2, 1, 1, 2) == 1);
  CHECK(count_class(3, 1, 3, 2) == 3);
}

TEST_CASE("counting identities against enumeration") {
  for (int p = 1; p <= 4; ++p)
    for (int q = 1; q <= 3; ++q)
      for (int k = 1; k <= 6; ++k) {
        auto all = all_of_order(p, k);
        CHECK(static_cast<long long>(all.size()) * q == count_order(p, q, k));
        long long total = 0, weighted = 0;
        for (int i = 1; i <= p; ++i) {
          long long brute = 0;
          for (const auto& J : all)
            if (J.cls() == i) brute += q;
          CHECK(brute == count_class(p, q, k, i));
          total += count_class(p, q, k, i);
          weighted += i * count_class(p, q, k, i);
        }
        CHECK(total == count_order(p, q, k));
        CHECK(weighted == count_order(p, q, k + 1));
      }
}

TEST_CASE("Pommaret cones") {
  CHECK(in_cone({1, MultiIndex::from_exponents({5, 0})}, {1, MultiIndex::from_exponents({3, 0})}));
  CHECK_FALSE(in_cone({1, MultiIndex::from_exponents({3, 2})}, {1, MultiIndex::from_exponents({2, 1})}));
  CHECK(in_cone({1, MultiIndex{1, 2}}, {1, MultiIndex{1, 2}}));
  CHECK_FALSE(in_cone({2, MultiIndex{1, 1}}, {1, MultiIndex{1}}));
  // y^2 has class 2 so x and y may be appended
  CHECK(in_cone({1, MultiIndex{1, 2, 2, 2}}, {1, MultiIndex{2, 2}}));
}

TEST_CASE("cone membership is transitive") {
  auto all = all_of_order(3, 1);
  for (int k = 2; k <= 3; ++k)
    for (auto& J : all_of_order(3, k)) all.push_back(J);
  for (const auto& a : all)
    for (const auto& b : all)
      for (const auto& c : all) {
        IndexedCoordinate A{1, a}, B{1, b}, C{1, c};
        if (in_cone(A, B) && in_cone(B, C)) CHECK(in_cone(A, C));
      }
}

TEST_CASE("Rees decomposition verification") {
  // cross-section u_{x^k}, u_{x^k y}, u_yy over order > 2
  auto universe = [](const IndexedCoordinate& c) {
    auto ex = c.index.exponents(2);
    return ex[1] <= 1 || (ex[0] == 0 && ex[1] == 2);
  };
  auto ok = verify_rees({{1, MultiIndex::from_exponents({3, 0})}, {1, MultiIndex::from_exponents({2, 1})}},
                        universe, 2, {1}, 3, 8);
  CHECK(ok.ok);

  auto uni2 = [](const IndexedCoordinate& c) {
    auto ex = c.index.exponents(2);
    return (ex[1] == 0 && ex[0] >= 2) || (ex[0] == 1 && ex[1] == 1);
  };
  auto miss = verify_rees({{1, MultiIndex{1, 1}}}, uni2, 2, {1}, 2, 5);
  CHECK_FALSE(miss.ok);
  REQUIRE(miss.uncovered.size() == 1);
  CHECK(miss.uncovered[0].index == MultiIndex{1, 2});

  auto uni3 = [](const IndexedCoordinate& c) { return c.index.count(2) == 0 && c.index.order() >= 2; };
  auto over = verify_rees({{1, MultiIndex{1, 1}}, {1, MultiIndex{1, 1, 1}}}, uni3, 2, {1}, 2, 5);
  CHECK_FALSE(over.ok);
  CHECK(std::find(over.overlapped.begin(), over.overlapped.end(), IndexedCoordinate{1, MultiIndex{1, 1, 1}}) !=
        over.overlapped.end());

  // normalizing u_{y^k} instead leaves mixed indices uncovered
  auto uni4 = [](const IndexedCoordinate& c) {
    auto ex = c.index.exponents(2);
    return ex[0] <= 1;
  };
  auto bad = verify_rees({{1, MultiIndex::from_exponents({0, 3})}, {1, MultiIndex::from_exponents({1, 2})}}, uni4,
                         2, {1}, 3, 8);
  CHECK_FALSE(bad.ok);
}

TEST_CASE("class term order") {
  ClassTermOrder o(2);
  auto cols = o.columns(2, {1});
  REQUIRE(cols.size() == 3);
  CHECK(cols[0].index == MultiIndex{2, 2});
  // total order on a fixed jet order
  auto c3 = o.columns(3, {1, 2, 3});
  for (std::size_t a = 0; a < c3.size(); ++a)
    for (std::size_t b = 0; b < c3.size(); ++b) {
      if (a == b) continue;
      CHECK(o.before(c3[a], c3[b]) != o.before(c3[b], c3[a]));
      if (o.cls(c3[a].index) > o.cls(c3[b].index)) CHECK(o.before(c3[a], c3[b]));
    }
}

TEST_CASE("permuted ordering relabels classes") {
  ClassTermOrder swapped(2, {2, 1});
  // y comes first, so y has class 1 and x class 2
  CHECK(swapped.cls(MultiIndex{1}) == 2);
  CHECK(swapped.cls(MultiIndex{2}) == 1);
  ClassTermOrder plain(2);
  auto a = swapped.columns(2, {1});
  auto b = plain.columns(2, {1});
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::vector<int> e;
    for (int v : b[k].index.entries()) e.push_back(v == 1 ? 2 : 1);
    CHECK(a[k].index == MultiIndex(e));
  }
}
