#include <catch2/catch_amalgamated.hpp>

#include "ghl/group.hpp"

using namespace ghl;

TEST_CASE("lattice group arithmetic") {
  DeckGroup g = DeckGroup::lattice(2, {3});
  GroupElement a{1, -2, 2};
  GroupElement b{4, 1, 2};
  GroupElement ab = g.mul(a, b);
  REQUIRE(ab == GroupElement{5, -1, 1});
  REQUIRE(g.mul(a, g.inv(a)) == g.identity());
  REQUIRE(g.mul(g.inv(a), a) == g.identity());
  REQUIRE_FALSE(g.is_finite());
}

TEST_CASE("finite lattice enumeration and indexing") {
  DeckGroup g = DeckGroup::lattice(0, {2, 3});
  REQUIRE(g.is_finite());
  REQUIRE(g.size() == 6);
  auto els = g.elements();
  REQUIRE(els.size() == 6);
  for (std::size_t i = 0; i < els.size(); ++i)
    REQUIRE(g.element_index(els[i]) == static_cast<std::int64_t>(i));
}

TEST_CASE("table group validates and multiplies") {
  // Z/3 as an explicit table
  std::vector<std::vector<int>> t = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  DeckGroup g = DeckGroup::from_table(t);
  REQUIRE(g.size() == 3);
  REQUIRE(g.mul({1}, {2}) == g.identity());
  REQUIRE(g.inv({2}) == GroupElement{1});
  // broken associativity must be rejected
  std::vector<std::vector<int>> bad = {{0, 1}, {1, 1}};
  REQUIRE_THROWS(DeckGroup::from_table(bad));
}

TEST_CASE("quotient map is a homomorphism") {
  DeckGroup z = DeckGroup::free_abelian(1);
  Quotient q(z, {4});
  for (std::int64_t a = -5; a <= 5; ++a)
    for (std::int64_t b = -5; b <= 5; ++b)
      REQUIRE(q.map(z.mul({a}, {b})) ==
              q.target().mul(q.map({a}), q.map({b})));
  REQUIRE(q.map({4}) == q.target().identity());
}

TEST_CASE("tower over Z has divisible levels") {
  DeckGroup z = DeckGroup::free_abelian(1);
  DeckTower tw = DeckTower::over_z({2, 4, 8});
  REQUIRE(tw.levels.size() == 3);
  REQUIRE(tw.levels[2].target().size() == 8);
}
