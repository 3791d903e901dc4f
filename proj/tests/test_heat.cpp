#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ghl/heat.hpp"

using namespace ghl;

namespace {

VoltageGraph random_connected(std::mt19937_64& rng, int nv, int extra,
                              const DeckGroup& g) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_int_distribution<int> pick(0, nv - 1);
  VoltageGraph vg;
  vg.group = g;
  vg.vertices = nv;
  auto volt = [&]() {
    if (g.size() <= 1) return g.identity();
    std::uniform_int_distribution<std::int64_t> z(0, g.size() - 1);
    return g.elements()[z(rng)];
  };
  for (int u = 1; u < nv; ++u) {
    std::uniform_int_distribution<int> prev(0, u - 1);
    vg.edges.push_back({prev(rng), u, w(rng), volt()});
  }
  for (int e = 0; e < extra; ++e)
    vg.edges.push_back({pick(rng), pick(rng), w(rng), volt()});
  return vg;
}

}  // namespace

TEST_CASE("supertrace of the heat semigroup is the Euler characteristic") {
  std::mt19937_64 rng(21);
  DeckGroup g = DeckGroup::cyclic(3);
  VoltageGraph vg = random_connected(rng, 10, 6, g);
  GradedGraphDirac d = graph_dirac(vg);
  HeatCurve c = supertrace_curve(d, {0.1, 1.0, 10.0});
  for (const auto& v : c.values)
    REQUIRE(std::abs(v - Complex(double(d.euler_characteristic()))) < 1e-10);
  REQUIRE(c.spread() < 1e-10);
}

TEST_CASE("index theorem: base and lifted indices agree and covers multiply") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    DeckGroup g = DeckGroup::cyclic(2 + trial % 4);
    VoltageGraph vg = random_connected(rng, 8 + trial, 4 + trial, g);
    auto rep = atiyah_check(vg, Quotient::identity_on(g));
    REQUIRE(rep.equal);
    REQUIRE(rep.multiplicative);
    REQUIRE(std::abs(rep.base_index - rep.euler_characteristic) < 1e-9);
  }
}

TEST_CASE("heat kernel unfolds along a finite cover") {
  std::mt19937_64 rng(41);
  DeckGroup z = DeckGroup::free_abelian(1);
  VoltageGraph vg;
  vg.group = z;
  vg.vertices = 3;
  std::uniform_real_distribution<double> w(0.5, 2.0);
  vg.edges.push_back({0, 1, w(rng), z.identity()});
  vg.edges.push_back({1, 2, w(rng), z.identity()});
  vg.edges.push_back({2, 0, w(rng), GroupElement{1}});
  Quotient q(z, {5});
  for (double t : {0.5, 2.0})
    for (int l : {0, 1}) REQUIRE(unfolding_check(vg, q, t, l) < 1e-10);
}

TEST_CASE("Duhamel derivative of the heat semigroup") {
  std::mt19937_64 rng(55);
  DeckGroup g = DeckGroup::cyclic(3);
  VoltageGraph vg = random_connected(rng, 5, 2, g);
  EquivariantOperator d0 = graph_dirac(vg).op;
  EquivariantOperator k = EquivariantOperator::identity(g, d0.fiber_plus(),
                                                        d0.fiber_minus());
  auto family = [&](double u) { return d0.plus(k.scaled(u)); };
  REQUIRE(duhamel_check(family, 0.1, 0.7, 1e-3) < 1e-5);
}

TEST_CASE("long-time decay of the heat semigroup off the kernel") {
  std::mt19937_64 rng(60);
  DeckGroup g = DeckGroup::cyclic(4);
  VoltageGraph vg = random_connected(rng, 6, 3, g);
  auto rep = long_time_check(graph_dirac(vg).op, {1.0, 5.0, 20.0});
  REQUIRE(rep.monotone);
  REQUIRE(rep.within_bound);
}

TEST_CASE("finite-propagation Gaussian bound on a path graph") {
  VoltageGraph path;
  path.group = DeckGroup::trivial();
  path.vertices = 30;
  for (int i = 0; i + 1 < 30; ++i)
    path.edges.push_back({i, i + 1, 1.0, path.group.identity()});
  auto rep = gaussian_decay_check(path, {1.0, 4.0});
  REQUIRE(rep.in_regime_bound_holds);
  REQUIRE(rep.c > 0.0);
}

TEST_CASE("kernels of operators agreeing on a ball are close at the center") {
  VoltageGraph a;
  a.group = DeckGroup::trivial();
  a.vertices = 40;
  for (int i = 0; i + 1 < 40; ++i)
    a.edges.push_back({i, i + 1, 1.0, a.group.identity()});
  VoltageGraph b = a;
  b.edges.push_back({38, 20, 0.7, b.group.identity()});  // far from site 2
  auto rep = relative_decay_check(a, b, 2, 10, 3.0);
  REQUIRE(rep.difference < 1e-6);
  REQUIRE(rep.bound_holds);
}
