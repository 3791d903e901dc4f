#include <catch2/catch_amalgamated.hpp>

#include "ghl/cylinder.hpp"

using namespace ghl;
using Catch::Approx;

namespace {

CylinderModel pure_model(const std::vector<double>& spectrum, double R = 60.0,
                         double h = 0.2) {
  DeckGroup g = DeckGroup::trivial();
  const int m = static_cast<int>(spectrum.size());
  EquivariantOperator a(g, m);
  Matrix d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) d(i, i) = spectrum[i];
  a.set_block(g.identity(), d);
  return CylinderModel{a, std::nullopt, {}, R, h};
}

}  // namespace

TEST_CASE("cutoff profile interpolates between 0 and r") {
  REQUIRE(cyl_theta(1.0) == 0.0);
  REQUIRE(cyl_theta(2.0) == 0.0);
  REQUIRE(cyl_theta(3.0) == Approx(3.0));
  REQUIRE(cyl_theta(5.0) == Approx(5.0));
  // C^1 join
  REQUIRE(cyl_vartheta(2.0) == Approx(0.0).margin(1e-12));
  REQUIRE(cyl_vartheta(3.0) == Approx(1.0).margin(1e-12));
  REQUIRE(cyl_theta(2.5) > 0.0);
  REQUIRE(cyl_theta(2.5) < 2.5);
}

TEST_CASE("closed-form solution counts for a diagonal boundary operator") {
  CylinderModel m = pure_model({-2.0, -0.5, 0.5, 2.0});
  SpectralMeasure mu = spectral_measure(m.boundary);
  ModelCounts c0 = model_solution_counts(mu, 1.0, 0.0);
  // rates: lambda outside (-1,1): -2, 2 keep sign; 0.5, -0.5 become rate 0
  REQUIRE(c0.l2_plus == 1.0);
  REQUIRE(c0.ext_plus == 3.0);
  REQUIRE(c0.l2_minus == 1.0);
  REQUIRE(c0.ext_minus == 3.0);
  REQUIRE(c0.h_plus == 2.0);
  REQUIRE(c0.h_minus == 2.0);
  ModelCounts cu = model_solution_counts(mu, 1.0, 0.3);
  // inside modes now have rate u > 0
  REQUIRE(cu.l2_plus == 3.0);
  REQUIRE(cu.h_plus == 0.0);
  REQUIRE(cu.l2_minus == 1.0);
}

TEST_CASE("discretized weighted kernels reproduce the closed forms") {
  CylinderModel m = pure_model({-2.0, -0.5, 0.5, 2.0});
  ModifiedOperator mo = spectral_modification(m, 1.0, 0.0);
  SpectralMeasure mu = spectral_measure(m.boundary);
  ModelCounts want = model_solution_counts(mu, 1.0, 0.0);
  ExtendedKernelReport ek = extended_kernel_report(mo, {0.3, 0.35, 0.4});
  REQUIRE(ek.l2_plus == want.l2_plus);
  REQUIRE(ek.ext_plus == want.ext_plus);
  REQUIRE(ek.l2_minus == want.l2_minus);
  REQUIRE(ek.ext_minus == want.ext_minus);
  REQUIRE(ek.h_plus == want.h_plus);
  REQUIRE(ek.h_minus == want.h_minus);
  REQUIRE(ek.stable);
}

TEST_CASE("asymmetric spectrum gives a nonzero index and matching counts") {
  CylinderModel m = pure_model({-1.7, 0.4, 2.0}, 90.0);
  SpectralMeasure mu = spectral_measure(m.boundary);
  for (double u : {0.3, -0.3}) {
    ModelCounts want = model_solution_counts(mu, 1.0, u);
    ChiralityCounts got =
        weighted_kernel(spectral_modification(m, 1.0, u), 0.0);
    REQUIRE(got.plus == want.l2_plus);
    REQUIRE(got.minus == want.l2_minus);
  }
}

TEST_CASE("counts are stable under doubling the cylinder length") {
  CylinderModel m = pure_model({-1.7, 0.4}, 60.0, 0.2);
  CylinderModel m2 = pure_model({-1.7, 0.4}, 120.0, 0.2);
  auto e1 = extended_kernel_report(spectral_modification(m, 1.0, 0.0),
                                   {0.3, 0.35, 0.4});
  auto e2 = extended_kernel_report(spectral_modification(m2, 1.0, 0.0),
                                   {0.3, 0.35, 0.4});
  REQUIRE(e1.l2_plus == e2.l2_plus);
  REQUIRE(e1.ext_plus == e2.ext_plus);
  REQUIRE(e1.h_plus == e2.h_plus);
  REQUIRE(e1.h_minus == e2.h_minus);
}

TEST_CASE("index minus eta is symmetric around u = 0 on a pure cylinder") {
  CylinderModel m = pure_model({-1.7, 0.4}, 100.0);
  ModifiedOperator mo = spectral_modification(m, 1.0, 0.4);
  ApsReport rep = aps_consistency(mo, {0.4, 0.3, 0.2});
  REQUIRE(rep.symmetrization_exact);
  REQUIRE(rep.g_nonincreasing);
  for (const auto& row : rep.rows) REQUIRE(std::abs(row.g) < 1e-9);
}

TEST_CASE("L2 index relations tie kernels to extended solutions") {
  CylinderModel m = pure_model({-2.0, 0.5}, 100.0);
  ModifiedOperator mo = spectral_modification(m, 1.0, 0.3);
  L2IndexReport rep = l2_index_report(mo, {0.3});
  for (const auto& row : rep.rows) {
    REQUIRE(row.rel_plus_residual < 1e-9);
    REQUIRE(row.rel_minus_residual < 1e-9);
  }
}

TEST_CASE("resolution guard rejects coarse grids") {
  CylinderModel m = pure_model({-2.0, 2.0}, 40.0, 0.3);
  REQUIRE_THROWS_WITH(spectral_modification(m, 1.0, 0.0),
                      Catch::Matchers::ContainsSubstring("resolution"));
}

TEST_CASE("glued interior: half-line with a pendant vertex") {
  // boundary operator diag(-1.5, 1.5); interior a single edge hanging off
  // each boundary slot is glued to its own interior vertex
  DeckGroup g = DeckGroup::trivial();
  EquivariantOperator a(g, 2);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << -1.5, 1.5;
  a.set_block(g.identity(), d);
  VoltageGraph interior;
  interior.group = g;
  interior.vertices = 3;
  interior.edges.push_back({0, 2, 1.0, g.identity()});
  interior.edges.push_back({1, 2, 1.0, g.identity()});
  CylinderModel m{a, interior, {0, 1}, 90.0, 0.2};
  m.validate();
  ModifiedOperator mo = spectral_modification(m, 1.0, 0.3);
  ChiralityCounts c = weighted_kernel(mo, 0.0);
  ChiralityCounts cn = weighted_kernel(spectral_modification(m, 1.0, -0.3), 0.0);
  // no boundary eigenvalue inside (-1, 1): the index cannot jump across u = 0
  REQUIRE((c.plus - c.minus) - (cn.plus - cn.minus) == 0.0);
  // counts are R-stable
  CylinderModel m2 = m;
  m2.R = 135.0;
  ChiralityCounts c2 = weighted_kernel(spectral_modification(m2, 1.0, 0.3), 0.0);
  REQUIRE(c.plus == c2.plus);
  REQUIRE(c.minus == c2.minus);
}

TEST_CASE("spectrum bottom: bound states below the essential spectrum are R-stable") {
  CylinderModel m = pure_model({-1.5, 0.5}, 30.0, 0.3);
  ModifiedOperator mo = spectral_modification(m, 1.0, 0.3);
  SpectrumBottomReport rep = spectrum_bottom_check(mo, {30.0, 60.0});
  REQUIRE(rep.below_stable);
  REQUIRE(rep.window_grows);
}
