#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ghl/clifford.hpp"
#include "ghl/operator.hpp"

using namespace ghl;
using Catch::Approx;

TEST_CASE("generator relations in the abstract algebra") {
  const int k = 5;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      CliffordElement ci = CliffordElement::generator(k, i);
      CliffordElement cj = CliffordElement::generator(k, j);
      CliffordElement anti = multiply(ci, cj).plus(multiply(cj, ci));
      std::complex<double> want = (i == j) ? -2.0 : 0.0;
      REQUIRE(std::abs(anti.coefficient(0) - want) < 1e-15);
      for (std::uint32_t m = 1; m < (1u << k); ++m)
        REQUIRE(std::abs(anti.coefficient(m)) < 1e-15);
    }
}

TEST_CASE("volume element squares to one and is central in even degree") {
  for (int l = 1; l <= 4; ++l) {
    const int k = 2 * l;
    CliffordElement tau = volume_element(k);
    CliffordElement sq = multiply(tau, tau);
    REQUIRE(std::abs(sq.coefficient(0) - 1.0) < 1e-14);
    for (int i = 1; i <= k; ++i) {
      // tau anticommutes with each generator in even degree
      CliffordElement ci = CliffordElement::generator(k, i);
      CliffordElement anticomm = multiply(tau, ci).plus(multiply(ci, tau));
      for (std::uint32_t m = 0; m < (1u << k); ++m)
        REQUIRE(std::abs(anticomm.coefficient(m)) < 1e-14);
    }
  }
}

TEST_CASE("graded trace closed forms") {
  for (int l = 1; l <= 4; ++l) {
    const int k = 2 * l;
    auto t = graded_trace(volume_element(k));
    REQUIRE(std::abs(t.str - std::pow(2.0, l)) < 1e-14);
    REQUIRE(std::abs(graded_trace(CliffordElement::scalar(k, 1.0)).str) < 1e-14);
    const int ko = k - 1;
    auto to = graded_trace(CliffordElement::scalar(ko, 1.0));
    REQUIRE(std::abs(*to.tr_plus - std::pow(2.0, l - 1)) < 1e-14);
    REQUIRE(std::abs(*to.tr_minus - std::pow(2.0, l - 1)) < 1e-14);
  }
}

TEST_CASE("spinor representation realizes the algebra with the right grading") {
  for (int k = 1; k <= 6; ++k) {
    SpinorRepresentation rep = spinor_representation(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Matrix anti = rep.c[i] * rep.c[j] + rep.c[j] * rep.c[i];
        if (i == j) anti += 2.0 * Matrix::Identity(anti.rows(), anti.cols());
        REQUIRE(anti.cwiseAbs().maxCoeff() < 1e-14);
      }
  }
  // representation trace agrees with the algebraic graded trace
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  SpinorRepresentation rep = spinor_representation(4);
  CliffordElement x(4);
  for (std::uint32_t m = 0; m < 16; ++m) x.add(m, {c(rng), c(rng)});
  REQUIRE(std::abs(graded_trace(x).str - rep.signed_trace(rep.ambient(x))) <
          1e-12);
}

TEST_CASE("half-cylinder supertrace identity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  for (int n : {1, 3, 5}) {
    Matrix phi(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) phi(i, j) = Complex(c(rng), c(rng));
    REQUIRE(cylinder_trace_identity_check(phi) < 1e-12);
  }
}
