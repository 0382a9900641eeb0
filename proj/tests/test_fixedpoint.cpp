#include <doctest.h>

#include <cmath>

#include "varhunt/fixedpoint.hpp"

using namespace varhunt;

TEST_CASE("constant-gradient potentials have exact fixed points") {
  // P(x) = c.x: A(x) = c, the unique fixed point of A is x = c
  for (double c : {0.5, 1.0, 1.75}) {
    PotentialSpec spec = PotentialSpec::from_potential(
        1, [c](const Vec& x) { return c * x[0]; });
    double rho = 4.0 * std::max(1.0, c * c);
    FpReport rep = find_fixed_point(spec, rho, 6, 2);
    // phi(rho) for P = c x on the ball: sup P = c sqrt(rho), and the
    // quotient (c sqrt(rho) - c x)/(rho - x^2) = c/(sqrt(rho) + x) is
    // minimized at the boundary: c/(2 sqrt(rho))
    CHECK(rep.phi_hat ==
          doctest::Approx(c / (2.0 * std::sqrt(rho))).epsilon(1e-4));
    REQUIRE(rep.below_half);
    REQUIRE(rep.found);
    CHECK(rep.x[0] == doctest::Approx(c).epsilon(1e-6));
    CHECK(rep.fp_residual <= 1e-6);
    CHECK(rep.x.squaredNorm() < rho);
  }
}

TEST_CASE("the ball quotient is reported without a hunt when it is >= 1/2") {
  // P(x) = 2x on rho = 1: phi = 2/(2*1) = 1 >= 1/2, verdict only
  PotentialSpec spec =
      PotentialSpec::from_potential(1, [](const Vec& x) { return 2.0 * x[0]; });
  FpReport rep = find_fixed_point(spec, 1.0, 6, 2);
  CHECK(rep.phi_hat == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(!rep.below_half);
  CHECK(!rep.found);
}

TEST_CASE("fp_phi input validation") {
  PotentialSpec spec =
      PotentialSpec::from_potential(1, [](const Vec& x) { return x[0]; });
  CHECK_THROWS_AS(fp_phi(spec, 0.0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(fp_phi(spec, -2.0, 4, 1), std::invalid_argument);
}

TEST_CASE("plateau profile values, plateaus, and C1 blends") {
  PlateauProfile prof;
  // growth octaves: r^2
  CHECK(prof.value(0.5) == doctest::Approx(0.25));
  CHECK(prof.value(1.5) == doctest::Approx(2.25));
  // plateau octaves: constant 4^k
  CHECK(prof.value(2.5) == doctest::Approx(4.0));
  CHECK(prof.value(3.9) == doctest::Approx(4.0));
  CHECK(prof.derivative(3.0) == doctest::Approx(0.0));
  CHECK(prof.value(10.0) == doctest::Approx(64.0));
  CHECK(prof.derivative(5.0) == doctest::Approx(10.0));

  // derivative is consistent with finite differences through the corners
  for (double r : {1.995, 2.0, 2.005, 3.995, 4.0, 4.005, 7.997, 8.003}) {
    double h = 1e-7;
    double fd = (prof.value(r + h) - prof.value(r - h)) / (2 * h);
    CHECK(prof.derivative(r) == doctest::Approx(fd).epsilon(1e-4));
  }
  // value is continuous across blend boundaries
  for (double c : {2.0, 4.0, 8.0, 16.0}) {
    double w = prof.smoothing;
    CHECK(prof.value(c - w - 1e-12) == doctest::Approx(prof.value(c - w)));
    CHECK(prof.value(c + w + 1e-12) == doctest::Approx(prof.value(c + w)));
  }
}

TEST_CASE("radius scan straddles for the plateau potential only") {
  std::vector<double> radii;
  for (int i = 0; i < 16; ++i)
    radii.push_back(0.5 * std::pow(32.0, i / 15.0));  // 0.5 .. 16

  ScanReport plateau = thm5_scan(make_radial_potential(2, PlateauProfile{}),
                                 radii, 6, 2);
  CHECK(plateau.straddles);
  bool below = false, above = false;
  for (const auto& row : plateau.rows) {
    if (row.r <= 16.0 && row.ratio < 0.48) below = true;
    if (row.r <= 16.0 && row.ratio > 0.52) above = true;
  }
  CHECK(below);
  CHECK(above);

  PotentialSpec quarter = PotentialSpec::from_potential(
      2, [](const Vec& x) { return 0.25 * x.squaredNorm(); });
  ScanReport flat = thm5_scan(quarter, radii, 6, 2);
  CHECK(!flat.straddles);
  for (const auto& row : flat.rows)
    CHECK(row.ratio == doctest::Approx(0.25).epsilon(1e-6));

  CHECK_THROWS_AS(thm5_scan(quarter, {2.0, 1.0}, 4, 2), std::invalid_argument);
}

TEST_CASE("fixed points are stable under shifting the potential") {
  for (double shift : {0.0, 5.0}) {
    PotentialSpec spec = PotentialSpec::from_potential(
        1, [shift](const Vec& x) { return x[0] + shift; });
    FpReport rep = find_fixed_point(spec, 4.0, 6, 2);
    REQUIRE(rep.found);
    CHECK(rep.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  }
}
