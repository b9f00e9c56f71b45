#include "doctest.h"
#include "fieldlab/errors.hpp"
#include "fieldlab/sources.hpp"
#include "fieldlab/validation.hpp"

using namespace fieldlab;

namespace {

HertzianDipoleSource unit_dipole() { return HertzianDipoleSource(1.0, 2 * kPi, 0.05); }

RotatingSourceParams superluminal() {
  RotatingSourceParams p;
  p.mode = 5;
  p.omega = 1.5;
  return p;
}

}  // namespace

TEST_CASE("residual grid") {
  const auto dip = unit_dipole();
  const ResidualGrid g = ResidualGrid::for_probe(dip, {5, 0, 0});
  CHECK_NOTHROW(g.validate());
  CHECK(g.h_t <= 0.5 * g.h_x);
  CHECK(g.halved().h_x == 0.5 * g.h_x);
  CHECK_THROWS_AS((ResidualGrid{0.1, 0.08}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ResidualGrid{0.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("wave equation outside a static charge") {
  const StaticChargeBlob blob(1.0, 0.5);
  const SpacetimePoint p{{6, 2, -3}, 0};
  const ResidualReport r = dalembertian_residual_A(blob, p, ResidualGrid::for_probe(blob, p.x));
  CHECK(!r.inside);
  CHECK(r.residual < 1e-2);
}

TEST_CASE("wave equation with sources for the dipole") {
  const auto dip = unit_dipole();
  const SpacetimePoint in{{0.02, 0.01, 0.03}, 3.3};
  const ResidualGrid g = ResidualGrid::for_probe(dip, in.x);
  const ResidualReport a = dalembertian_residual_A(dip, in, g);
  CHECK(a.inside);
  CHECK(a.residual < 1e-2);
  const ResidualReport b = dalembertian_residual_B(dip, in, g);
  CHECK(b.residual < 1e-2);

  // Fourth-order stencils: halving the spacing cuts the residual well below half.
  const ResidualReport a2 = dalembertian_residual_A(dip, in, g.halved());
  CHECK(a2.residual * 3.5 <= a.residual);

  const SpacetimePoint out{{3, -2, 4}, 9.1};
  const ResidualGrid go = ResidualGrid::for_probe(dip, out.x);
  CHECK(dalembertian_residual_A(dip, out, go).residual < 1e-2);
  CHECK(dalembertian_residual_B(dip, out, go).residual < 1e-2);
}

TEST_CASE("wave equation outside the superluminal source") {
  const RotatingPolarizationSource rot(superluminal());
  const Vec3 x{3, 1, 2};
  const SpacetimePoint p{x, steady_state_time(rot, x) + 0.2};
  const ResidualGrid g = ResidualGrid::for_probe(rot, x);
  CHECK(dalembertian_residual_A(rot, p, g).residual < 1e-2);
  CHECK(dalembertian_residual_B(rot, p, g).residual < 1e-2);
  const PhasorFieldSampler ph(rot);
  CHECK(dalembertian_residual_B(rot, ph, p, g).residual < 1e-2);
}

TEST_CASE("null initial data") {
  const auto dip = unit_dipole();
  const std::vector<Vec3> pts{{5, 0, 0}, {0, 3, 4}, {-2, 2, -2}};
  const InitialConditionReport r = initial_condition_check(dip, pts);
  CHECK(!r.exempt);
  CHECK(r.checked > 0u);
  CHECK(r.passed);
  CHECK(r.max_A == 0.0);
  CHECK(r.max_B == 0.0);
  const StaticChargeBlob blob(1.0, 0.5);
  CHECK(initial_condition_check(blob, pts).exempt);
}

TEST_CASE("response starts on the light cone") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.05, -1, 0.5);
  const double h_t = 0.1 * dip.sigma();
  const OnsetReport r = light_cone_onset(dip, {10, 0, 0}, h_t);
  CHECK(r.expected == doctest::Approx(0.5 + 10 - dip.support().bounding_radius()));
  CHECK(std::abs(r.measured - r.expected) <= h_t);
  CHECK(r.before == 0.0);
  CHECK(r.after > 0.0);
}
