#include <random>

#include "doctest.h"
#include "fieldlab/errors.hpp"
#include "fieldlab/scaling.hpp"
#include "fieldlab/sources.hpp"

using namespace fieldlab;

namespace {

HertzianDipoleSource unit_dipole() { return HertzianDipoleSource(1.0, 2 * kPi, 0.05); }

std::vector<double> geometric_radii(double r0, double g, int n) {
  std::vector<double> r;
  for (int j = 0; j < n; ++j) r.push_back(r0 * std::pow(g, j));
  return r;
}

double theta_of(const Vec3& n) { return std::acos(n.z / norm(n)); }

}  // namespace

TEST_CASE("planted exponents are recovered from noisy samples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  const auto R = geometric_radii(20, std::pow(2.0, 0.75), 5);
  for (double alpha : {-2.0, -1.0, -0.5, 0.0, 3.5}) {
    std::vector<double> y;
    for (double r : R) y.push_back(3.0 * std::pow(r, alpha) * (1 + noise(rng)));
    const ScalingReport s = fit_power_law(R, y, "planted");
    CHECK(std::abs(s.exponent - alpha) <= 0.05);
    CHECK(s.ci_low <= s.exponent);
    CHECK(s.ci_high >= s.exponent);
    CHECK(s.n == 5u);
    CHECK(s.quantity == "planted");
  }
}

TEST_CASE("exact power law") {
  const auto R = geometric_radii(10, 1.5, 6);
  std::vector<double> y;
  for (double r : R) y.push_back(7.0 / r);
  const ScalingReport s = fit_power_law(R, y);
  CHECK(s.exponent == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.prefactor == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(s.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.std_error < 1e-12);
  CHECK(s.r_min == 10.0);
  CHECK(s.r_max == doctest::Approx(10 * std::pow(1.5, 5)));
}

TEST_CASE("fit input checks") {
  const std::vector<double> R{1, 2, 3, 4};
  CHECK_THROWS_AS(fit_power_law(R, std::vector<double>{1, 0, 1, 1}), NonPositiveSample);
  CHECK_THROWS_AS(fit_power_law(R, std::vector<double>{1, -2, 1, 1}), NonPositiveSample);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(R, std::vector<double>{1, 1, 1}), std::invalid_argument);
}

TEST_CASE("radial sweep rules") {
  const auto ok = RadialSweep::geometric(20, 1.5, 5);
  CHECK_NOTHROW(ok.validate(10));
  CHECK_THROWS_AS(ok.validate(30), std::invalid_argument);
  CHECK_THROWS_AS(RadialSweep::geometric(20, 2.5, 5).validate(10), std::invalid_argument);
  CHECK_THROWS_AS(RadialSweep::geometric(20, 1.5, 3).validate(10), std::invalid_argument);
  CHECK_THROWS_AS(RadialSweep::geometric(20, 1.0, 5).validate(10), std::invalid_argument);
  const auto s = RadialSweep::geometric(1, 2, 4, 0, 0);
  CHECK(norm(s.point(3) - Vec3{0, 0, 8}) < 1e-12);
}

TEST_CASE("dipole field and gradient fall as 1/R") {
  const auto dip = unit_dipole();
  const auto field = make_pipeline_sampler(dip, Pipeline::from_potential);
  ScalingStudyOptions o;
  o.radii = geometric_radii(20, std::pow(2.0, 0.75), 5);
  o.boundary = false;
  o.solid_angle = false;
  const ScalingStudy st = run_scaling_study(dip, *field, o);
  REQUIRE(st.reports.size() == 2u);
  CHECK(std::abs(st.reports[0].exponent + 1.0) <= 0.02);
  CHECK(std::abs(st.reports[1].exponent + 1.0) <= 0.05);
  // The beam of a dipole along z lies in the equatorial plane.
  CHECK(std::abs(st.beam.theta - 0.5 * kPi) < 1e-3);
}

TEST_CASE("exponent does not depend on the sweep ratio") {
  const auto dip = unit_dipole();
  const auto field = make_pipeline_sampler(dip, Pipeline::from_potential);
  const auto a = sweep_field(dip, *field, RadialSweep::geometric(20, 1.3, 5, 1.1, 0.4));
  const auto b = sweep_field(dip, *field, RadialSweep::geometric(20, 2.0, 5, 1.1, 0.4));
  const double ea = fit_power_law(a.sweep.radii, a.values).exponent;
  const double eb = fit_power_law(b.sweep.radii, b.values).exponent;
  CHECK(std::abs(ea - eb) <= 0.02);
}

TEST_CASE("both pipelines give the same exponent") {
  const auto dip = unit_dipole();
  const auto a = make_pipeline_sampler(dip, Pipeline::from_potential);
  const auto b = make_pipeline_sampler(dip, Pipeline::source_term_only);
  const auto sweep = RadialSweep::geometric(20, 1.5, 4, 1.2, 0.3);
  const auto sa = sweep_field(dip, *a, sweep, FieldQuantity::magnetic, false);
  const auto sb = sweep_field(dip, *b, sweep, FieldQuantity::magnetic, false);
  const double ea = fit_power_law(sa.sweep.radii, sa.values).exponent;
  const double eb = fit_power_law(sb.sweep.radii, sb.values).exponent;
  CHECK(std::abs(ea - eb) <= 0.05);
  CHECK(std::abs(eb + 1) <= 0.02);
}

TEST_CASE("Coulomb field falls as 1/R^2 and its gradient as 1/R^3") {
  const StaticChargeBlob blob(1.0, 0.5);
  const auto field = make_pipeline_sampler(blob, Pipeline::from_potential);
  const auto sweep = RadialSweep::geometric(40, 1.5, 5, 1.0, 0.5);
  const auto s = sweep_field(blob, *field, sweep, FieldQuantity::electric, false);
  CHECK(std::abs(fit_power_law(s.sweep.radii, s.values).exponent + 2) <= 0.02);

  // Gradient of E by central differences of the computed field.
  std::vector<double> g;
  for (std::size_t j = 0; j < sweep.radii.size(); ++j) {
    const Vec3 x = sweep.point(j);
    const double h = 1e-3 * sweep.radii[j];
    Mat3 d{};
    for (int i = 0; i < 3; ++i) {
      Vec3 e{};
      e[i] = h;
      const Vec3 dE = (*field_from_potential(blob, {x + e, 0}).E -
                       *field_from_potential(blob, {x - e, 0}).E) / (2 * h);
      for (int k = 0; k < 3; ++k) d[i][k] = dE[k];
    }
    g.push_back(frobenius(d));
  }
  CHECK(std::abs(fit_power_law(sweep.radii, g).exponent + 3) <= 0.05);
}

TEST_CASE("beam solid angle") {
  const auto dip = unit_dipole();
  const auto field = make_pipeline_sampler(dip, Pipeline::from_potential);
  // |B| ~ sin(theta) >= 1/2 between 30 and 150 degrees: 2 pi sqrt(3).
  const double t0 = steady_state_time(dip, 200.0);
  const double a = beam_solid_angle(*field, 20, t0).steradians;
  const double b = beam_solid_angle(*field, 160, t0).steradians;
  CHECK(a == doctest::Approx(2 * kPi * std::sqrt(3.0)).epsilon(0.02));
  CHECK(std::abs(a - b) <= 0.02 * a);

  const FunctionFieldSampler flat([](const SpacetimePoint& p, bool) {
    FieldSample f;
    f.at = p;
    f.B = {0, 0, 1};
    return f;
  });
  CHECK(beam_solid_angle(flat, 10, 0).steradians == doctest::Approx(4 * kPi));

  const FunctionFieldSampler pencil([](const SpacetimePoint& p, bool) {
    FieldSample f;
    f.at = p;
    const double th = theta_of(p.x);
    f.B = {0, 0, std::exp(-th * th / 1e-4)};
    return f;
  });
  CHECK_THROWS_AS(beam_solid_angle(pencil, 10, 0), MeshTooCoarse);
}

TEST_CASE("beam peak search") {
  const FunctionFieldSampler lobe([](const SpacetimePoint& p, bool) {
    FieldSample f;
    f.at = p;
    const Vec3 n = normalized(p.x);
    const Vec3 c{std::sin(1.0) * std::cos(2.0), std::sin(1.0) * std::sin(2.0), std::cos(1.0)};
    f.B = {std::exp(4 * dot(n, c)), 0, 0};
    return f;
  });
  const BeamPeak b = find_beam_peak(lobe, 10, 0, FieldQuantity::magnetic);
  CHECK(b.theta == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(b.phi == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(b.value == doctest::Approx(std::exp(4.0)).epsilon(1e-6));
}
