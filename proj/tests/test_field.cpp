#include <random>

#include "doctest.h"
#include "fieldlab/errors.hpp"
#include "fieldlab/field.hpp"
#include "fieldlab/samplers.hpp"
#include "fieldlab/sources.hpp"
#include "oracles.hpp"

using namespace fieldlab;

namespace {

HertzianDipoleSource unit_dipole() { return HertzianDipoleSource(1.0, 2 * kPi, 0.05); }

oracle::PointDipole dipole_oracle(const HertzianDipoleSource& d) {
  return {oracle::smeared_moment(cplx(0, d.moment()), d.omega(), d.sigma()), d.omega()};
}

RotatingSourceParams superluminal() {
  RotatingSourceParams p;
  p.mode = 5;
  p.omega = 1.5;
  return p;
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return normalized(Vec3{n(rng), n(rng), n(rng)});
}

double cnorm(const CVec3& v) {
  return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

}  // namespace

TEST_CASE("Coulomb field of a static blob") {
  const StaticChargeBlob blob(1.0, 0.5);
  const oracle::Coulomb c{1.0};
  for (const Vec3& x : {Vec3{10, 0, 0}, Vec3{2, -6, 3}}) {
    const FieldSample f = field_from_potential(blob, {x, 0.0});
    REQUIRE(f.E);
    CHECK(norm(*f.E - c.E(x)) <= 1e-3 * norm(c.E(x)));
    CHECK(norm(f.B) <= 1e-12 * norm(c.E(x)));
    CHECK(f.provenance == Provenance::from_potential);
  }
}

TEST_CASE("dipole fields 50 wavelengths out") {
  const auto dip = unit_dipole();
  const auto o = dipole_oracle(dip);
  const double T = dip.period();
  std::mt19937_64 rng(31);
  for (int i = 0; i < 4; ++i) {
    const Vec3 x = random_direction(rng) * 50.0;
    const double t = steady_state_time(dip, x) + 0.21 * i;
    const FieldSample f = field_from_potential(dip, {x, t});
    const FieldSample g = field_from_potential(dip, {x, t + 0.25 * T});
    REQUIRE(f.E);
    const double bamp = cnorm(o.B(x));
    CHECK(norm(f.B - oracle::PointDipole::at(o.B(x), t, o.k)) <= 1e-3 * bamp);
    CHECK(norm(*f.E - oracle::PointDipole::at(o.E(x), t, o.k)) <= 1e-3 * bamp);
    // Far zone: |B| = |E| and both transverse.
    const double B = std::hypot(norm(f.B), norm(g.B));
    const double E = std::hypot(norm(*f.E), norm(*g.E));
    CHECK(std::abs(B - E) <= 0.01 * B);
    const Vec3 n = normalized(x);
    CHECK(std::abs(dot(n, f.B)) <= 1e-3 * bamp);
    CHECK(std::abs(dot(n, *f.E)) <= 1e-2 * bamp);
    CHECK(std::abs(dot(f.B, *f.E)) <= 1e-2 * bamp * bamp);
  }
}

TEST_CASE("source-term pipeline matches curl of the potential") {
  const auto dip = unit_dipole();
  const RotatingPolarizationSource rot(superluminal());
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dip),
                               static_cast<const SourceModel*>(&rot)}) {
    for (const Vec3& x : {Vec3{12, 3, 4}, Vec3{-5, 0, 20}}) {
      const double t = steady_state_time(*s, x) + 0.3;
      const FieldSample a = field_from_potential(*s, {x, t});
      const FieldSample b = field_source_term(*s, {x, t});
      CHECK(b.provenance == Provenance::source_term_only);
      CHECK(!b.E);
      CHECK(norm(a.B - b.B) <= 1e-6 * norm(a.B));
    }
  }
}

TEST_CASE("source term needs a curl") {
  const UniformBallCurrent ball({0, 0, 1}, 1.0, 0.5);
  const SpacetimePoint p{{5, 0, 0}, 3.0};
  CHECK_THROWS_AS(field_source_term(ball, p), CurlUnavailable);
  CurlOptions opts;
  opts.fallback_step = 1e-4;
  const FieldSample f = field_source_term(ball, p, {}, opts);
  CHECK((f.flags & kFlagCurlFallback) != 0);
}

TEST_CASE("fields are gauge invariant") {
  const auto dip = unit_dipole();
  const SpacetimePoint p{{8, 5, 3}, 15.2};
  const auto a = retarded_potential(dip, p);
  const RetardedPotentialSampler base(dip, a.plan);
  const double h = default_step(dip, p.x);
  const FieldSample f0 = field_from_sampler(base, p, h);
  const double l0 = lorenz_residual(base, p, h);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 10; ++i) {
    const double k = dip.omega();
    const auto lam = GaugeFunction::random_plane_wave(rng, k, a.value().magnitude() / k);
    CHECK(lam.dalembertian_residual(p, 1e-2 / k) < 1e-6);
    const auto tr = gauge_transform(base, lam);
    // The transformed potential really differs.
    CHECK(norm((*tr)(p).A - a.A) > 1e-3 * norm(a.A));
    const FieldSample f1 = field_from_sampler(*tr, p, h);
    CHECK(norm(f1.B - f0.B) <= 1e-6 * norm(f0.B));
    CHECK(norm(*f1.E - *f0.E) <= 1e-6 * norm(*f0.E));
    CHECK(std::abs(lorenz_residual(*tr, p, h) - l0) <= 1e-8);
  }
}

TEST_CASE("retarded potential satisfies the Lorenz condition") {
  const auto dip = unit_dipole();
  const RotatingPolarizationSource rot(superluminal());
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dip),
                               static_cast<const SourceModel*>(&rot)}) {
    const Vec3 x{6, -4, 5};
    const LorenzResult l = lorenz_residual(*s, {x, steady_state_time(*s, x) + 0.4});
    CHECK(l.residual <= 1e-6 * std::abs(l.dA0_dt));
  }
}

TEST_CASE("phasor sampler agrees with the oracle and the time domain") {
  const auto dip = unit_dipole();
  const auto o = dipole_oracle(dip);
  const PhasorFieldSampler ph(dip);
  const Vec3 x{30, 10, -20};
  const PhasorAmplitude a = ph.amplitude(x, true);
  CHECK(cnorm(a.B - o.B(x)) <= 1e-6 * cnorm(o.B(x)));
  CHECK(cnorm(a.E - o.E(x)) <= 1e-6 * cnorm(o.B(x)));
  CHECK(std::abs(a.A0 - o.A0(x)) <= 1e-6 * std::abs(o.A0(x)));
  // grad B against central differences of the closed form.
  const double h = 1e-4;
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    Vec3 e{};
    e[i] = h;
    const CVec3 d = (o.B(x + e) - o.B(x - e)) * (1.0 / (2 * h));
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(a.gradB[i][j] - d[j]));
  }
  CHECK(worst <= 1e-6 * cnorm(o.B(x)) * o.k);

  const double t = steady_state_time(dip, x) + 0.3;
  const FieldSample fp = ph.sample({x, t}, false);
  const FieldSample ft = field_from_potential(dip, {x, t});
  CHECK(norm(fp.B - ft.B) <= 1e-6 * cnorm(a.B));
}

TEST_CASE("phasor sampler for the rotating source") {
  const RotatingPolarizationSource rot(superluminal());
  const PhasorFieldSampler ph(rot);
  const Vec3 x{9, -7, 4};
  const double t = steady_state_time(rot, x) + 0.05;
  const FieldSample fp = ph.sample({x, t}, false);
  const FieldSample ft = field_from_potential(rot, {x, t});
  CHECK(norm(fp.B - ft.B) <= 1e-6 * norm(ft.B));
  // Rigid rotation of the pattern: B(R x, t + a / omega) = R B(x, t).
  const double alpha = 0.7;
  const ZRotation R = ZRotation::by(alpha);
  const FieldSample fr = field_from_potential(rot, {R.apply(x), t + alpha / 1.5});
  CHECK(norm(fr.B - R.apply(ft.B)) <= 1e-6 * norm(ft.B));
  CHECK_THROWS_AS(ph.sample({x, 0.5}, false), TransientRegime);
}

TEST_CASE("period maximum") {
  const auto dip = unit_dipole();
  const auto o = dipole_oracle(dip);
  const PhasorFieldSampler ph(dip);
  const Vec3 x{0, 40, 5};
  const double t0 = steady_state_time(dip, x);
  CHECK(ph.period_max(x, t0, FieldQuantity::magnetic) ==
        doctest::Approx(cnorm(o.B(x))).epsilon(1e-6));
  const PotentialFieldSampler td(dip);
  CHECK(td.period_max(x, t0, FieldQuantity::magnetic) ==
        doctest::Approx(cnorm(o.B(x))).epsilon(1e-4));
  const cplx v[3] = {cplx(3, 0), cplx(0, 4), 0};
  CHECK(harmonic_peak(v) == doctest::Approx(4.0));
}
