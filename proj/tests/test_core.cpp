#include <random>

#include "doctest.h"
#include "fieldlab/errors.hpp"
#include "fieldlab/greens.hpp"
#include "fieldlab/parallel.hpp"
#include "fieldlab/quadrature.hpp"
#include "fieldlab/sources.hpp"
#include "fieldlab/volume_grid.hpp"

using namespace fieldlab;

namespace {

RotatingSourceParams superluminal() {
  RotatingSourceParams p;
  p.mode = 5;
  p.omega = 1.5;
  return p;
}

// Random point in the cylinder box of the support, padded by 20%.
Vec3 random_point(std::mt19937_64& rng, const SupportRegion& s) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double r = 1.2 * s.r_hi(), h = 1.2 * s.z_half();
  return {r * u(rng), r * u(rng), h * u(rng)};
}

double max_abs(const Vec3& v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }

}  // namespace

TEST_CASE("sources vanish before switch-on and outside the support") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.05, -1, 0.5);
  const RotatingPolarizationSource rot(superluminal());
  std::mt19937_64 rng(3);
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dip),
                               static_cast<const SourceModel*>(&rot)}) {
    const SupportRegion sup = support_bounds(*s);
    for (int i = 0; i < 500; ++i) {
      const Vec3 x = random_point(rng, sup);
      for (double t : {-3.0, -0.1, s->start_time()}) {
        CHECK(eval_current(*s, {x, t}) == Vec3{});
        CHECK(eval_charge(*s, {x, t}) == 0.0);
      }
      const double t = s->start_time() + 5.3;
      if (!sup.contains(x)) {
        CHECK(eval_current(*s, {x, t}) == Vec3{});
        CHECK(eval_charge(*s, {x, t}) == 0.0);
      }
    }
  }
}

TEST_CASE("harmonic sources are periodic once steady") {
  const RotatingPolarizationSource rot(superluminal());
  const double T = rot.period();
  const double t0 = rot.harmonic()->steady_from + 0.37;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x = random_point(rng, rot.support());
    const Vec3 a = eval_current(rot, {x, t0});
    const Vec3 b = eval_current(rot, {x, t0 + 3 * T});
    CHECK(max_abs(a - b) <= 1e-12 * rot.peak_current());
  }
  CHECK(rot.period() == doctest::Approx(2 * kPi / 7.5));
}

TEST_CASE("analytic curl agrees with finite differences") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.3);
  const RotatingPolarizationSource rot(superluminal());
  std::mt19937_64 rng(11);
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dip),
                               static_cast<const SourceModel*>(&rot)}) {
    const SupportRegion sup = s->support();
    const double h = 1e-4 * sup.r_hi();
    const double scale = s->peak_current() / s->length_scale();
    double worst = 0;
    for (int i = 0; i < 300; ++i) {
      const SpacetimePoint p{random_point(rng, sup), 2.2};
      const Vec3 a = s->analytic_curl_current(p);
      const Vec3 f = finite_difference_curl(*s, p, h);
      worst = std::max(worst, norm(a - f) / scale);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("support bounds contain every nonzero sample") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.05);
  const RotatingPolarizationSource rot(superluminal());
  const UniformBallCurrent ball({0, 0, 1}, 1.0, 0.5);
  std::mt19937_64 rng(13);
  for (const SourceModel* s :
       {static_cast<const SourceModel*>(&dip), static_cast<const SourceModel*>(&rot),
        static_cast<const SourceModel*>(&ball)}) {
    const SupportRegion sup = support_bounds(*s);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 x = random_point(rng, sup);
      const SpacetimePoint p{x, 1.7};
      if (norm(eval_current(*s, p)) > 0 || eval_charge(*s, p) != 0) CHECK(sup.contains(x));
    }
  }
  const SupportRegion c = rot.support();
  CHECK(c.kind == SupportRegion::Kind::cylinder);
  CHECK(c.bounding_radius() == doctest::Approx(std::hypot(1.0, 0.25)));
}

TEST_CASE("charge and current satisfy continuity") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.3);
  const RotatingPolarizationSource rot(superluminal());
  std::mt19937_64 rng(17);
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dip),
                               static_cast<const SourceModel*>(&rot)}) {
    const double h = 1e-5 * s->support().r_hi();
    const double scale = std::max(s->peak_charge(), s->peak_current()) / s->length_scale();
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 x = random_point(rng, s->support());
      const double t = 0.3 + 2.0 * (i % 10) / 10.0;
      double div = 0;
      for (int k = 0; k < 3; ++k) {
        Vec3 e{};
        e[k] = h;
        div += (eval_current(*s, {x + e, t})[k] - eval_current(*s, {x - e, t})[k]) / (2 * h);
      }
      const double drho = (eval_charge(*s, {x, t + h}) - eval_charge(*s, {x, t - h})) / (2 * h);
      worst = std::max(worst, std::abs(div + drho) / scale);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("curl of a current without analytic curl") {
  const UniformBallCurrent ball({0, 0, 1}, 1.0, 0.5);
  const SpacetimePoint centre{{0, 0, 0}, 2.0};
  CHECK_THROWS_AS(eval_curl_current(ball, centre), CurlUnavailable);
  CurlOptions opts;
  opts.fallback_step = 1e-3;
  CHECK(norm(eval_curl_current(ball, centre, opts)) == 0.0);
}

TEST_CASE("switch-on ramp is smooth and monotone") {
  CHECK(ramp(-1, 1) == 0.0);
  CHECK(ramp(0, 1) == 0.0);
  CHECK(ramp(1, 1) == 1.0);
  CHECK(ramp(2, 1) == 1.0);
  CHECK(ramp(0.5, 1) == doctest::Approx(0.5));
  double prev = 0;
  for (int i = 1; i <= 100; ++i) {
    const double v = ramp(i / 100.0, 1.0);
    CHECK(v >= prev);
    prev = v;
    const double h = 1e-6, t = i / 101.0;
    CHECK(ramp_rate(t, 1.0) == doctest::Approx((ramp(t + h, 1) - ramp(t - h, 1)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("retarded time") {
  CHECK(retarded_time({0, 0, 0}, {3, 4, 0}, 10.0) == doctest::Approx(5.0));
  CHECK(retarded_time({1, 1, 1}, {1, 1, 1}, 2.5) == 2.5);
  CHECK(retarded_time({0, 0, 0}, {0, 0, 6}, 10.0, 2.0) == doctest::Approx(7.0));
  const RetardedKernel g;
  CHECK(g.amplitude({0, 0, 0}, {0, 2, 0}) == doctest::Approx(0.5));
  CHECK(g.emission_time({0, 0, 0}, {0, 2, 0}, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("steady-state time") {
  const HertzianDipoleSource dip(1.0, 2 * kPi, 0.05);
  const double ts = steady_state_time(dip, Vec3{30, 0, 0});
  // Latest emission reaching x from the support must be after the switch-on.
  CHECK(ts >= 1.0 + 30.0 - dip.support().bounding_radius() - 1e-12);
  CHECK(ts <= 1.0 + 30.0 + dip.support().bounding_radius() + 1e-12);
  const StaticChargeBlob blob(1.0, 0.5);
  CHECK(std::isinf(steady_state_time(blob, Vec3{5, 0, 0})));
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 12, 40}) {
    const auto g = gauss_legendre(n);
    REQUIRE(static_cast<int>(g->nodes.size()) == n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += g->weights[i] * std::pow(g->nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("compensated summation") {
  NeumaierSum<double> s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("volume and direction rules") {
  const auto g = cylinder_grid(SupportRegion::cylinder(0.5, 1.0, 0.25), 6, 12, 4);
  double vol = 0;
  for (double w : g->w) vol += w;
  CHECK(vol == doctest::Approx(kPi * (1.0 - 0.25) * 0.5).epsilon(1e-12));
  const auto d = direction_set(8, 16);
  double sr = 0;
  for (double w : d->w) sr += w;
  CHECK(sr == doctest::Approx(4 * kPi).epsilon(1e-12));
}

TEST_CASE("parallel_for results do not depend on the worker count") {
  std::vector<double> a(1000), b(1000);
  const auto fill = [](std::vector<double>& v) {
    return [&v](std::size_t i) { v[i] = std::sin(0.1 * static_cast<double>(i)); };
  };
  parallel_for(a.size(), fill(a), 1);
  parallel_for(b.size(), fill(b), 4);
  CHECK(a == b);
}
