// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Pass --with-interior to add the (slow) interior probe of the rotating source.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "fieldlab/errors.hpp"
#include "fieldlab/kirchhoff.hpp"
#include "fieldlab/scaling.hpp"
#include "fieldlab/sources.hpp"
#include "fieldlab/validation.hpp"
#include "oracles.hpp"

using namespace fieldlab;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return normalized(Vec3{n(rng), n(rng), n(rng)});
}

const HertzianDipoleSource dipole(1.0, 2 * kPi, 0.05);  // wavelength 1

RotatingSourceParams superluminal_params() {
  RotatingSourceParams p;
  p.mode = 5;
  p.omega = 1.5;  // pattern speed 1.5 c at the outer radius
  return p;
}
const RotatingPolarizationSource rotating(superluminal_params());

std::vector<SpacetimePoint> far_points() {
  std::mt19937_64 rng(7);
  std::vector<SpacetimePoint> pts;
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = random_direction(rng) * 50.0;
    pts.push_back({x, steady_state_time(dipole, x) + 0.37 * i});
  }
  return pts;
}

void oracle_agreement(const std::vector<SpacetimePoint>& pts, std::vector<FieldSample>& out) {
  const auto t0 = Clock::now();
  const double k = dipole.omega();
  // Far zone: B = Re[k^2 p exp(i(kr - wt)) / r] sin(theta) along phi^.
  const cplx p = oracle::smeared_moment(cplx(0, dipole.moment()), k, dipole.sigma());
  double worst = 0;
  for (const auto& q : pts) {
    const FieldSample f = field_from_potential(dipole, q);
    out.push_back(f);
    const double r = norm(q.x);
    const double sin_th = std::hypot(q.x.x, q.x.y) / r;
    const double amp = k * k * std::abs(p) * sin_th / r;
    const double far = std::abs((k * k * p * std::exp(cplx(0, k * r - k * q.t)) / r).real()) * sin_th;
    worst = std::max(worst, std::abs(norm(f.B) - far) / amp);
  }
  const double dt = seconds_since(t0);
  report(1, "dipole |B| vs far-zone formula", worst < 1e-2 && dt < 60,
         fmt("max relative error %.2e (< 1e-2) over %zu points, %.1f s (< 60 s)", worst,
             pts.size(), dt));
}

void pipeline_equivalence(const std::vector<SpacetimePoint>& pts,
                          const std::vector<FieldSample>& direct) {
  double worst = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const FieldSample s = field_source_term(dipole, pts[i]);
    worst = std::max(worst, norm(s.B - direct[i].B) / norm(direct[i].B));
  }
  report(2, "dipole source-term vs potential pipeline", worst < 1e-2,
         fmt("max relative difference %.2e (< 1e-2)", worst));
}

void gauge_invariance() {
  const Vec3 x{8, 5, 3};
  const SpacetimePoint p{x, steady_state_time(dipole, x) + 0.2};
  const auto a = retarded_potential(dipole, p);
  const RetardedPotentialSampler base(dipole, a.plan);
  const double h = default_step(dipole, x);
  const FieldSample f0 = field_from_sampler(base, p, h);
  const double l0 = lorenz_residual(base, p, h);
  std::mt19937_64 rng(11);
  double dB = 0, dL = 0;
  for (int i = 0; i < 10; ++i) {
    const double k = dipole.omega();
    const auto lam = GaugeFunction::random_plane_wave(rng, k, a.value().magnitude() / k);
    const GaugeTransformedSampler tr(base, lam);
    dB = std::max(dB, norm(field_from_sampler(tr, p, h).B - f0.B) / norm(f0.B));
    dL = std::max(dL, std::abs(lorenz_residual(tr, p, h) - l0));
  }
  report(3, "gauge invariance over 10 plane-wave gauges", dB < 1e-6 && dL < 1e-8,
         fmt("max relative dB %.2e (< 1e-6), max Lorenz change %.2e (< 1e-8)", dB, dL));
}

double shell_error(const SourceModel& src, double lambda) {
  const auto field = make_field_sampler(src);
  const Vec3 x = normalized(Vec3{1, 0.3, 0.2}) * (20 * lambda);
  const double t = boundary_steady_time(src, 40 * lambda, x) + 0.1 * lambda;
  const auto r = reconstruct_in_shell(*field, src, 10 * lambda, 40 * lambda, {x, t},
                                      surface_spec_for(src));
  const FieldSample d = field_from_potential(src, {x, t});
  return norm(r.field.B - d.B) / norm(d.B);
}

void shell_reconstruction() {
  const double ed = shell_error(dipole, 1.0);
  const double er = shell_error(rotating, 2 * kPi / rotating.angular_frequency());
  report(4, "Kirchhoff shell reconstruction", ed < 1e-2 && er < 2e-2,
         fmt("dipole %.2e (< 1e-2), superluminal %.2e (< 2e-2)", ed, er));
}

void cancellation() {
  std::string detail;
  bool ok = true;
  for (const SourceModel* s : {static_cast<const SourceModel*>(&dipole),
                               static_cast<const SourceModel*>(&rotating)}) {
    const double lambda = 2 * kPi / s->angular_frequency();
    const auto field = make_field_sampler(*s);
    const Vec3 x = normalized(Vec3{1, 0.3, 0.2}) * (60 * lambda);
    const double t0 = boundary_steady_time(*s, 40 * lambda, x);
    const double t = peak_time(*field, x, t0);
    const auto c = exterior_cancellation(*field, *s, 10 * lambda, 40 * lambda, {x, t},
                                         surface_spec_for(*s));
    const double smallest = std::min(norm(c.inner), norm(c.outer)) / c.field_scale;
    ok = ok && c.ratio < 1e-3 && smallest > 0.1;
    detail += fmt("%s%s ratio %.2e (< 1e-3), min term / |B| %.3f (> 0.1)",
                  detail.empty() ? "" : "; ", s == &dipole ? "dipole" : "superluminal", c.ratio,
                  smallest);
  }
  report(5, "exterior cancellation", ok, detail);
}

void closure() {
  const auto field = make_field_sampler(rotating);
  const double rs = rotating.support().bounding_radius();
  double worst = 0;
  for (double n : {20.0, 40.0, 80.0, 160.0}) {
    const double rb = n * rs;
    const Vec3 x = normalized(Vec3{1, 0.3, 0.05}) * (0.5 * rb);
    const double t = boundary_steady_time(rotating, rb, x) + 0.1;
    const Decomposition d = decompose_field(rotating, *field, rb, {x, t}, surface_spec_for(rotating));
    worst = std::max(worst, d.closure_error);
  }
  report(6, "superluminal decomposition closure, 20-160 support radii", worst < 2e-2,
         fmt("max closure error %.2e (< 2e-2)", worst));
}

void residuals(bool with_interior) {
  struct Probe {
    const char* name;
    const SourceModel* src;
    Vec3 x;
  };
  const StaticChargeBlob blob(1.0, 0.5);
  std::vector<Probe> probes{{"dipole interior", &dipole, {0.02, 0.01, 0.03}},
                            {"dipole exterior", &dipole, {3, -2, 4}},
                            {"blob exterior", &blob, {6, 2, -3}},
                            {"superluminal exterior", &rotating, {3, 1, 2}},
                            {"superluminal exterior", &rotating, {-2, 4, -1.5}}};
  if (with_interior) probes.push_back({"superluminal interior", &rotating, {0.75, 0.1, 0.05}});
  double worst = 0;
  std::string detail;
  for (const auto& pr : probes) {
    const double ts = steady_state_time(*pr.src, pr.x);
    const SpacetimePoint p{pr.x, std::isfinite(ts) ? ts + 0.2 : 0.0};
    const ResidualGrid g = ResidualGrid::for_probe(*pr.src, pr.x);
    double r = dalembertian_residual_A(*pr.src, p, g).residual;
    if (pr.src->peak_current() > 0 && !(with_interior && pr.src == &rotating &&
                                        rotating.support().contains(pr.x)))
      r = std::max(r, dalembertian_residual_B(*pr.src, p, g).residual);
    worst = std::max(worst, r);
    detail += fmt("%s%s %.1e", detail.empty() ? "" : ", ", pr.name, r);
  }
  report(7, "wave-equation residuals", worst < 1e-2, fmt("max %.2e (< 1e-2): ", worst) + detail);
}

void scaling() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> R;
  for (int j = 0; j < 5; ++j) R.push_back(20 * std::pow(2.0, 0.75 * j));
  double worst_planted = 0;
  for (double alpha : {-2.0, -1.0, -0.5, 0.0, 3.5}) {
    std::vector<double> y;
    for (double r : R) y.push_back(std::pow(r, alpha) * (1 + noise(rng)));
    worst_planted = std::max(worst_planted, std::abs(fit_power_law(R, y).exponent - alpha));
  }
  ok = ok && worst_planted <= 0.05;
  detail += fmt("planted max |error| %.3f (<= 0.05)", worst_planted);

  const auto dip_field = make_pipeline_sampler(dipole, Pipeline::from_potential);
  const auto ds = sweep_field(dipole, *dip_field, RadialSweep::geometric(20, std::pow(2.0, 0.75), 5));
  const double a_dip = fit_power_law(ds.sweep.radii, ds.values).exponent;
  ok = ok && std::abs(a_dip + 1) <= 0.02;
  detail += fmt("; dipole %.4f (-1 +- 0.02)", a_dip);

  const StaticChargeBlob blob(1.0, 0.5);
  const auto blob_field = make_pipeline_sampler(blob, Pipeline::from_potential);
  const auto bs = sweep_field(blob, *blob_field, RadialSweep::geometric(40, std::pow(2.0, 0.75), 5),
                              FieldQuantity::electric, false);
  const double a_c = fit_power_law(bs.sweep.radii, bs.values).exponent;
  ok = ok && std::abs(a_c + 2) <= 0.02;
  detail += fmt("; Coulomb %.4f (-2 +- 0.02)", a_c);
  report(8, "scaling harness", ok, detail);

  // Superluminal measurements: reported, not gated (apart from the run time).
  const auto t1 = Clock::now();
  const auto rot_field = make_pipeline_sampler(rotating, Pipeline::from_potential);
  ScalingStudyOptions o;
  const double rs = rotating.support().bounding_radius();
  for (int j = 0; j < 5; ++j) o.radii.push_back(20 * rs * std::pow(2.0, 0.75 * j));
  o.map_level = 5;
  o.surface = surface_spec_for(rotating);
  const ScalingStudy st = run_scaling_study(rotating, *rot_field, o);
  const double dt = seconds_since(t1);
  const char* claims[][2] = {{"field", "-1/2"},
                             {"gradient", "+7/2"},
                             {"boundary_term", "-1/2"},
                             {"solid_angle", "-4"}};
  std::printf("     superluminal beam at theta %.4f, phi %.4f (m = 5, 5 radii, level-5 mesh)\n",
              st.beam.theta, st.beam.phi);
  for (const auto& r : st.reports) {
    const char* claim = "?";
    for (const auto& c : claims)
      if (r.quantity == c[0]) claim = c[1];
    std::printf("     superluminal %-15s exponent %+.4f, 95%% CI [%+.4f, %+.4f], R^2 %.4f; claimed %s\n",
                r.quantity.c_str(), r.exponent, r.ci_low, r.ci_high, r.r_squared, claim);
  }
  std::printf("     superluminal |boundary| / |source| by radius:");
  for (double v : st.boundary_ratio) std::printf(" %.1e", v);
  std::printf("\n");
  report(8, "superluminal scaling run time", dt < 1800,
         fmt("%.1f s (< 1800 s); whole criterion %.1f s", dt, seconds_since(t0)));
}

}  // namespace

int main(int argc, char** argv) {
  bool with_interior = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--with-interior") == 0) with_interior = true;

  const auto run = [](int id, const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("threw: ") + e.what());
    }
  };
  const auto pts = far_points();
  std::vector<FieldSample> direct;
  run(1, "dipole |B| vs far-zone formula", [&] { oracle_agreement(pts, direct); });
  run(2, "dipole source-term vs potential pipeline", [&] {
    if (direct.size() != pts.size()) throw std::runtime_error("criterion 1 did not complete");
    pipeline_equivalence(pts, direct);
  });
  run(3, "gauge invariance", gauge_invariance);
  run(4, "Kirchhoff shell reconstruction", shell_reconstruction);
  run(5, "exterior cancellation", cancellation);
  run(6, "superluminal decomposition closure", closure);
  run(7, "wave-equation residuals", [&] { residuals(with_interior); });
  run(8, "scaling harness", scaling);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
