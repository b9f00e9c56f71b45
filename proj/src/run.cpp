#include "fieldlab/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "fieldlab/kirchhoff.hpp"
#include "fieldlab/parallel.hpp"
#include "fieldlab/scaling.hpp"
#include "fieldlab/validation.hpp"

namespace fieldlab {

using nlohmann::json;

namespace {

constexpr unsigned kConvergenceFlags = kFlagQuadratureNotConverged | kFlagMeshTooCoarse;

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v{n(rng), n(rng), n(rng)};
    if (norm(v) > 1e-6) return normalized(v);
  }
}

double finite_or(double t, double fallback) { return std::isfinite(t) ? t : fallback; }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Context {
 public:
  Context(const Scenario& s, std::ostream* log) : s_(s), log_(log), rng_(s.seed) {
    src_ = build_source(s.source);
    unit_ = length_unit();
    if (s.numerics.phasor && src_->harmonic())
      field_ = std::make_unique<PhasorFieldSampler>(*src_, s.numerics.quadrature);
    else
      field_ = std::make_unique<PotentialFieldSampler>(*src_, s.numerics.quadrature, s.numerics.step);
    summary_ = {{"tool", "fieldlab"},
                {"version", kVersion},
                {"run_kind", to_string(s.run)},
                {"config", to_json(s)},
                {"source",
                 {{"kind", src_->kind()},
                  {"support_radius", src_->support().bounding_radius()},
                  {"angular_frequency", src_->angular_frequency()},
                  {"pattern_speed", src_->pattern_speed()},
                  {"length_unit", unit_}}},
                {"reports", json::array()},
                {"closure", json::array()},
                {"validation", json::object()}};
  }

  RunResult run() {
    switch (s_.run) {
      case RunKind::potential: run_potential(); break;
      case RunKind::field: run_field(); break;
      case RunKind::decompose: run_decompose(); break;
      case RunKind::reconstruct: run_reconstruct(); break;
      case RunKind::cancellation: run_cancellation(); break;
      case RunKind::scaling: run_scaling(); break;
      case RunKind::validate: run_validate(); break;
    }
    RunResult r;
    r.exit_code = identity_failed_ ? kExitIdentity
                  : (flags_ & kConvergenceFlags) ? kExitConvergence
                                                 : kExitOk;
    summary_["flags"] = flags_;
    summary_["flag_names"] = describe_flags(flags_);
    summary_["identity_failed"] = identity_failed_;
    summary_["exit_code"] = r.exit_code;
    r.rows = std::move(rows_);
    r.summary = std::move(summary_);
    return r;
  }

 private:
  double length_unit() const {
    switch (s_.geometry.units) {
      case LengthUnit::absolute: return 1.0;
      case LengthUnit::support: return std::max(src_->support().bounding_radius(), 1e-300);
      case LengthUnit::wavelength: return 2 * kPi / src_->angular_frequency();
    }
    return 1.0;
  }

  void note(const std::string& msg) const {
    if (log_) *log_ << msg << '\n';
  }

  void row(const std::string& q, const SpacetimePoint& p, const Vec3& v, double err = 0,
           unsigned flags = 0) {
    rows_.push_back({q, p.x, p.t, v, err, flags});
    flags_ |= flags;
  }

  std::vector<Vec3> observation_points() {
    std::vector<Vec3> pts;
    for (const Vec3& p : s_.geometry.points) pts.push_back(p * unit_);
    for (int i = 0; i < s_.geometry.random_points; ++i)
      pts.push_back(random_direction(rng_) * (s_.geometry.point_radius * unit_));
    return pts;
  }

  double time_at(const Vec3& x) const {
    if (s_.geometry.time) return *s_.geometry.time;
    return finite_or(steady_state_time(*src_, x), 0.0);
  }

  void run_potential() {
    const auto pts = observation_points();
    std::vector<FourPotentialSample> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      out[i] = retarded_potential(*src_, {pts[i], time_at(pts[i])}, s_.numerics.quadrature);
    });
    json recs = json::array();
    for (const auto& a : out) {
      row("A0", a.at, {a.A0, 0, 0}, a.error_estimate, a.flags);
      row("A", a.at, a.A, a.error_estimate, a.flags);
      recs.push_back({{"x", vec_json(a.at.x)}, {"t", a.at.t}, {"A0", a.A0}, {"A", vec_json(a.A)},
                      {"error_estimate", a.error_estimate}, {"flags", a.flags}});
    }
    summary_["potential"] = recs;
    note("potential: " + std::to_string(pts.size()) + " points");
  }

  void run_field() {
    const auto pts = observation_points();
    std::vector<FieldSample> direct(pts.size()), source(pts.size());
    const bool curl = src_->has_analytic_curl();
    parallel_for(pts.size(), [&](std::size_t i) {
      const SpacetimePoint p{pts[i], time_at(pts[i])};
      direct[i] = field_from_potential(*src_, p, s_.numerics.quadrature, s_.numerics.step);
      if (curl) source[i] = field_source_term(*src_, p, s_.numerics.quadrature);
    });
    json recs = json::array();
    double worst = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const FieldSample& f = direct[i];
      row("B", f.at, f.B, f.error_estimate, f.flags);
      if (s_.numerics.electric && f.E) row("E", f.at, *f.E, f.error_estimate, f.flags);
      json r = {{"x", vec_json(f.at.x)}, {"t", f.at.t}, {"B", vec_json(f.B)}, {"flags", f.flags}};
      if (f.E) r["E"] = vec_json(*f.E);
      if (curl) {
        row("B_source_term", source[i].at, source[i].B, source[i].error_estimate, source[i].flags);
        const double b = norm(f.B);
        const double d = b > 0 ? norm(source[i].B - f.B) / b : norm(source[i].B);
        worst = std::max(worst, d);
        r["B_source_term"] = vec_json(source[i].B);
        r["pipeline_difference"] = d;
      }
      recs.push_back(r);
    }
    summary_["field"] = recs;
    if (curl) summary_["max_pipeline_difference"] = worst;
    note("field: " + std::to_string(pts.size()) + " points");
  }

  SurfaceSpec surface() const {
    SurfaceSpec sp = surface_spec_for(*src_);
    sp.tolerance = s_.numerics.surface_tolerance;
    sp.throw_on_coarse = false;
    return sp;
  }

  Vec3 direction() const { return normalized(s_.geometry.direction); }

  void run_decompose() {
    const auto& g = s_.geometry;
    std::vector<double> radii, ratios;
    for (double a_units : g.boundary_radii) {
      const double a = a_units * unit_;
      const Vec3 x = direction() * (g.observer_fraction * a);
      const double t =
          g.time ? *g.time
                 : peak_time(*field_, x, finite_or(boundary_steady_time(*src_, a, x), 0.0));
      const Decomposition d =
          decompose_field(*src_, *field_, a, {x, t}, surface(), s_.numerics.quadrature);
      const SpacetimePoint p{x, t};
      row("source_term", p, d.source_term, 0, d.flags);
      row("boundary_term", p, d.boundary_term, 0, d.flags);
      row("direct", p, d.direct, 0, d.flags);
      const bool ok = d.closure_error < s_.tolerances.closure;
      identity_failed_ |= !ok;
      summary_["closure"].push_back({{"boundary_radius", a},
                                     {"observer", vec_json(x)},
                                     {"t_P", t},
                                     {"inside", d.inside},
                                     {"closure_error", d.closure_error},
                                     {"boundary_ratio", d.boundary_ratio},
                                     {"tolerance", s_.tolerances.closure},
                                     {"passed", ok},
                                     {"flags", d.flags}});
      radii.push_back(a);
      ratios.push_back(d.boundary_ratio);
      note("decompose: R = " + std::to_string(a) + " closure " + sci(d.closure_error));
    }
    if (radii.size() >= 4) add_fit(radii, ratios, "boundary_term");
  }

  void add_fit(const std::vector<double>& R, const std::vector<double>& y, const std::string& q) {
    try {
      summary_["reports"].push_back(report_json(fit_power_law(R, y, q)));
    } catch (const NonPositiveSample& e) {
      summary_["reports"].push_back({{"quantity", q}, {"error", e.what()}});
    }
  }

  static json report_json(const ScalingReport& r) {
    return {{"quantity", r.quantity},   {"exponent", r.exponent}, {"std_error", r.std_error},
            {"ci_low", r.ci_low},       {"ci_high", r.ci_high},   {"confidence", r.confidence},
            {"r_squared", r.r_squared}, {"prefactor", r.prefactor}, {"r_min", r.r_min},
            {"r_max", r.r_max},         {"n", r.n}};
  }

  void run_reconstruct() {
    const auto& g = s_.geometry;
    const Vec3 x = direction() * (g.observer_radius * unit_);
    const double outer = g.outer_radius * unit_, inner = g.inner_radius * unit_;
    const double t = g.time ? *g.time : boundary_steady_time(*src_, outer, x);
    const SpacetimePoint p{x, t};
    const ShellReconstruction rec = reconstruct_in_shell(*field_, *src_, inner, outer, p, surface());
    const FieldSample direct = field_from_potential(*src_, p, s_.numerics.quadrature, s_.numerics.step);
    const double err = norm(rec.field.B - direct.B) / std::max(norm(direct.B), 1e-300);
    const bool ok = err < s_.tolerances.reconstruct;
    identity_failed_ |= !ok;
    row("reconstructed", p, rec.field.B, rec.field.error_estimate, rec.field.flags);
    row("direct", p, direct.B, direct.error_estimate, direct.flags);
    row("inner_term", p, rec.inner.value, rec.inner.error_estimate, rec.inner.flags);
    row("outer_term", p, rec.outer.value, rec.outer.error_estimate, rec.outer.flags);
    summary_["closure"].push_back({{"kind", "reconstruct"},
                                   {"inner_radius", inner},
                                   {"outer_radius", outer},
                                   {"observer", vec_json(x)},
                                   {"t_P", t},
                                   {"relative_error", err},
                                   {"tolerance", s_.tolerances.reconstruct},
                                   {"passed", ok},
                                   {"inner_nodes", {rec.inner.n_theta, rec.inner.n_phi}},
                                   {"outer_nodes", {rec.outer.n_theta, rec.outer.n_phi}}});
    note("reconstruct: relative error " + sci(err));
  }

  void run_cancellation() {
    const auto& g = s_.geometry;
    const Vec3 x = direction() * (g.observer_radius * unit_);
    const double outer = g.outer_radius * unit_, inner = g.inner_radius * unit_;
    const double t = g.time ? *g.time : peak_time(*field_, x, boundary_steady_time(*src_, outer, x));
    const SpacetimePoint p{x, t};
    const CancellationResult c = exterior_cancellation(*field_, *src_, inner, outer, p, surface());
    const double smallest = std::min(norm(c.inner), norm(c.outer));
    const bool nonvanishing = smallest > 0.1 * c.field_scale;
    const bool ok = c.ratio < s_.tolerances.cancellation && nonvanishing;
    identity_failed_ |= !ok;
    row("inner_term", p, c.inner, 0, c.flags);
    row("outer_term", p, c.outer, 0, c.flags);
    row("composite", p, c.inner + c.outer, 0, c.flags);
    summary_["closure"].push_back({{"kind", "cancellation"},
                                   {"inner_radius", inner},
                                   {"outer_radius", outer},
                                   {"observer", vec_json(x)},
                                   {"t_P", t},
                                   {"residual", c.residual},
                                   {"ratio", c.ratio},
                                   {"field_scale", c.field_scale},
                                   {"inner_over_field", norm(c.inner) / c.field_scale},
                                   {"outer_over_field", norm(c.outer) / c.field_scale},
                                   {"tolerance", s_.tolerances.cancellation},
                                   {"passed", ok}});
    note("cancellation: ratio " + sci(c.ratio));
  }

  void run_scaling() {
    const auto& w = s_.sweep;
    ScalingStudyOptions o;
    for (int j = 0; j < w.count; ++j) o.radii.push_back(w.r0 * std::pow(w.ratio, j) * unit_);
    o.search_level = s_.numerics.search_level;
    o.map_level = s_.numerics.mesh_level;
    o.threshold = w.threshold;
    o.quantity = w.quantity == "electric" ? FieldQuantity::electric : FieldQuantity::magnetic;
    const bool harmonic = src_->harmonic().has_value() && src_->angular_frequency() > 0;
    o.gradient = w.gradient && o.quantity == FieldQuantity::magnetic;
    o.solid_angle = w.solid_angle && o.quantity == FieldQuantity::magnetic;
    o.boundary = w.boundary && harmonic;
    o.surface = surface();
    o.quadrature = s_.numerics.quadrature;
    o.observer_fraction = s_.geometry.observer_fraction;
    if (!w.search) o.direction = std::make_pair(w.theta, w.phi);
    std::unique_ptr<FieldSampler> alt;
    const FieldSampler* field = field_.get();
    if (w.pipeline == "source_term_only") {
      alt = std::make_unique<SourceTermFieldSampler>(*src_, s_.numerics.quadrature);
      field = alt.get();
    }
    const ScalingStudy st = run_scaling_study(*src_, *field, o);
    flags_ |= st.flags;
    const Vec3 u = st.beam.direction();
    for (std::size_t j = 0; j < st.radii.size(); ++j) {
      const SpacetimePoint p{u * st.radii[j], finite_or(steady_state_time(*src_, st.radii[j]), 0.0)};
      if (!st.field.empty()) row("field_peak", p, {st.field[j], 0, 0});
      if (!st.gradient.empty()) row("gradient_peak", p, {st.gradient[j], 0, 0});
      if (!st.boundary_ratio.empty())
        row("boundary_ratio", p, {st.boundary_ratio[j], st.closure_error[j], 0});
      if (!st.solid_angle.empty()) row("solid_angle", p, {st.solid_angle[j], 0, 0});
    }
    for (const auto& r : st.reports) summary_["reports"].push_back(report_json(r));
    for (std::size_t j = 0; j < st.closure_error.size(); ++j) {
      const bool ok = st.closure_error[j] < s_.tolerances.closure;
      identity_failed_ |= !ok;
      summary_["closure"].push_back({{"boundary_radius", st.radii[j]},
                                     {"closure_error", st.closure_error[j]},
                                     {"boundary_ratio", st.boundary_ratio[j]},
                                     {"tolerance", s_.tolerances.closure},
                                     {"passed", ok}});
    }
    summary_["beam"] = {{"theta", st.beam.theta}, {"phi", st.beam.phi}, {"peak", st.beam.value}};
    for (const auto& r : st.reports)
      note("scaling: " + r.quantity + " exponent " + sci(r.exponent) + " +- " +
           sci(r.std_error));
  }

  void run_validate() {
    const auto& v = s_.validation;
    const double rb = src_->support().bounding_radius();
    std::vector<Vec3> exterior, interior;
    const double pr = std::max(v.probe_radius, 2 * rb);
    for (int i = 0; i < v.exterior_probes; ++i) exterior.push_back(random_direction(rng_) * pr);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const SupportRegion sup = src_->support();
    for (int i = 0; i < v.interior_probes && !sup.is_empty(); ++i) {
      for (int tries = 0; tries < 10000; ++tries) {
        const Vec3 x{(2 * u01(rng_) - 1) * sup.r_hi(), (2 * u01(rng_) - 1) * sup.r_hi(),
                     (2 * u01(rng_) - 1) * sup.z_half()};
        if (sup.contains(x) && norm(x) < 0.9 * rb) {
          interior.push_back(x);
          break;
        }
      }
    }
    json res = json::array();
    double worst = 0;
    auto probe = [&](const Vec3& x, const char* where) {
      const SpacetimePoint p{x, time_at(x)};
      const ResidualGrid grid = ResidualGrid::for_probe(*src_, x);
      const ResidualReport a = dalembertian_residual_A(*src_, p, grid, s_.numerics.quadrature);
      const ResidualReport b = dalembertian_residual_B(*src_, p, grid, s_.numerics.quadrature);
      row("residual_A", p, {a.residual, a.raw, a.scale}, 0, a.flags);
      row("residual_B", p, {b.residual, b.raw, b.scale}, 0, b.flags);
      worst = std::max({worst, a.residual, b.residual});
      res.push_back({{"where", where}, {"x", vec_json(x)}, {"t", p.t}, {"residual_A", a.residual},
                     {"residual_B", b.residual}, {"h_x", grid.h_x}, {"h_t", grid.h_t}});
      note(std::string("validate: ") + where + " probe residuals " + sci(a.residual) +
           ", " + sci(b.residual));
    };
    for (const Vec3& x : exterior) probe(x, "exterior");
    for (const Vec3& x : interior) probe(x, "interior");
    const bool residual_ok = worst < s_.tolerances.residual;

    // Gauge invariance and Lorenz condition at the first exterior probe.
    json gauge = json::object();
    bool gauge_ok = true;
    if (!exterior.empty() && v.gauge_trials > 0 && !sup.is_empty()) {
      const SpacetimePoint p{exterior.front(), time_at(exterior.front())};
      const FourPotentialSample a = retarded_potential(*src_, p, s_.numerics.quadrature);
      const RetardedPotentialSampler base(*src_, a.plan);
      const double h = s_.numerics.step > 0 ? s_.numerics.step : default_step(*src_, p.x);
      const FieldSample f0 = field_from_sampler(base, p, h);
      const double l0 = lorenz_residual(base, p, h);
      const double w = src_->angular_frequency();
      const double k = w > 0 ? w : 1.0 / norm(p.x);
      double max_dB = 0, max_dE = 0, max_dL = 0;
      for (int i = 0; i < v.gauge_trials; ++i) {
        const GaugeFunction lam =
            GaugeFunction::random_plane_wave(rng_, k, std::max(a.value().magnitude(), 1e-300) / k);
        const GaugeTransformedSampler tr(base, lam);
        const FieldSample f1 = field_from_sampler(tr, p, h);
        max_dB = std::max(max_dB, norm(f1.B - f0.B) / std::max(norm(f0.B), 1e-300));
        if (f0.E && f1.E)
          max_dE = std::max(max_dE, norm(*f1.E - *f0.E) / std::max(norm(*f0.E), 1e-300));
        max_dL = std::max(max_dL, std::abs(lorenz_residual(tr, p, h) - l0));
      }
      gauge_ok = max_dB < s_.tolerances.gauge && max_dL < 1e-8;
      gauge = {{"trials", v.gauge_trials}, {"max_relative_dB", max_dB},
               {"max_relative_dE", max_dE}, {"max_lorenz_change", max_dL},
               {"lorenz_residual", l0},     {"passed", gauge_ok}};
      row("gauge_dB", p, {max_dB, max_dE, max_dL});
    }

    json lorenz = json::array();
    double worst_lorenz = 0;
    for (int i = 0; i < v.lorenz_points && !sup.is_empty(); ++i) {
      const Vec3 x = random_direction(rng_) * pr;
      const SpacetimePoint p{x, time_at(x)};
      const LorenzResult l = lorenz_residual(*src_, p, s_.numerics.quadrature);
      const double rel = std::abs(l.dA0_dt) > 0 ? l.residual / std::abs(l.dA0_dt) : l.residual;
      worst_lorenz = std::max(worst_lorenz, rel);
      row("lorenz", p, {l.residual, l.dA0_dt, l.div_A}, 0, l.flags);
      lorenz.push_back({{"x", vec_json(x)}, {"residual", l.residual}, {"relative", rel}});
    }

    const InitialConditionReport ic =
        initial_condition_check(*src_, exterior, s_.numerics.quadrature);
    identity_failed_ |= !(residual_ok && gauge_ok && ic.passed);
    summary_["validation"] = {{"residuals", res},
                              {"max_residual", worst},
                              {"residual_tolerance", s_.tolerances.residual},
                              {"gauge", gauge},
                              {"lorenz", lorenz},
                              {"max_relative_lorenz", worst_lorenz},
                              {"initial_conditions",
                               {{"exempt", ic.exempt},
                                {"checked", ic.checked},
                                {"max_A", ic.max_A},
                                {"max_B", ic.max_B},
                                {"passed", ic.passed}}},
                              {"passed", residual_ok && gauge_ok && ic.passed}};
  }

  const Scenario& s_;
  std::ostream* log_;
  std::mt19937_64 rng_;
  SourcePtr src_;
  double unit_ = 1;
  std::unique_ptr<FieldSampler> field_;
  json summary_;
  std::vector<ResultRow> rows_;
  unsigned flags_ = 0;
  bool identity_failed_ = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* csv_header() {
  return "run_kind,quantity,R,theta,phi,t_P,value_x,value_y,value_z,err_est,flags";
}

std::string format_csv(RunKind run, const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : rows) {
    const double R = norm(r.at);
    const double theta = R > 0 ? std::acos(std::clamp(r.at.z / R, -1.0, 1.0)) : 0.0;
    const double phi = std::atan2(r.at.y, r.at.x);
    out += std::string(to_string(run)) + ',' + r.quantity + ',' + fmt(R) + ',' + fmt(theta) + ',' +
           fmt(phi) + ',' + fmt(r.t) + ',' + fmt(r.value.x) + ',' + fmt(r.value.y) + ',' +
           fmt(r.value.z) + ',' + fmt(r.err_est) + ',' + std::to_string(r.flags) + '\n';
  }
  return out;
}

RunResult run_scenario(const Scenario& s, std::ostream* log) {
  set_default_workers(resolve_workers(s.workers));
  Context ctx(s, log);
  RunResult r = ctx.run();
  namespace fs = std::filesystem;
  const fs::path dir(s.output.dir);
  fs::create_directories(dir);
  r.csv_path = (dir / s.output.csv).string();
  r.json_path = (dir / s.output.json).string();
  {
    std::ofstream f(r.csv_path, std::ios::binary);
    f << format_csv(s.run, r.rows);
    if (!f) throw Error("cannot write " + r.csv_path);
  }
  {
    std::ofstream f(r.json_path, std::ios::binary);
    f << r.summary.dump(2) << '\n';
    if (!f) throw Error("cannot write " + r.json_path);
  }
  return r;
}

}  // namespace fieldlab
