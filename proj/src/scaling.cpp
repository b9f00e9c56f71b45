#include "fieldlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "fieldlab/errors.hpp"
#include "fieldlab/parallel.hpp"

namespace fieldlab {

ScalingReport fit_power_law(std::span<const double> R, std::span<const double> y,
                            const std::string& quantity, double confidence) {
  if (R.size() != y.size()) throw std::invalid_argument("radius and sample counts differ");
  if (R.size() < 4) throw std::invalid_argument("power-law fit needs at least 4 points");
  const std::size_t n = R.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(R[i] > 0) || !(y[i] > 0))
      throw NonPositiveSample("sample " + std::to_string(i) + " is not positive (R = " +
                              std::to_string(R[i]) + ", y = " + std::to_string(y[i]) + ")");
    lx[i] = std::log(R[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0)) throw std::invalid_argument("power-law fit needs distinct radii");
  ScalingReport r;
  r.quantity = quantity;
  r.n = n;
  r.exponent = sxy / sxx;
  const double icept = my - r.exponent * mx;
  r.prefactor = std::exp(icept);
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - icept - r.exponent * lx[i];
    sse += e * e;
  }
  r.std_error = std::sqrt(sse / double(n - 2) / sxx);
  r.r_squared = syy > 0 ? 1 - sse / syy : 1.0;
  r.confidence = confidence;
  const boost::math::students_t dist(double(n - 2));
  const double tq = boost::math::quantile(dist, 0.5 + 0.5 * confidence);
  r.ci_low = r.exponent - tq * r.std_error;
  r.ci_high = r.exponent + tq * r.std_error;
  const auto [lo, hi] = std::minmax_element(R.begin(), R.end());
  r.r_min = *lo;
  r.r_max = *hi;
  return r;
}

// ---------------------------------------------------------------------------

RadialSweep RadialSweep::geometric(double r0, double ratio, int count, double theta, double phi) {
  RadialSweep s;
  s.theta = theta;
  s.phi = phi;
  for (int j = 0; j < count; ++j) s.radii.push_back(r0 * std::pow(ratio, j));
  return s;
}

Vec3 RadialSweep::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

void RadialSweep::validate(double min_radius) const {
  if (radii.size() < 4) throw std::invalid_argument("a radial sweep needs at least 4 radii");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (radii[j] < min_radius * (1 - 1e-12))
      throw std::invalid_argument("sweep radius " + std::to_string(radii[j]) +
                                  " is below the minimum " + std::to_string(min_radius));
    if (j > 0) {
      const double g = radii[j] / radii[j - 1];
      if (!(g > 1) || g > 2 * (1 + 1e-12))
        throw std::invalid_argument("successive sweep radii must grow by a ratio in (1, 2]");
    }
  }
}

Vec3 BeamPeak::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

std::unique_ptr<FieldSampler> make_pipeline_sampler(const SourceModel& src, Pipeline pipeline,
                                                    const QuadratureSpec& q) {
  if (pipeline == Pipeline::source_term_only) return std::make_unique<SourceTermFieldSampler>(src, q);
  return make_field_sampler(src, q);
}

std::vector<double> period_max_map(const FieldSampler& field, std::span<const Vec3> points,
                                   double t0, FieldQuantity q) {
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = field.period_max(points[i], t0, q); });
  return out;
}

namespace {

template <class F>
double golden_max(F f, double a, double b, int iterations, double& best_x) {
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  best_x = fc > fd ? c : d;
  return std::max(fc, fd);
}

}  // namespace

BeamPeak find_beam_peak(const FieldSampler& field, double radius, double t0, FieldQuantity q,
                        int level) {
  const SphericalBoundary mesh = SphericalBoundary::geodesic({}, radius, level);
  const auto values = period_max_map(field, mesh.nodes, t0, q);
  const std::size_t best =
      std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  BeamPeak peak;
  const Vec3 u = mesh.direction(best);
  peak.theta = std::acos(std::clamp(u.z, -1.0, 1.0));
  peak.phi = std::atan2(u.y, u.x);
  peak.value = values[best];
  // Golden-section polish, alternating theta and phi over about one cell.
  const double cell = 1.2 / double(1 << level);
  auto at = [&](double th, double ph) {
    const Vec3 d{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    return field.period_max(d * radius, t0, q);
  };
  for (int round = 0; round < 2; ++round) {
    double th = peak.theta, ph = peak.phi;
    const double lo = std::max(0.0, peak.theta - cell), hi = std::min(kPi, peak.theta + cell);
    const double v1 = golden_max([&](double t) { return at(t, peak.phi); }, lo, hi, 20, th);
    if (v1 > peak.value) {
      peak.value = v1;
      peak.theta = th;
    }
    const double w = std::sin(peak.theta) > 1e-3 ? cell / std::sin(peak.theta) : kPi;
    const double v2 = golden_max([&](double p) { return at(peak.theta, p); }, peak.phi - w,
                                 peak.phi + w, 20, ph);
    if (v2 > peak.value) {
      peak.value = v2;
      peak.phi = ph;
    }
  }
  return peak;
}

SweepSamples sweep_field(const SourceModel& src, const FieldSampler& field, RadialSweep sweep,
                         FieldQuantity q, bool search_direction) {
  sweep.validate(10 * src.support().bounding_radius());
  if (search_direction) {
    const double r0 = sweep.radii.front();
    const double ts = steady_state_time(src, r0);
    const BeamPeak b = find_beam_peak(field, r0, std::isfinite(ts) ? ts : 0.0, q);
    sweep.theta = b.theta;
    sweep.phi = b.phi;
  }
  SweepSamples out;
  out.values.resize(sweep.radii.size());
  for (std::size_t j = 0; j < sweep.radii.size(); ++j)
  {
    const double ts = steady_state_time(src, sweep.radii[j]);
    out.values[j] = field.period_max(sweep.point(j), std::isfinite(ts) ? ts : 0.0, q);
  }
  out.sweep = std::move(sweep);
  return out;
}

SweepSamples gradient_sweep(const SourceModel& src, const FieldSampler& field, RadialSweep sweep,
                            bool search_direction) {
  return sweep_field(src, field, std::move(sweep), FieldQuantity::magnetic_gradient,
                     search_direction);
}

SolidAngle beam_solid_angle(const FieldSampler& field, double radius, double t0,
                            double threshold, int level, FieldQuantity q) {
  const SphericalBoundary mesh = SphericalBoundary::geodesic({}, radius, level);
  const auto values = period_max_map(field, mesh.nodes, t0, q);
  SolidAngle out;
  out.peak = *std::max_element(values.begin(), values.end());
  if (!(out.peak > 0)) throw NonPositiveSample("field vanishes on the whole sphere");
  for (double v : values)
    if (v >= threshold * out.peak) ++out.cells;
  out.steradians = 4 * kPi * double(out.cells) / double(values.size());
  if (out.cells < 16)
    throw MeshTooCoarse("beam covers only " + std::to_string(out.cells) +
                        " mesh nodes at level " + std::to_string(level));
  return out;
}

ScalingStudy run_scaling_study(const SourceModel& src, const FieldSampler& field,
                               const ScalingStudyOptions& opts) {
  RadialSweep sweep;
  sweep.radii = opts.radii;
  sweep.validate(10 * src.support().bounding_radius());
  ScalingStudy out;
  out.radii = opts.radii;
  const double r0 = opts.radii.front();
  auto start_time = [&](double R) {
    const double t = steady_state_time(src, R);
    return std::isfinite(t) ? t : 0.0;
  };
  if (opts.direction) {
    out.beam.theta = opts.direction->first;
    out.beam.phi = opts.direction->second;
    out.beam.value = field.period_max(out.beam.direction() * r0, start_time(r0), opts.quantity);
  } else {
    out.beam = find_beam_peak(field, r0, start_time(r0), opts.quantity, opts.search_level);
  }
  const Vec3 u = out.beam.direction();
  for (double R : opts.radii) {
    const double t0 = start_time(R);
    if (opts.field) out.field.push_back(field.period_max(u * R, t0, opts.quantity));
    if (opts.gradient)
      out.gradient.push_back(field.period_max(u * R, t0, FieldQuantity::magnetic_gradient));
    if (opts.solid_angle)
      out.solid_angle.push_back(
          beam_solid_angle(field, R, t0, opts.threshold, opts.map_level).steradians);
    if (opts.boundary) {
      const Vec3 x = u * (opts.observer_fraction * R);
      const double ts = boundary_steady_time(src, R, x);
      const double t = peak_time(field, x, std::isfinite(ts) ? ts : 0.0);
      const Decomposition d = decompose_field(src, field, R, {x, t}, opts.surface, opts.quadrature);
      out.boundary_ratio.push_back(d.boundary_ratio);
      out.closure_error.push_back(d.closure_error);
      out.flags |= d.flags;
    }
  }
  auto fit = [&](const std::vector<double>& y, const char* name) {
    if (y.empty()) return;
    out.reports.push_back(fit_power_law(out.radii, y, name));
  };
  fit(out.field, "field");
  fit(out.gradient, "gradient");
  fit(out.boundary_ratio, "boundary_term");
  fit(out.solid_angle, "solid_angle");
  return out;
}

}  // namespace fieldlab
