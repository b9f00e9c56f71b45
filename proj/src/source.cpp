#include "fieldlab/source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fieldlab/errors.hpp"

namespace fieldlab {

std::string describe_flags(unsigned flags) {
  if (flags == kFlagNone) return "";
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  };
  add(kFlagQuadratureNotConverged, "quad_not_converged");
  add(kFlagMeshTooCoarse, "mesh_too_coarse");
  add(kFlagCurlFallback, "curl_fd");
  add(kFlagIdentityFailed, "identity_failed");
  add(kFlagTransient, "transient");
  return out;
}

bool SupportRegion::contains(const Vec3& x) const {
  switch (kind) {
    case Kind::empty:
      return false;
    case Kind::ball:
      return dot(x, x) <= radius * radius;
    case Kind::cylinder: {
      const double r2 = x.x * x.x + x.y * x.y;
      return r2 <= radius * radius && r2 >= inner_radius * inner_radius &&
             std::abs(x.z) <= half_height;
    }
  }
  return false;
}

double SupportRegion::bounding_radius() const {
  switch (kind) {
    case Kind::empty:
      return 0.0;
    case Kind::ball:
      return radius;
    case Kind::cylinder:
      return std::hypot(radius, half_height);
  }
  return 0.0;
}

SupportRegion SupportRegion::united(const SupportRegion& o) const {
  if (is_empty()) return o;
  if (o.is_empty()) return *this;
  if (kind == Kind::ball && o.kind == Kind::ball) return ball(std::max(radius, o.radius));
  return cylinder(std::min(r_lo(), o.r_lo()), std::max(r_hi(), o.r_hi()),
                  std::max(z_half(), o.z_half()));
}

Vec3 SourceModel::analytic_curl_current(const SpacetimePoint&) const {
  throw CurlUnavailable(kind() + " source has no analytic curl");
}

CVec3 SourceModel::current_amplitude(const Vec3&) const {
  throw TransientRegime(kind() + " source has no harmonic form");
}
cplx SourceModel::charge_amplitude(const Vec3&) const {
  throw TransientRegime(kind() + " source has no harmonic form");
}
CVec3 SourceModel::curl_current_amplitude(const Vec3&) const {
  throw TransientRegime(kind() + " source has no harmonic form");
}

double SourceModel::angular_frequency() const {
  const auto h = harmonic();
  return h ? h->omega : 0.0;
}

double SourceModel::period() const {
  const double w = angular_frequency();
  return w > 0 ? 2 * kPi / w : 0.0;
}

double ramp(double t, double tau) {
  if (t <= 0) return 0.0;
  if (tau <= 0 || t >= tau) return 1.0;
  const double s = t / tau;
  return s * s * s * (10 + s * (-15 + 6 * s));
}

double ramp_rate(double t, double tau) {
  if (t <= 0 || tau <= 0 || t >= tau) return 0.0;
  const double s = t / tau;
  return 30 * s * s * (1 - s) * (1 - s) / tau;
}

Vec3 eval_current(const SourceModel& src, const SpacetimePoint& p) {
  if (!src.eternal() && p.t <= src.start_time()) return {};
  if (!src.support().contains(p.x)) return {};
  return src.current(p);
}

double eval_charge(const SourceModel& src, const SpacetimePoint& p) {
  if (!src.has_charge()) return 0.0;
  if (!src.eternal() && p.t <= src.start_time()) return 0.0;
  if (!src.support().contains(p.x)) return 0.0;
  return src.charge(p);
}

Vec3 finite_difference_curl(const SourceModel& src, const SpacetimePoint& p, double h) {
  Mat3 d{};  // d[i][j] = d_i j_j
  for (int i = 0; i < 3; ++i) {
    SpacetimePoint a = p, b = p;
    a.x[i] += h;
    b.x[i] -= h;
    const Vec3 ja = eval_current(src, a), jb = eval_current(src, b);
    for (int j = 0; j < 3; ++j) d[i][j] = (ja[j] - jb[j]) / (2 * h);
  }
  return {d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]};
}

Vec3 eval_curl_current(const SourceModel& src, const SpacetimePoint& p, const CurlOptions& opts) {
  if (src.has_analytic_curl()) {
    if (!src.eternal() && p.t <= src.start_time()) return {};
    if (!src.support().contains(p.x)) return {};
    return src.analytic_curl_current(p);
  }
  if (!opts.fallback_step) throw CurlUnavailable(src.kind() + ": no analytic curl and no fallback step");
  return finite_difference_curl(src, p, *opts.fallback_step);
}

SupportRegion support_bounds(const SourceModel& src) { return src.support(); }

double steady_state_time(const SourceModel& src, double reach) {
  if (src.eternal()) return -std::numeric_limits<double>::infinity();
  const auto h = src.harmonic();
  const double from = h ? h->steady_from : src.start_time() + src.switch_on_duration();
  return from + reach + src.support().bounding_radius();
}

double steady_state_time(const SourceModel& src, const Vec3& x) {
  return steady_state_time(src, norm(x));
}

}  // namespace fieldlab
