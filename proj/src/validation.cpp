#include "fieldlab/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fieldlab/errors.hpp"

namespace fieldlab {

namespace {

constexpr double kFourPi = 4 * kPi;

// Fourth-order central second derivative from samples at -2h..2h.
template <class T>
T second_difference(const T& m2, const T& m1, const T& c, const T& p1, const T& p2, double h) {
  return ((m1 + p1) * 16.0 - (m2 + p2) - c * 30.0) / (12 * h * h);
}

SpacetimePoint shifted(const SpacetimePoint& p, int axis, double d) {
  SpacetimePoint q = p;
  if (axis < 3)
    q.x[axis] += d;
  else
    q.t += d;
  return q;
}

// box f = laplacian f - d2f/dt2 on the axis stencils of the 5^4 block.
template <class T, class F>
T box(const F& f, const SpacetimePoint& p, const ResidualGrid& g) {
  const T c = f(p);
  T lap{};
  for (int axis = 0; axis < 4; ++axis) {
    const double h = axis < 3 ? g.h_x : g.h_t;
    const T d2 = second_difference(f(shifted(p, axis, -2 * h)), f(shifted(p, axis, -h)), c,
                                   f(shifted(p, axis, h)), f(shifted(p, axis, 2 * h)), h);
    if (axis < 3)
      lap = lap + d2;
    else
      lap = lap - d2;
  }
  return lap;
}

struct Four {
  std::array<double, 4> v{};
  Four operator+(const Four& o) const {
    Four r;
    for (int i = 0; i < 4; ++i) r.v[i] = v[i] + o.v[i];
    return r;
  }
  Four operator-(const Four& o) const {
    Four r;
    for (int i = 0; i < 4; ++i) r.v[i] = v[i] - o.v[i];
    return r;
  }
  Four operator*(double s) const {
    Four r;
    for (int i = 0; i < 4; ++i) r.v[i] = v[i] * s;
    return r;
  }
  Four operator/(double s) const { return *this * (1.0 / s); }
};

Four as_four(const FourPotential& a) { return {{a.A0, a.A.x, a.A.y, a.A.z}}; }

bool probe_inside(const SourceModel& src, const Vec3& x) {
  return !src.support().is_empty() && norm(x) < src.support().bounding_radius();
}

}  // namespace

ResidualGrid ResidualGrid::for_probe(const SourceModel& src, const Vec3& x) {
  const double h = 100 * default_step(src, x);
  return {h, 0.5 * h};
}

void ResidualGrid::validate() const {
  if (!(h_x > 0) || !(h_t > 0)) throw std::invalid_argument("stencil spacings must be positive");
  if (h_t > 0.5 * h_x * (1 + 1e-12))
    throw std::invalid_argument("time spacing must not exceed half the space spacing");
}

ResidualReport dalembertian_residual_A(const SourceModel& src, const SpacetimePoint& probe,
                                       const ResidualGrid& grid, const QuadratureSpec& q) {
  grid.validate();
  ResidualReport out;
  out.inside = probe_inside(src, probe.x);
  if (src.support().is_empty()) return out;
  const FourPotentialSample s = retarded_potential(src, probe, q);
  out.flags = s.flags;
  const RetardedPotentialSampler pot(src, s.plan);
  const auto f = [&](const SpacetimePoint& p) { return as_four(pot(p)); };
  const Four b = box<Four>(f, probe, grid);
  const double rho = src.has_charge() ? eval_charge(src, probe) : 0.0;
  const Vec3 j = eval_current(src, probe);
  const std::array<double, 4> rhs{rho, j.x, j.y, j.z};
  for (int mu = 0; mu < 4; ++mu) {
    out.components[mu] = std::abs(b.v[mu] + kFourPi * rhs[mu]);
    out.raw = std::max(out.raw, out.components[mu]);
  }
  const double w = src.angular_frequency();
  if (out.inside) {
    out.scale = kFourPi * std::max(src.peak_current(), src.peak_charge());
  } else if (w > 0) {
    const double quarter = 0.5 * kPi / w;
    const double a1 = s.value().magnitude(), a2 = pot({probe.x, probe.t + quarter}).magnitude();
    out.scale = std::hypot(a1, a2) * w * w;
  } else {
    const double r = norm(probe.x);
    out.scale = s.value().magnitude() / (r * r);
  }
  out.residual = out.scale > 0 ? out.raw / out.scale : out.raw;
  return out;
}

namespace {

ResidualReport residual_B(const SourceModel& src, const SpacetimePoint& probe,
                          const ResidualGrid& grid,
                          const std::function<Vec3(const SpacetimePoint&)>& B) {
  ResidualReport out;
  out.inside = probe_inside(src, probe.x);
  const Vec3 b = box<Vec3>(B, probe, grid);
  Vec3 curl;
  if (!src.support().is_empty()) {
    CurlOptions opts;
    if (!src.has_analytic_curl()) opts.fallback_step = 1e-4 * src.length_scale();
    curl = eval_curl_current(src, probe, opts);
  }
  for (int k = 0; k < 3; ++k) {
    out.components[k] = std::abs(b[k] + kFourPi * curl[k]);
    out.raw = std::max(out.raw, out.components[k]);
  }
  const double w = src.angular_frequency();
  if (out.inside) {
    out.scale = kFourPi * src.peak_current() / src.length_scale();
  } else if (w > 0) {
    const double quarter = 0.5 * kPi / w;
    out.scale = std::hypot(norm(B(probe)), norm(B({probe.x, probe.t + quarter}))) * w * w;
  } else {
    const double r = norm(probe.x);
    out.scale = norm(B(probe)) / (r * r);
  }
  out.residual = out.scale > 0 ? out.raw / out.scale : out.raw;
  return out;
}

}  // namespace

ResidualReport dalembertian_residual_B(const SourceModel& src, const SpacetimePoint& probe,
                                       const ResidualGrid& grid, const QuadratureSpec& q) {
  grid.validate();
  if (src.support().is_empty()) return {};
  const FourPotentialSample s = retarded_potential(src, probe, q);
  const RetardedPotentialSampler pot(src, s.plan);
  // Inner differentiation step well below the stencil spacing.
  const double h = std::min(default_step(src, probe.x), 1e-2 * grid.h_t);
  ResidualReport out = residual_B(src, probe, grid, [&](const SpacetimePoint& p) {
    return differentiate_potential(pot, p, h, h).curl_A();
  });
  out.flags |= s.flags;
  return out;
}

ResidualReport dalembertian_residual_B(const SourceModel& src, const FieldSampler& field,
                                       const SpacetimePoint& probe, const ResidualGrid& grid) {
  grid.validate();
  unsigned flags = 0;
  ResidualReport out = residual_B(src, probe, grid, [&](const SpacetimePoint& p) {
    const FieldSample f = field.sample(p, false);
    flags |= f.flags;
    return f.B;
  });
  out.flags |= flags;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double distance_to_support(const SupportRegion& s, const Vec3& x) {
  switch (s.kind) {
    case SupportRegion::Kind::empty:
      return std::numeric_limits<double>::infinity();
    case SupportRegion::Kind::ball:
      return std::max(0.0, norm(x) - s.radius);
    case SupportRegion::Kind::cylinder: {
      const double rho = std::hypot(x.x, x.y);
      const double dr = rho < s.inner_radius ? s.inner_radius - rho
                        : rho > s.radius     ? rho - s.radius
                                             : 0.0;
      const double dz = std::max(0.0, std::abs(x.z) - s.half_height);
      return std::hypot(dr, dz);
    }
  }
  return 0.0;
}

}  // namespace

InitialConditionReport initial_condition_check(const SourceModel& src,
                                               std::span<const Vec3> points,
                                               const QuadratureSpec& q) {
  InitialConditionReport out;
  if (src.eternal()) {
    out.exempt = true;
    return out;
  }
  const double rb = std::max(src.support().bounding_radius(), src.length_scale());
  out.scale = std::max(src.peak_current(), src.peak_charge()) * rb;
  const double t0 = src.start_time();
  const double times[2] = {t0, t0 + 0.1 * src.switch_on_duration()};
  for (const Vec3& x : points) {
    const double d = distance_to_support(src.support(), x);
    for (double t : times) {
      if (!(d > t - t0)) continue;  // inside a forward light cone
      const FourPotentialSample a = retarded_potential(src, {x, t}, q);
      const FieldSample f = field_from_potential(src, {x, t}, q);
      out.max_A = std::max(out.max_A, a.value().magnitude());
      out.max_B = std::max(out.max_B, norm(f.B));
      ++out.checked;
    }
  }
  const double bound = 1e-10 * out.scale;
  out.passed = out.max_A <= bound && out.max_B <= bound;
  return out;
}

OnsetReport light_cone_onset(const SourceModel& src, const Vec3& x, double h_t,
                             const QuadratureSpec& q) {
  if (!(h_t > 0)) throw std::invalid_argument("onset resolution must be positive");
  OnsetReport out;
  out.expected = src.start_time() + distance_to_support(src.support(), x);
  // A fixed plan keeps the node set identical across the bisection.
  const QuadraturePlan plan =
      retarded_potential(src, {x, out.expected + 10 * h_t + src.switch_on_duration()}, q).plan;
  auto mag = [&](double t) { return integrate_potential(src, {x, t}, plan).magnitude(); };
  out.before = mag(out.expected - h_t);
  double lo = out.expected - h_t, hi = out.expected + 10 * h_t;
  while (!(mag(hi) > 0) && hi < out.expected + 1e3 * h_t) hi += 10 * h_t;
  while (hi - lo > 0.01 * h_t) {
    const double mid = 0.5 * (lo + hi);
    if (mag(mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  out.measured = hi;
  out.after = mag(out.measured + h_t);
  return out;
}

}  // namespace fieldlab
