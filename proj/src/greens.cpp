#include "fieldlab/greens.hpp"

#include <cmath>
#include <limits>

#include "fieldlab/errors.hpp"
#include "fieldlab/quadrature.hpp"
#include "fieldlab/volume_grid.hpp"

namespace fieldlab {

double retarded_time(const Vec3& x_P, const Vec3& x, double t_P, double c) {
  return t_P - norm(x_P - x) / c;
}

bool FourPotentialSample::converged() const { return !(flags & kFlagQuadratureNotConverged); }

namespace {

struct Accumulator {
  NeumaierSum<double> a0, ax, ay, az;

  void add(double w, double rho, const Vec3& j) {
    a0.add(w * rho);
    ax.add(w * j.x);
    ay.add(w * j.y);
    az.add(w * j.z);
  }
  FourPotential value() const { return {a0.value(), {ax.value(), ay.value(), az.value()}}; }
};

template <class Density>
FourPotential integrate_cylindrical(const SourceModel& src, const SpacetimePoint& p,
                                    const QuadraturePlan& plan, const Density& f) {
  const auto grid = cylinder_grid(src.support(), plan.n_r, plan.n_phi, plan.n_z);
  const bool eternal = src.eternal();
  const double t0 = src.start_time();
  Accumulator acc;
  for (std::size_t i = 0; i < grid->x.size(); ++i) {
    const Vec3& x = grid->x[i];
    const double R = norm(p.x - x);
    if (R == 0) continue;
    const double t = p.t - R;
    if (!eternal && t <= t0) continue;
    const FourPotential v = f(SpacetimePoint{x, t});
    acc.add(grid->w[i] / R, v.A0, v.A);
  }
  return acc.value();
}

// Parameter intervals [s0, s1] (s >= 0) where x + s n lies in the support.
// For annular cylinders the ray is clipped exactly so every Gauss segment
// sees an integrand that is smooth up to its ends.
int ray_segments(const SupportRegion& reg, const Vec3& x, const Vec3& n,
                 std::array<std::pair<double, double>, 2>& seg) {
  auto clip = [](double lo, double hi, double a, double b) {
    return std::pair<double, double>{std::max(lo, a), std::min(hi, b)};
  };
  if (reg.kind == SupportRegion::Kind::ball) {
    const double b = dot(x, n), c = dot(x, x) - reg.radius * reg.radius, disc = b * b - c;
    if (disc <= 0) return 0;
    const double lo = std::max(0.0, -b - std::sqrt(disc)), hi = -b + std::sqrt(disc);
    if (hi <= lo) return 0;
    seg[0] = {lo, hi};
    return 1;
  }
  // rho^2(s) = a s^2 + 2 b s + c over the horizontal components.
  const double a = n.x * n.x + n.y * n.y, b = x.x * n.x + x.y * n.y, c = x.x * x.x + x.y * x.y;
  double lo = 0, hi = std::numeric_limits<double>::infinity();
  // |z| <= half_height
  if (std::abs(n.z) > 0) {
    double z1 = (-reg.half_height - x.z) / n.z, z2 = (reg.half_height - x.z) / n.z;
    if (z1 > z2) std::swap(z1, z2);
    lo = std::max(lo, z1);
    hi = std::min(hi, z2);
  } else if (std::abs(x.z) > reg.half_height) {
    return 0;
  }
  auto roots = [&](double r, double& s1, double& s2) {
    if (a <= 0) return false;
    const double disc = b * b - a * (c - r * r);
    if (disc <= 0) return false;
    s1 = (-b - std::sqrt(disc)) / a;
    s2 = (-b + std::sqrt(disc)) / a;
    return true;
  };
  double o1, o2;
  if (a <= 0) {
    if (c > reg.radius * reg.radius || c < reg.inner_radius * reg.inner_radius) return 0;
  } else {
    if (!roots(reg.radius, o1, o2)) return 0;
    lo = std::max(lo, o1);
    hi = std::min(hi, o2);
  }
  if (!(hi > lo)) return 0;
  double i1, i2;
  int k = 0;
  if (reg.inner_radius > 0 && a > 0 && roots(reg.inner_radius, i1, i2)) {
    for (const auto& part : {clip(lo, hi, lo, i1), clip(lo, hi, i2, hi)})
      if (part.second > part.first) seg[k++] = part;
  } else {
    seg[k++] = {lo, hi};
  }
  return k;
}

template <class Density>
FourPotential integrate_observer_centered(const SourceModel& src, const SpacetimePoint& p,
                                          const QuadraturePlan& plan, const Density& f) {
  const SupportRegion reg = src.support();
  const auto dirs = direction_set(plan.n_z, plan.n_phi);
  const auto radial = gauss_legendre(plan.n_r);
  const bool eternal = src.eternal();
  const double t0 = src.start_time();
  Accumulator acc;
  std::array<std::pair<double, double>, 2> seg;
  for (std::size_t k = 0; k < dirs->n.size(); ++k) {
    const Vec3& n = dirs->n[k];
    const int ns = ray_segments(reg, p.x, n, seg);
    for (int g = 0; g < ns; ++g) {
      const double sm = 0.5 * (seg[g].first + seg[g].second);
      const double sh = 0.5 * (seg[g].second - seg[g].first);
      for (int i = 0; i < plan.n_r; ++i) {
        const double s = sm + sh * radial->nodes[i];
        const double t = p.t - s;
        if (!eternal && t <= t0) continue;
        const FourPotential v = f(SpacetimePoint{p.x + s * n, t});
        // s^2 ds dOmega / s
        acc.add(dirs->w[k] * sh * radial->weights[i] * s, v.A0, v.A);
      }
    }
  }
  return acc.value();
}

template <class Density>
FourPotential dispatch(const SourceModel& src, const SpacetimePoint& p, const QuadraturePlan& plan,
                       const Density& f) {
  if (src.support().is_empty()) return {};
  if (plan.method == QuadratureMethod::observer_centered)
    return integrate_observer_centered(src, p, plan, f);
  return integrate_cylindrical(src, p, plan, f);
}

template <class Density>
FourPotentialSample refine(const SourceModel& src, const SpacetimePoint& p,
                           const QuadratureSpec& q, const Density& f) {
  FourPotentialSample out;
  out.at = p;
  QuadraturePlan plan = initial_plan(src, p.x, q);
  FourPotential prev = dispatch(src, p, plan, f);
  FourPotential cur = prev;
  double diff = 0;
  bool converged = src.support().is_empty() || q.max_refinements <= 0;
  for (int level = 1; level <= q.max_refinements && !converged; ++level) {
    const QuadraturePlan next = plan.refined(1);
    cur = dispatch(src, p, next, f);
    FourPotential delta = cur;
    delta.A0 -= prev.A0;
    delta.A -= prev.A;
    diff = delta.magnitude();
    plan = next;
    prev = cur;
    converged = diff <= q.tolerance * cur.magnitude();
  }
  out.A0 = cur.A0;
  out.A = cur.A;
  out.error_estimate = diff;
  out.plan = plan;
  if (!converged) out.flags |= kFlagQuadratureNotConverged;
  return out;
}

struct PotentialDensity {
  const SourceModel& src;
  bool charged;
  FourPotential operator()(const SpacetimePoint& q) const {
    return {charged ? src.charge(q) : 0.0, src.current(q)};
  }
};

}  // namespace

QuadraturePlan initial_plan(const SourceModel& src, const Vec3& x_P, const QuadratureSpec& q) {
  QuadraturePlan plan{q.method, std::max(2, q.n_r), std::max(2, q.n_phi), std::max(2, q.n_z)};
  const double rb = src.support().bounding_radius();
  if (plan.method == QuadratureMethod::automatic)
    plan.method = norm(x_P) < rb ? QuadratureMethod::observer_centered
                                 : QuadratureMethod::source_cylindrical;
  int m = 0;
  if (const auto h = src.harmonic()) m = h->azimuthal_order;
  const double bandwidth = m + src.angular_frequency() * rb;
  plan.n_phi = std::max(plan.n_phi, 2 * static_cast<int>(std::ceil(bandwidth)) + 8);
  // About 1.5 Gauss nodes per feature length across the box.
  const SupportRegion s = src.support();
  if (!s.is_empty()) {
    const double ell = src.length_scale();
    auto nodes_for = [&](double extent) { return static_cast<int>(std::ceil(1.5 * extent / ell)) + 4; };
    plan.n_r = std::max(plan.n_r, nodes_for(s.r_hi() - s.r_lo()));
    plan.n_z = std::max(plan.n_z, nodes_for(2 * s.z_half()));
  }
  return plan;
}

FourPotential integrate_potential(const SourceModel& src, const SpacetimePoint& p,
                                  const QuadraturePlan& plan) {
  return dispatch(src, p, plan, PotentialDensity{src, src.has_charge()});
}

FourPotential integrate_retarded(const SourceModel& src, const SpacetimePoint& p,
                                 const QuadraturePlan& plan, const RetardedDensity& f) {
  return dispatch(src, p, plan, f);
}

FourPotentialSample integrate_retarded(const SourceModel& src, const SpacetimePoint& p,
                                       const QuadratureSpec& q, const RetardedDensity& f) {
  return refine(src, p, q, f);
}

FourPotentialSample retarded_potential(const SourceModel& src, const SpacetimePoint& p,
                                       const QuadratureSpec& q) {
  return refine(src, p, q, PotentialDensity{src, src.has_charge()});
}

PotentialJacobian differentiate_potential(const PotentialSampler& sampler, const SpacetimePoint& p,
                                          double h, double h_t) {
  PotentialJacobian J;
  J.center = sampler(p);
  auto as_array = [](const FourPotential& f) {
    return std::array<double, 4>{f.A0, f.A.x, f.A.y, f.A.z};
  };
  for (int k = 0; k < 4; ++k) {
    const double s = k < 3 ? h : h_t;
    auto shifted = [&](double d) {
      SpacetimePoint q = p;
      if (k < 3)
        q.x[k] += d;
      else
        q.t += d;
      return as_array(sampler(q));
    };
    const auto fp = shifted(s), fm = shifted(-s), hp = shifted(0.5 * s), hm = shifted(-0.5 * s);
    for (int mu = 0; mu < 4; ++mu) {
      const double d1 = (fp[mu] - fm[mu]) / (2 * s);
      const double d2 = (hp[mu] - hm[mu]) / s;
      J.d[k][mu] = (4 * d2 - d1) / 3;
      J.error_estimate = std::max(J.error_estimate, std::abs(d2 - d1));
    }
  }
  return J;
}

double default_step(const SourceModel& src, const Vec3& x_P) {
  const double rb = src.support().bounding_radius();
  const double dist = norm(x_P) - rb;
  double scale = dist > 0 ? std::max(dist, src.length_scale()) : src.length_scale();
  const double w = src.angular_frequency();
  if (w > 0) scale = std::min(scale, 1.0 / w);
  return 1e-3 * scale;
}

PotentialJacobian potential_jacobian(const SourceModel& src, const SpacetimePoint& p,
                                     const QuadratureSpec& q, double h) {
  const FourPotentialSample s = retarded_potential(src, p, q);
  if (!(h > 0)) h = default_step(src, p.x);
  RetardedPotentialSampler sampler(src, s.plan);
  PotentialJacobian J = differentiate_potential(sampler, p, h, h);
  J.flags |= s.flags;
  J.plan = s.plan;
  return J;
}

}  // namespace fieldlab
