#include "fieldlab/kirchhoff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "fieldlab/errors.hpp"
#include "fieldlab/quadrature.hpp"

namespace fieldlab {

namespace {

constexpr double kFourPi = 4 * kPi;

void orient(SphericalBoundary& b) {
  b.normals.resize(b.nodes.size());
  const double s = b.outward ? 1.0 : -1.0;
  for (std::size_t i = 0; i < b.nodes.size(); ++i) b.normals[i] = b.direction(i) * s;
}

}  // namespace

SphericalBoundary SphericalBoundary::gauss_product(const Vec3& center, double radius, int n_theta,
                                                   int n_phi, bool outward) {
  if (!(radius > 0) || n_theta < 1 || n_phi < 1)
    throw std::invalid_argument("sphere rule needs positive radius and node counts");
  SphericalBoundary b;
  b.center = center;
  b.radius = radius;
  b.outward = outward;
  b.n_theta = n_theta;
  b.n_phi = n_phi;
  const auto gl = gauss_legendre(n_theta);
  const double dphi = 2 * kPi / n_phi;
  b.nodes.reserve(std::size_t(n_theta) * n_phi);
  b.weights.reserve(std::size_t(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl->nodes[i], st = std::sqrt(std::max(0.0, 1 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      b.nodes.push_back(center + Vec3{st * std::cos(phi), st * std::sin(phi), ct} * radius);
      b.weights.push_back(radius * radius * gl->weights[i] * dphi);
    }
  }
  orient(b);
  return b;
}

SphericalBoundary SphericalBoundary::geodesic(const Vec3& center, double radius, int level,
                                              bool outward) {
  if (!(radius > 0) || level < 0 || level > 9)
    throw std::invalid_argument("geodesic level must lie in [0, 9]");
  const double t = 0.5 * (1 + std::sqrt(5.0));
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = normalized(p);
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(normalized(v[a] + v[b]));
      const int id = int(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> g;
    g.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]),
                c = midpoint(tri[2], tri[0]);
      g.push_back({tri[0], a, c});
      g.push_back({tri[1], b, a});
      g.push_back({tri[2], c, b});
      g.push_back({a, b, c});
    }
    f = std::move(g);
  }
  SphericalBoundary b;
  b.center = center;
  b.radius = radius;
  b.outward = outward;
  b.level = level;
  const double w = kFourPi * radius * radius / double(v.size());
  for (const auto& p : v) {
    b.nodes.push_back(center + p * radius);
    b.weights.push_back(w);
  }
  orient(b);
  return b;
}

SphericalBoundary SphericalBoundary::flipped() const {
  SphericalBoundary b = *this;
  b.outward = !outward;
  for (auto& n : b.normals) n = -n;
  return b;
}

double SphericalBoundary::total_weight() const {
  NeumaierSum<double> s;
  for (double w : weights) s.add(w);
  return s.value();
}

// ---------------------------------------------------------------------------

BoundaryFieldData sample_boundary(const FieldSampler& field, const SphericalBoundary& bnd,
                                  const Vec3& x_P, double t_P, int component) {
  if (component < 0 || component > 2) throw std::invalid_argument("component must be 0, 1 or 2");
  std::vector<SpacetimePoint> pts(bnd.size());
  for (std::size_t i = 0; i < bnd.size(); ++i)
    pts[i] = {bnd.nodes[i], t_P - norm(x_P - bnd.nodes[i])};
  const auto fs = field.sample_batch(pts, true);
  BoundaryFieldData d;
  d.value.resize(bnd.size());
  d.normal_derivative.resize(bnd.size());
  d.time_derivative.resize(bnd.size());
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    if (!fs[i].gradB || !fs[i].dBdt) throw Error("field sampler returned no derivatives");
    const Mat3& g = *fs[i].gradB;
    const Vec3& n = bnd.normals[i];
    d.value[i] = fs[i].B[component];
    d.normal_derivative[i] =
        n.x * g[0][component] + n.y * g[1][component] + n.z * g[2][component];
    d.time_derivative[i] = (*fs[i].dBdt)[component];
  }
  return d;
}

double collapsed_kirchhoff_contribution(const BoundaryFieldData& data,
                                        const SphericalBoundary& bnd, const Vec3& x_P) {
  const std::size_t n = bnd.size();
  if (data.value.size() != n || data.normal_derivative.size() != n ||
      data.time_derivative.size() != n)
    throw std::invalid_argument("boundary data do not match the mesh");
  if (std::abs(norm(x_P - bnd.center) - bnd.radius) <= 1e-12 * bnd.radius)
    throw GeometryViolation("observation point lies on the boundary");
  NeumaierSum<double> sum;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = bnd.nodes[i] - x_P;
    const double R = norm(d);
    const double ns = dot(bnd.normals[i], d) / R;
    sum.add(bnd.weights[i] * (data.normal_derivative[i] / R +
                              ns * (data.value[i] / (R * R) + data.time_derivative[i] / R)));
  }
  return sum.value() / kFourPi;
}

// ---------------------------------------------------------------------------

SurfaceSpec surface_spec_for(const SourceModel& src) {
  SurfaceSpec s;
  s.wavenumber = src.angular_frequency();
  s.source_radius = src.support().bounding_radius();
  if (const auto h = src.harmonic()) s.azimuthal_order = std::abs(h->azimuthal_order);
  return s;
}

std::pair<int, int> surface_rule_size(double radius, double observer_distance,
                                      const SurfaceSpec& spec) {
  if (spec.n_theta > 0 && spec.n_phi > 0) return {spec.n_theta, spec.n_phi};
  const double gap = std::abs(observer_distance - radius);
  const double L = spec.wavenumber * std::min(radius, observer_distance) +
                   spec.wavenumber * spec.source_radius + spec.azimuthal_order +
                   8 * radius / std::max(gap, 1e-12 * radius) + 16;
  const int n_theta = int(std::ceil(0.625 * L)) + 4;
  int n_phi = int(std::ceil(L)) + 32;
  n_phi += n_phi % 2;
  return {n_theta, n_phi};
}

namespace {

struct RuleResult {
  Vec3 value;
  unsigned flags = 0;
  std::size_t evaluations = 0;
};

// Streams the product rule in chunks of latitude rings so memory stays bounded
// and each chunk's samples are evaluated as one batch.
RuleResult integrate_rule(const FieldSampler& field, const Vec3& center, double radius,
                          bool outward, const SpacetimePoint& p, int n_theta, int n_phi) {
  const auto gl = gauss_legendre(n_theta);
  const double dphi = 2 * kPi / n_phi;
  const double sign = outward ? 1.0 : -1.0;
  const int rings_per_chunk = std::max(1, 32768 / n_phi);
  std::vector<double> cphi(n_phi), sphi(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    cphi[j] = std::cos((j + 0.5) * dphi);
    sphi[j] = std::sin((j + 0.5) * dphi);
  }
  std::array<NeumaierSum<double>, 3> sum;
  RuleResult out;
  std::vector<SpacetimePoint> pts;
  std::vector<Vec3> dirs;
  for (int i0 = 0; i0 < n_theta; i0 += rings_per_chunk) {
    const int i1 = std::min(n_theta, i0 + rings_per_chunk);
    pts.clear();
    dirs.clear();
    for (int i = i0; i < i1; ++i) {
      const double ct = gl->nodes[i], st = std::sqrt(std::max(0.0, 1 - ct * ct));
      for (int j = 0; j < n_phi; ++j) {
        const Vec3 u{st * cphi[j], st * sphi[j], ct};
        const Vec3 x = center + u * radius;
        dirs.push_back(u);
        pts.push_back({x, p.t - norm(p.x - x)});
      }
    }
    const auto fs = field.sample_batch(pts, true);
    out.evaluations += fs.size();
    std::size_t k = 0;
    for (int i = i0; i < i1; ++i) {
      std::array<NeumaierSum<double>, 3> ring;
      for (int j = 0; j < n_phi; ++j, ++k) {
        const FieldSample& f = fs[k];
        if (!f.gradB || !f.dBdt) throw Error("field sampler returned no derivatives");
        out.flags |= f.flags;
        const Vec3 n = dirs[k] * sign;
        const Vec3 d = pts[k].x - p.x;
        const double R = norm(d);
        const double ns = dot(n, d) / R;
        const Mat3& g = *f.gradB;
        for (int c = 0; c < 3; ++c) {
          const double dn = n.x * g[0][c] + n.y * g[1][c] + n.z * g[2][c];
          ring[c].add(dn / R + ns * (f.B[c] / (R * R) + (*f.dBdt)[c] / R));
        }
      }
      const double w = radius * radius * gl->weights[i] * dphi;
      for (int c = 0; c < 3; ++c) sum[c].add(w * ring[c].value());
    }
  }
  out.value = Vec3{sum[0].value(), sum[1].value(), sum[2].value()} / kFourPi;
  return out;
}

}  // namespace

SurfaceTerm boundary_term(const FieldSampler& field, const Vec3& center, double radius,
                          bool outward, const SpacetimePoint& p, const SurfaceSpec& spec) {
  const double dist = norm(p.x - center);
  if (std::abs(dist - radius) <= 1e-12 * radius)
    throw GeometryViolation("observation point lies on the boundary");
  const auto [n_theta, n_phi] = surface_rule_size(radius, dist, spec);
  SurfaceTerm out;
  const RuleResult coarse = integrate_rule(field, center, radius, outward, p, n_theta, n_phi);
  out.value = coarse.value;
  out.flags = coarse.flags;
  out.evaluations = coarse.evaluations;
  out.n_theta = n_theta;
  out.n_phi = n_phi;
  if (!spec.check_refinement) return out;

  const RuleResult fine = integrate_rule(field, center, radius, outward, p, 2 * n_theta, 2 * n_phi);
  out.error_estimate = norm(fine.value - coarse.value);
  out.value = fine.value;
  out.flags |= fine.flags;
  out.evaluations += fine.evaluations;
  out.n_theta = 2 * n_theta;
  out.n_phi = 2 * n_phi;
  const double scale = std::max(norm(fine.value), spec.field_scale);
  if (out.error_estimate > spec.tolerance * scale && scale > 0) {
    out.flags |= kFlagMeshTooCoarse;
    if (spec.throw_on_coarse)
      throw MeshTooCoarse("surface integral changed by " + std::to_string(out.error_estimate) +
                          " (relative " + std::to_string(out.error_estimate / scale) +
                          ") under doubling");
  }
  return out;
}

// ---------------------------------------------------------------------------

ShellReconstruction reconstruct_in_shell(const FieldSampler& field, const SourceModel& src,
                                         double r_inner, double r_outer, const SpacetimePoint& p,
                                         const SurfaceSpec& spec) {
  const double r = norm(p.x);
  if (!(r_inner > 0 && r_inner < r_outer))
    throw GeometryViolation("inner radius must be positive and below the outer radius");
  if (!(r > r_inner && r < r_outer))
    throw GeometryViolation("observation point must lie strictly inside the shell");
  if (src.support().bounding_radius() >= r_inner)
    throw GeometryViolation("source support must lie inside the inner sphere");
  ShellReconstruction out;
  // Either term may vanish on its own; judge refinement against the local field.
  SurfaceSpec s = spec;
  if (s.field_scale <= 0) s.field_scale = norm(field.sample(p, false).B);
  out.inner = boundary_term(field, {}, r_inner, false, p, s);
  out.outer = boundary_term(field, {}, r_outer, true, p, s);
  out.field.at = p;
  out.field.B = out.inner.value + out.outer.value;
  out.field.provenance = Provenance::kirchhoff_reconstructed;
  out.field.error_estimate = out.inner.error_estimate + out.outer.error_estimate;
  out.field.flags = out.inner.flags | out.outer.flags;
  return out;
}

CancellationResult exterior_cancellation(const FieldSampler& field, const SourceModel& src,
                                         double r_inner, double r_outer, const SpacetimePoint& p,
                                         const SurfaceSpec& spec) {
  if (!(r_inner > 0 && r_inner < r_outer))
    throw GeometryViolation("inner radius must be positive and below the outer radius");
  if (!(norm(p.x) > r_outer))
    throw GeometryViolation("observation point must lie outside the outer sphere");
  if (src.support().bounding_radius() >= r_inner)
    throw GeometryViolation("source support must lie inside the inner sphere");
  CancellationResult out;
  out.field_scale = norm(field.sample(p, false).B);
  SurfaceSpec s = spec;
  s.field_scale = std::max(s.field_scale, out.field_scale);
  const SurfaceTerm in = boundary_term(field, {}, r_inner, false, p, s);
  const SurfaceTerm ou = boundary_term(field, {}, r_outer, true, p, s);
  out.inner = in.value;
  out.outer = ou.value;
  out.flags = in.flags | ou.flags;
  out.residual = norm(in.value + ou.value);
  const double big = std::max(norm(in.value), norm(ou.value));
  out.ratio = big > 0 ? out.residual / big : 0.0;
  return out;
}

Decomposition decompose_field(const SourceModel& src, const FieldSampler& boundary_field,
                              double r_boundary, const SpacetimePoint& p,
                              const SurfaceSpec& spec, const QuadratureSpec& q) {
  if (src.support().bounding_radius() >= r_boundary)
    throw GeometryViolation("boundary sphere must enclose the source support");
  Decomposition out;
  out.inside = norm(p.x) < r_boundary;
  const FieldSample direct = field_from_potential(src, p, q);
  const FieldSample source = field_source_term(src, p, q);
  out.direct = direct.B;
  out.source_term = source.B;
  SurfaceSpec s = spec;
  s.field_scale = std::max(s.field_scale, norm(direct.B));
  const SurfaceTerm bnd = boundary_term(boundary_field, {}, r_boundary, true, p, s);
  out.boundary_term = bnd.value;
  out.flags = direct.flags | source.flags | bnd.flags;
  const Vec3 expected = out.inside ? out.direct : Vec3{};
  const double mismatch = norm(out.source_term + out.boundary_term - expected);
  const double scale = norm(out.direct);
  out.closure_error = scale > 0 ? mismatch / scale : mismatch;
  const double s_mag = norm(out.source_term);
  out.boundary_ratio = s_mag > 0 ? norm(out.boundary_term) / s_mag : 0.0;
  return out;
}

std::unique_ptr<FieldSampler> make_field_sampler(const SourceModel& src, const QuadratureSpec& q) {
  if (src.harmonic()) return std::make_unique<PhasorFieldSampler>(src, q);
  return std::make_unique<PotentialFieldSampler>(src, q);
}

double boundary_steady_time(const SourceModel& src, double r_boundary, const Vec3& x_P) {
  return steady_state_time(src, r_boundary) + r_boundary + norm(x_P);
}

double peak_time(const FieldSampler& field, const Vec3& x, double t0, int n_samples) {
  const double T = field.period();
  if (!(T > 0)) return t0;
  std::vector<SpacetimePoint> pts(n_samples);
  for (int i = 0; i < n_samples; ++i) pts[i] = {x, t0 + T * (i + 1) / n_samples};
  const auto fs = field.sample_batch(pts, false);
  int best = 0;
  for (int i = 1; i < n_samples; ++i)
    if (norm(fs[i].B) > norm(fs[best].B)) best = i;
  // Golden-section polish on the bracketing interval.
  const double phi = 0.5 * (std::sqrt(5.0) - 1), dt = T / n_samples;
  auto f = [&](double t) { return norm(field.sample({x, t}, false).B); };
  double a = pts[best].t - dt, b = pts[best].t + dt;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 30; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace fieldlab
