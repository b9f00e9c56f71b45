#include "fieldlab/samplers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>

#include "fieldlab/errors.hpp"
#include "fieldlab/parallel.hpp"
#include "fieldlab/volume_grid.hpp"

namespace fieldlab {

double magnitude_of(const FieldSample& f, FieldQuantity q) {
  switch (q) {
    case FieldQuantity::magnetic:
      return norm(f.B);
    case FieldQuantity::electric:
      return f.E ? norm(*f.E) : 0.0;
    case FieldQuantity::magnetic_gradient:
      return f.gradB ? frobenius(*f.gradB) : 0.0;
  }
  return 0.0;
}

std::vector<FieldSample> FieldSampler::sample_batch(std::span<const SpacetimePoint> pts,
                                                    bool with_gradient) const {
  std::vector<FieldSample> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = sample(pts[i], with_gradient); });
  return out;
}

double FieldSampler::period_max(const Vec3& x, double t0, FieldQuantity q, int n_samples) const {
  const bool grad = q == FieldQuantity::magnetic_gradient;
  const double T = period();
  if (!(T > 0) || n_samples <= 1) return magnitude_of(sample({x, t0}, grad), q);
  const double dt = T / n_samples;
  std::vector<SpacetimePoint> pts(n_samples);
  for (int i = 0; i < n_samples; ++i) pts[i] = {x, t0 + i * dt};
  const auto fs = sample_batch(pts, grad);
  int best = 0;
  std::vector<double> mags(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    mags[i] = magnitude_of(fs[i], q);
    if (mags[i] > mags[best]) best = i;
  }
  auto f = [&](double t) { return magnitude_of(sample({x, t}, grad), q); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1);
  double a = t0 + (best - 1) * dt, b = t0 + (best + 1) * dt;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 14; ++it) {
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
  return std::max({mags[best], fc, fd});
}

// ---------------------------------------------------------------------------

namespace {

template <class BFn>
void fill_derivatives(FieldSample& f, const SpacetimePoint& p, double h, const BFn& field_at) {
  Mat3 g{};
  for (int i = 0; i < 4; ++i) {
    auto at = [&](double d) {
      SpacetimePoint q = p;
      if (i < 3)
        q.x[i] += d;
      else
        q.t += d;
      return field_at(q);
    };
    const Vec3 fp = at(h), fm = at(-h), hp = at(0.5 * h), hm = at(-0.5 * h);
    const Vec3 d = ((hp - hm) / h * 4.0 - (fp - fm) / (2 * h)) / 3.0;
    if (i < 3)
      for (int j = 0; j < 3; ++j) g[i][j] = d[j];
    else
      f.dBdt = d;
  }
  f.gradB = g;
}

}  // namespace

FieldSample PotentialFieldSampler::sample(const SpacetimePoint& p, bool with_gradient) const {
  const FourPotentialSample s = retarded_potential(src_, p, spec_);
  const double h = step_ > 0 ? step_ : default_step(src_, p.x);
  RetardedPotentialSampler pot(src_, s.plan);
  FieldSample f = field_from_sampler(pot, p, h);
  f.flags |= s.flags;
  if (with_gradient)
    fill_derivatives(f, p, h, [&](const SpacetimePoint& q) {
      return field_from_sampler(pot, q, h).B;
    });
  return f;
}

FieldSample SourceTermFieldSampler::sample(const SpacetimePoint& p, bool with_gradient) const {
  FieldSample f = field_source_term(src_, p, spec_, curl_);
  if (with_gradient) {
    const QuadraturePlan plan = initial_plan(src_, p.x, spec_);
    // Re-derive the converged plan so every stencil point shares nodes.
    QuadraturePlan use = plan;
    FieldSample probe = f;
    (void)probe;
    RetardedDensity density;
    if (src_.has_analytic_curl())
      density = [this](const SpacetimePoint& x) {
        return FourPotential{0.0, src_.analytic_curl_current(x)};
      };
    else
      density = [this](const SpacetimePoint& x) {
        return FourPotential{0.0, finite_difference_curl(src_, x, *curl_.fallback_step)};
      };
    const FourPotentialSample s = integrate_retarded(src_, p, spec_, density);
    use = s.plan;
    const double h = step_ > 0 ? step_ : default_step(src_, p.x);
    fill_derivatives(f, p, h, [&](const SpacetimePoint& q) {
      return integrate_retarded(src_, q, use, density).A;
    });
  }
  return f;
}

// ---------------------------------------------------------------------------

double harmonic_peak(std::span<const cplx> v) {
  double aa = 0, bb = 0, ab = 0;
  for (const cplx& c : v) {
    aa += c.real() * c.real();
    bb += c.imag() * c.imag();
    ab += c.real() * c.imag();
  }
  const double half = 0.5 * (aa - bb);
  return std::sqrt(std::max(0.0, 0.5 * (aa + bb) + std::sqrt(half * half + ab * ab)));
}

PhasorFieldSampler::PhasorFieldSampler(const SourceModel& src, const QuadratureSpec& q)
    : src_(src) {
  const auto h = src.harmonic();
  if (!h) throw TransientRegime(src.kind() + " source has no steady harmonic state");
  info_ = *h;
  QuadratureSpec spec = q;
  spec.method = QuadratureMethod::source_cylindrical;
  const double rb = src.support().bounding_radius();
  plan_ = initial_plan(src, Vec3{3 * rb + 1, 0, 0}, spec);
  plan_.method = QuadratureMethod::source_cylindrical;
  if (src.support().is_empty()) return;

  const std::vector<Vec3> probes = {
      {3 * rb, 0, 0}, {0, 3 * rb / std::sqrt(2.0), 3 * rb / std::sqrt(2.0)}, {0, 0, 3 * rb}};
  auto measure = [&](const PhasorAmplitude& a) {
    return std::array<double, 2>{std::sqrt(std::norm(a.A0) + std::norm(a.A.x) +
                                           std::norm(a.A.y) + std::norm(a.A.z)),
                                 std::sqrt(std::norm(a.B.x) + std::norm(a.B.y) +
                                           std::norm(a.B.z) + std::norm(a.E.x) +
                                           std::norm(a.E.y) + std::norm(a.E.z))};
  };
  // Refine each node count separately: a dimension is doubled only while
  // doubling it still moves the probe amplitudes by more than the tolerance.
  auto evaluate = [&](const QuadraturePlan& plan) {
    load_nodes(plan);
    std::vector<PhasorAmplitude> v;
    for (const auto& x : probes) v.push_back(integrate(x, false));
    return v;
  };
  // Changes are judged against the largest probe amplitude: the field may
  // vanish identically at some probes (e.g. on the axis for m != 0).
  auto change = [&](const std::vector<PhasorAmplitude>& a, const std::vector<PhasorAmplitude>& b) {
    std::array<double, 2> scale{0, 0}, diff{0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      PhasorAmplitude d = a[i];
      d.A0 -= b[i].A0;
      d.A -= b[i].A;
      d.B -= b[i].B;
      d.E -= b[i].E;
      const auto m_a = measure(a[i]), m_d = measure(d);
      for (int k = 0; k < 2; ++k) {
        scale[k] = std::max(scale[k], m_a[k]);
        diff[k] = std::max(diff[k], m_d[k]);
      }
    }
    double worst = 0;
    for (int k = 0; k < 2; ++k)
      if (scale[k] > 0) worst = std::max(worst, diff[k] / scale[k]);
    return worst;
  };
  constexpr double kMaxNodes = 4e6;
  std::vector<PhasorAmplitude> base = evaluate(plan_);
  bool converged = q.max_refinements <= 0;
  for (int level = 0; level < 3 * q.max_refinements && !converged; ++level) {
    QuadraturePlan next = plan_;
    std::vector<PhasorAmplitude> best;
    bool any = false;
    for (int dim = 0; dim < 3; ++dim) {
      QuadraturePlan trial = plan_;
      int& n = dim == 0 ? trial.n_r : dim == 1 ? trial.n_phi : trial.n_z;
      n *= 2;
      const auto v = evaluate(trial);
      if (change(v, base) > q.tolerance) {
        (dim == 0 ? next.n_r : dim == 1 ? next.n_phi : next.n_z) *= 2;
        any = true;
      }
    }
    if (!any) {
      converged = true;
      break;
    }
    if (double(next.n_r) * next.n_phi * next.n_z > kMaxNodes) break;
    plan_ = next;
    base = evaluate(plan_);
  }
  load_nodes(plan_);
  if (!converged) flags_ |= kFlagQuadratureNotConverged;
}

void PhasorFieldSampler::load_nodes(const QuadraturePlan& plan) {
  x_.clear();
  w_.clear();
  j_.clear();
  rho_.clear();
  const auto grid = cylinder_grid(src_.support(), plan.n_r, plan.n_phi, plan.n_z);
  const bool charged = src_.has_charge();
  for (std::size_t i = 0; i < grid->x.size(); ++i) {
    const Vec3& x = grid->x[i];
    if (!src_.support().contains(x)) continue;
    const CVec3 j = src_.current_amplitude(x);
    const cplx rho = charged ? src_.charge_amplitude(x) : cplx{};
    if (j == CVec3{} && rho == cplx{}) continue;
    x_.push_back(x);
    w_.push_back(grid->w[i]);
    j_.push_back(j);
    rho_.push_back(rho);
  }
}

PhasorAmplitude PhasorFieldSampler::integrate(const Vec3& xp, bool with_gradient) const {
  const double k = info_.omega;
  const cplx ik(0, k);
  CVec3 A, B, gradA0, S2;
  cplx A0 = 0;
  CMat3 S1{};
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const Vec3 d = xp - x_[i];
    const double R = norm(d);
    const Vec3 n = d / R;
    const double w = w_[i];
    const cplx g = std::polar(1.0 / R, k * R);
    const cplx g1 = g * (ik - 1.0 / R);
    const CVec3& J = j_[i];
    A += J * (w * g);
    A0 += rho_[i] * (w * g);
    const CVec3 nxJ = cross(n, J);
    B += nxJ * (w * g1);
    gradA0 += to_complex(n) * (rho_[i] * (w * g1));
    if (with_gradient) {
      const cplx g2 = g * ((ik - 1.0 / R) * (ik - 1.0 / R) + 1.0 / (R * R));
      const cplx c1 = w * (g2 - g1 / R);
      for (int a = 0; a < 3; ++a) {
        const cplx s = c1 * n[a];
        S1[a][0] += s * nxJ.x;
        S1[a][1] += s * nxJ.y;
        S1[a][2] += s * nxJ.z;
      }
      S2 += J * (w * g1 / R);
    }
  }
  PhasorAmplitude out;
  out.A0 = A0;
  out.A = A;
  out.B = B;
  out.E = A * ik - gradA0;
  if (with_gradient) {
    for (int a = 0; a < 3; ++a) {
      Vec3 e;
      e[a] = 1;
      const CVec3 exS2 = cross(e, S2);
      for (int b = 0; b < 3; ++b) out.gradB[a][b] = S1[a][b] + exS2[b];
    }
  }
  return out;
}

PhasorAmplitude PhasorFieldSampler::rotated(const PhasorAmplitude& a, double alpha) const {
  const ZRotation R = ZRotation::by(alpha);
  const cplx ph = std::exp(cplx(0, info_.azimuthal_order * alpha));
  PhasorAmplitude out;
  out.A0 = ph * a.A0;
  out.A = R.apply(a.A) * ph;
  out.B = R.apply(a.B) * ph;
  out.E = R.apply(a.E) * ph;
  out.gradB = R.conjugate(a.gradB);
  for (auto& row : out.gradB)
    for (auto& v : row) v *= ph;
  return out;
}

PhasorAmplitude PhasorFieldSampler::amplitude(const Vec3& x, bool with_gradient) const {
  if (src_.support().is_empty()) return {};
  if (norm(x) <= src_.support().bounding_radius())
    throw GeometryViolation("phasor evaluation needs points outside the source support");
  const double rho = std::hypot(x.x, x.y);
  if (info_.rotation_covariant && rho > 0) {
    const double alpha = std::atan2(x.y, x.x);
    return rotated(integrate({rho, 0, x.z}, with_gradient), alpha);
  }
  return integrate(x, with_gradient);
}

void PhasorFieldSampler::check_point(const SpacetimePoint& p) const {
  const double ts = steady_state_time(src_, p.x);
  if (p.t < ts - 1e-9 * std::max(1.0, std::abs(ts)))
    throw TransientRegime("observation time precedes steady state at this point");
}

FieldSample PhasorFieldSampler::at_time(const PhasorAmplitude& a, const SpacetimePoint& p,
                                        bool with_gradient) const {
  const cplx e = std::exp(cplx(0, -info_.omega * p.t));
  FieldSample f;
  f.at = p;
  f.B = real_part(a.B * e);
  f.E = real_part(a.E * e);
  f.dBdt = real_part(a.B * (cplx(0, -info_.omega) * e));
  if (with_gradient) {
    Mat3 g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = (a.gradB[i][j] * e).real();
    f.gradB = g;
  }
  f.flags = flags_;
  f.provenance = Provenance::from_potential;
  return f;
}

FieldSample PhasorFieldSampler::sample(const SpacetimePoint& p, bool with_gradient) const {
  check_point(p);
  return at_time(amplitude(p.x, with_gradient), p, with_gradient);
}

std::vector<FieldSample> PhasorFieldSampler::sample_batch(std::span<const SpacetimePoint> pts,
                                                          bool with_gradient) const {
  for (const auto& p : pts) check_point(p);
  if (src_.support().is_empty()) {
    std::vector<FieldSample> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = at_time({}, pts[i], with_gradient);
    return out;
  }
  const double rb = src_.support().bounding_radius();
  for (const auto& p : pts)
    if (norm(p.x) <= rb)
      throw GeometryViolation("phasor evaluation needs points outside the source support");

  // Map every point to its canonical (rho, 0, z) representative and evaluate
  // each distinct representative once.
  double scale = 1;
  for (const auto& p : pts) scale = std::max(scale, norm(p.x));
  const double quantum = 1e-11 * scale;
  const bool covariant = info_.rotation_covariant;
  std::map<std::pair<long long, long long>, std::size_t> index;
  std::vector<Vec3> reps;
  std::vector<std::size_t> slot(pts.size());
  std::vector<double> alpha(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& x = pts[i].x;
    const double rho = std::hypot(x.x, x.y);
    if (!covariant || rho == 0) {
      slot[i] = reps.size();
      reps.push_back(x);
      alpha[i] = std::nan("");
      continue;
    }
    alpha[i] = std::atan2(x.y, x.x);
    const std::pair<long long, long long> key{std::llround(rho / quantum),
                                              std::llround(x.z / quantum)};
    auto [it, inserted] = index.emplace(key, reps.size());
    if (inserted) reps.push_back({rho, 0, x.z});
    slot[i] = it->second;
  }
  std::vector<PhasorAmplitude> amps(reps.size());
  parallel_for(reps.size(), [&](std::size_t k) { amps[k] = integrate(reps[k], with_gradient); });

  std::vector<FieldSample> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PhasorAmplitude& a = amps[slot[i]];
    out[i] = std::isnan(alpha[i]) ? at_time(a, pts[i], with_gradient)
                                  : at_time(rotated(a, alpha[i]), pts[i], with_gradient);
  }
  return out;
}

double PhasorFieldSampler::period_max(const Vec3& x, double t0, FieldQuantity q, int) const {
  check_point({x, t0});
  const bool grad = q == FieldQuantity::magnetic_gradient;
  const PhasorAmplitude a = amplitude(x, grad);
  switch (q) {
    case FieldQuantity::magnetic: {
      const cplx v[3] = {a.B.x, a.B.y, a.B.z};
      return harmonic_peak(v);
    }
    case FieldQuantity::electric: {
      const cplx v[3] = {a.E.x, a.E.y, a.E.z};
      return harmonic_peak(v);
    }
    case FieldQuantity::magnetic_gradient: {
      cplx v[9];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[3 * i + j] = a.gradB[i][j];
      return harmonic_peak(v);
    }
  }
  return 0.0;
}

}  // namespace fieldlab
