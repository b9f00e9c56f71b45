#include "fieldlab/field.hpp"

#include <cmath>

#include "fieldlab/errors.hpp"

namespace fieldlab {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::from_potential:
      return "from_potential";
    case Provenance::source_term_only:
      return "source_term_only";
    case Provenance::kirchhoff_reconstructed:
      return "kirchhoff_reconstructed";
    case Provenance::analytic:
      return "analytic";
  }
  return "unknown";
}

FieldSample field_from_sampler(const PotentialSampler& sampler, const SpacetimePoint& p, double h,
                               double h_t) {
  const PotentialJacobian J = differentiate_potential(sampler, p, h, h_t > 0 ? h_t : h);
  FieldSample f;
  f.at = p;
  f.B = J.curl_A();
  f.E = J.electric();
  f.error_estimate = J.error_estimate;
  f.flags = J.flags;
  f.provenance = Provenance::from_potential;
  return f;
}

FieldSample field_from_potential(const SourceModel& src, const SpacetimePoint& p,
                                 const QuadratureSpec& q, double h) {
  const PotentialJacobian J = potential_jacobian(src, p, q, h);
  FieldSample f;
  f.at = p;
  f.B = J.curl_A();
  f.E = J.electric();
  f.error_estimate = J.error_estimate;
  f.flags = J.flags;
  f.provenance = Provenance::from_potential;
  return f;
}

FieldSample field_source_term(const SourceModel& src, const SpacetimePoint& p,
                              const QuadratureSpec& q, const CurlOptions& curl) {
  if (!src.has_analytic_curl() && !curl.fallback_step)
    throw CurlUnavailable(src.kind() + ": source term needs curl j");
  RetardedDensity density;
  if (src.has_analytic_curl())
    density = [&src](const SpacetimePoint& x) {
      return FourPotential{0.0, src.analytic_curl_current(x)};
    };
  else
    density = [&src, step = *curl.fallback_step](const SpacetimePoint& x) {
      return FourPotential{0.0, finite_difference_curl(src, x, step)};
    };
  const FourPotentialSample s = integrate_retarded(src, p, q, density);
  FieldSample f;
  f.at = p;
  f.B = s.A;
  f.error_estimate = s.error_estimate;
  f.flags = s.flags | (src.has_analytic_curl() ? 0u : unsigned(kFlagCurlFallback));
  f.provenance = Provenance::source_term_only;
  return f;
}

// ---------------------------------------------------------------------------

double GaugeFunction::value(const SpacetimePoint& p) const {
  return amplitude * std::sin(dot(k, p.x) - norm(k) * p.t + phase);
}

Vec3 GaugeFunction::gradient(const SpacetimePoint& p) const {
  return k * (amplitude * std::cos(dot(k, p.x) - norm(k) * p.t + phase));
}

double GaugeFunction::time_derivative(const SpacetimePoint& p) const {
  return -norm(k) * amplitude * std::cos(dot(k, p.x) - norm(k) * p.t + phase);
}

double GaugeFunction::dalembertian_residual(const SpacetimePoint& p, double h) const {
  auto second = [&](int axis, double s) {
    auto at = [&](double d) {
      SpacetimePoint q = p;
      if (axis < 3)
        q.x[axis] += d;
      else
        q.t += d;
      return value(q);
    };
    return (-at(2 * s) + 16 * at(s) - 30 * at(0) + 16 * at(-s) - at(-2 * s)) / (12 * s * s);
  };
  const double box = second(0, h) + second(1, h) + second(2, h) - second(3, h);
  const double scale = std::abs(amplitude) * dot(k, k);
  return scale > 0 ? std::abs(box) / scale : std::abs(box);
}

GaugeFunction GaugeFunction::random_plane_wave(std::mt19937_64& rng, double k_scale,
                                               double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), mag(0.5, 1.5), ph(0.0, 2 * kPi);
  Vec3 dir;
  do {
    dir = {u(rng), u(rng), u(rng)};
  } while (norm(dir) < 0.1 || norm(dir) > 1.0);
  GaugeFunction g;
  g.k = normalized(dir) * (k_scale * mag(rng));
  g.amplitude = amplitude * mag(rng);
  g.phase = ph(rng);
  return g;
}

FourPotential GaugeTransformedSampler::operator()(const SpacetimePoint& p) const {
  FourPotential a = base_(p);
  a.A += gauge_.gradient(p);
  a.A0 -= gauge_.time_derivative(p);
  return a;
}

std::unique_ptr<PotentialSampler> gauge_transform(const PotentialSampler& base,
                                                  const GaugeFunction& gauge) {
  return std::make_unique<GaugeTransformedSampler>(base, gauge);
}

double lorenz_residual(const PotentialSampler& sampler, const SpacetimePoint& p, double h) {
  const PotentialJacobian J = differentiate_potential(sampler, p, h, h);
  return std::abs(J.div_A() + J.d[3][0]);
}

LorenzResult lorenz_residual(const SourceModel& src, const SpacetimePoint& p,
                             const QuadratureSpec& q, double h) {
  const PotentialJacobian J = potential_jacobian(src, p, q, h);
  LorenzResult r;
  r.div_A = J.div_A();
  r.dA0_dt = J.d[3][0];
  r.residual = std::abs(r.div_A + r.dA0_dt);
  r.flags = J.flags;
  return r;
}

}  // namespace fieldlab
