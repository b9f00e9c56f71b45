#pragma once

#include <memory>
#include <optional>
#include <random>

#include "fieldlab/greens.hpp"

namespace fieldlab {

enum class Provenance { from_potential, source_term_only, kirchhoff_reconstructed, analytic };

const char* to_string(Provenance p);

struct FieldSample {
  SpacetimePoint at;
  Vec3 B;
  std::optional<Vec3> E;
  std::optional<Mat3> gradB;  ///< gradB[i][j] = d_i B_j
  std::optional<Vec3> dBdt;
  Provenance provenance = Provenance::from_potential;
  double error_estimate = 0;
  unsigned flags = 0;
};

/// B = curl A and E = -grad A0 - dA/dt from a differentiated potential sampler.
FieldSample field_from_sampler(const PotentialSampler& sampler, const SpacetimePoint& p, double h,
                               double h_t = 0);

/// Fields by differentiating the retarded potential (plan chosen by
/// refinement at p, then frozen for the stencil).
FieldSample field_from_potential(const SourceModel& src, const SpacetimePoint& p,
                                 const QuadratureSpec& q = {}, double h = 0);

/// B(x_P, t_P) = (1/c) Int d3x [curl j] / |x_P - x|, evaluated as written.
/// Throws CurlUnavailable if the source has no curl and no fallback is set.
FieldSample field_source_term(const SourceModel& src, const SpacetimePoint& p,
                              const QuadratureSpec& q = {}, const CurlOptions& curl = {});

/// Plane-wave gauge function Lambda = a sin(k.x - |k| c t + phase); box Lambda = 0.
struct GaugeFunction {
  double amplitude = 0;
  Vec3 k;
  double phase = 0;

  double value(const SpacetimePoint& p) const;
  Vec3 gradient(const SpacetimePoint& p) const;
  double time_derivative(const SpacetimePoint& p) const;
  /// Fourth-order finite-difference d'Alembertian relative to a |k|^2.
  double dalembertian_residual(const SpacetimePoint& p, double h) const;

  static GaugeFunction random_plane_wave(std::mt19937_64& rng, double k_scale, double amplitude);
};

/// Sampler yielding A + grad Lambda, A0 - dLambda/dt. Keeps a reference to base.
class GaugeTransformedSampler final : public PotentialSampler {
 public:
  GaugeTransformedSampler(const PotentialSampler& base, const GaugeFunction& gauge)
      : base_(base), gauge_(gauge) {}
  FourPotential operator()(const SpacetimePoint& p) const override;

 private:
  const PotentialSampler& base_;
  GaugeFunction gauge_;
};

std::unique_ptr<PotentialSampler> gauge_transform(const PotentialSampler& base,
                                                  const GaugeFunction& gauge);

/// |div A + c^-2 dA0/dt| from differenced samples.
double lorenz_residual(const PotentialSampler& sampler, const SpacetimePoint& p, double h);

struct LorenzResult {
  double residual = 0;
  double dA0_dt = 0;  ///< scale for normalisation
  double div_A = 0;
  unsigned flags = 0;
};
LorenzResult lorenz_residual(const SourceModel& src, const SpacetimePoint& p,
                             const QuadratureSpec& q = {}, double h = 0);

}  // namespace fieldlab
