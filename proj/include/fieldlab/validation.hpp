#pragma once

#include <array>
#include <span>
#include <vector>

#include "fieldlab/samplers.hpp"

namespace fieldlab {

/// Spacings of the fourth-order five-point stencils (per axis of the 5^4
/// block) used to form the d'Alembertian. Requires c h_t <= h_x / 2.
struct ResidualGrid {
  double h_x = 0;
  double h_t = 0;

  /// 0.1 of the local feature scale (wavelength / c over Omega, source
  /// feature size inside the support, distance for static sources).
  static ResidualGrid for_probe(const SourceModel& src, const Vec3& x);
  void validate() const;
  ResidualGrid halved() const { return {0.5 * h_x, 0.5 * h_t}; }
};

struct ResidualReport {
  double residual = 0;  ///< normalised, max over components
  double raw = 0;       ///< max |box f + 4 pi s| over components
  double scale = 0;     ///< normalisation used
  bool inside = false;  ///< probe within the support's bounding ball
  unsigned flags = 0;
  std::array<double, 4> components{};  ///< raw per component (A0, A) or (B, 0)
};

/// |box A^mu + 4 pi j^mu| with the quadrature plan frozen at the probe.
/// Normalised by 4 pi max(peak |j|, peak rho) inside the support and by the
/// period amplitude |A| Omega^2 (|A| / |x|^2 when static) outside.
ResidualReport dalembertian_residual_A(const SourceModel& src, const SpacetimePoint& probe,
                                       const ResidualGrid& grid, const QuadratureSpec& q = {});

/// |box B + 4 pi curl j| with B = curl A from the time-domain potential.
/// Normalised by 4 pi peak |j| / feature size inside, |B| Omega^2 outside.
ResidualReport dalembertian_residual_B(const SourceModel& src, const SpacetimePoint& probe,
                                       const ResidualGrid& grid, const QuadratureSpec& q = {});

/// Same with B taken from any sampler (e.g. the phasor path).
ResidualReport dalembertian_residual_B(const SourceModel& src, const FieldSampler& field,
                                       const SpacetimePoint& probe, const ResidualGrid& grid);

struct InitialConditionReport {
  bool exempt = false;  ///< eternal sources have no null initial data
  std::size_t checked = 0;
  double max_A = 0, max_B = 0;
  double scale = 0;      ///< 1e-10 of this is the bound
  bool passed = true;
};

/// Potentials and B at t = start and start + tau_on / 10 at the given points
/// that lie outside every forward light cone of the support.
InitialConditionReport initial_condition_check(const SourceModel& src,
                                               std::span<const Vec3> points,
                                               const QuadratureSpec& q = {});

struct OnsetReport {
  double expected = 0;  ///< start + distance to the support
  double measured = 0;  ///< first time with nonzero potential (bisection)
  double before = 0;    ///< |A| at expected - h_t
  double after = 0;     ///< |A| at measured + h_t
};

/// Locates the first nonzero response at x to resolution h_t.
OnsetReport light_cone_onset(const SourceModel& src, const Vec3& x, double h_t,
                             const QuadratureSpec& q = {});

}  // namespace fieldlab
