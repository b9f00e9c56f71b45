#pragma once

#include <optional>
#include <vector>

#include "fieldlab/samplers.hpp"

namespace fieldlab {

/// Quadrature nodes on a sphere with oriented unit normals. `outward` is
/// relative to the ball the sphere bounds; the volume V of a representation
/// lies on the side opposite to the normals.
struct SphericalBoundary {
  Vec3 center;
  double radius = 0;
  bool outward = true;
  std::vector<Vec3> nodes;
  std::vector<Vec3> normals;
  std::vector<double> weights;
  int n_theta = 0, n_phi = 0;  ///< product rule only
  int level = -1;              ///< geodesic mesh only

  /// Gauss-Legendre in cos(theta) times trapezoid in phi; exact for
  /// spherical harmonics up to degree min(2 n_theta - 1, n_phi - 1).
  static SphericalBoundary gauss_product(const Vec3& center, double radius, int n_theta,
                                         int n_phi, bool outward = true);
  /// Vertices of a subdivided icosahedron (10 * 4^level + 2 nodes) with
  /// equal weights 4 pi R^2 / N.
  static SphericalBoundary geodesic(const Vec3& center, double radius, int level,
                                    bool outward = true);

  SphericalBoundary flipped() const;
  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
  /// Unit direction of node i from the centre.
  Vec3 direction(std::size_t i) const { return (nodes[i] - center) / radius; }
};

/// Retarded samples of one scalar wavefield on the nodes of a boundary, each
/// taken at t_P - |x_P - node|.
struct BoundaryFieldData {
  std::vector<double> value;
  std::vector<double> normal_derivative;  ///< along the boundary's oriented normal
  std::vector<double> time_derivative;
};

/// Samples component k of B (k = 0..2) on the boundary at the retarded times
/// seen from (x_P, t_P).
BoundaryFieldData sample_boundary(const FieldSampler& field, const SphericalBoundary& bnd,
                                  const Vec3& x_P, double t_P, int component);

/// (1/4pi) sum w [ dpsi/dn / R + (n.s) psi / R^2 + (n.s) dpsi/dt / R ],
/// s = (node - x_P) / R. Equals psi(x_P) for x_P in V and 0 outside V when
/// psi is source-free in V. Throws GeometryViolation if x_P lies on the sphere.
double collapsed_kirchhoff_contribution(const BoundaryFieldData& data,
                                        const SphericalBoundary& bnd, const Vec3& x_P);

/// Sizing of the product rule from the integrand bandwidth.
struct SurfaceSpec {
  double tolerance = 1e-3;  ///< max change under doubling, relative to the field scale
  int n_theta = 0;          ///< 0: derived from the bandwidth
  int n_phi = 0;
  double wavenumber = 0;       ///< Omega / c of the field
  double source_radius = 0;    ///< bounding radius of the source
  int azimuthal_order = 0;     ///< m of the field pattern
  double field_scale = 0;      ///< floor for the relative check, e.g. |B(x_P)|
  bool check_refinement = true;
  bool throw_on_coarse = true;
};

SurfaceSpec surface_spec_for(const SourceModel& src);

/// Vector-valued surface term with its refinement check.
struct SurfaceTerm {
  Vec3 value;
  double error_estimate = 0;  ///< |I(2n) - I(n)|
  unsigned flags = 0;
  int n_theta = 0, n_phi = 0;
  std::size_t evaluations = 0;
};

/// Collapsed Kirchhoff integral of all three components of B over a sphere.
/// The rule is evaluated ring by ring (never stored whole); with the
/// refinement check on, the doubled rule is evaluated too and the finer value
/// returned. Throws MeshTooCoarse (or flags it) when the two disagree by more
/// than tolerance * max(|I|, field_scale).
SurfaceTerm boundary_term(const FieldSampler& field, const Vec3& center, double radius,
                          bool outward, const SpacetimePoint& p, const SurfaceSpec& spec);

/// Rule size used by boundary_term for a sphere and observer.
std::pair<int, int> surface_rule_size(double radius, double observer_distance,
                                      const SurfaceSpec& spec);

struct ShellReconstruction {
  FieldSample field;   ///< provenance kirchhoff_reconstructed
  SurfaceTerm inner;   ///< normals pointing into the inner ball
  SurfaceTerm outer;   ///< normals pointing outward
};

/// Field inside a source-free shell from its two bounding spheres (centred at
/// the origin). Throws GeometryViolation unless r_inner < |x_P| < r_outer and
/// the source support lies inside the inner sphere.
ShellReconstruction reconstruct_in_shell(const FieldSampler& field, const SourceModel& src,
                                         double r_inner, double r_outer, const SpacetimePoint& p,
                                         const SurfaceSpec& spec);

struct CancellationResult {
  Vec3 inner, outer;
  double residual = 0;      ///< |inner + outer|
  double ratio = 0;         ///< residual / max(|inner|, |outer|)
  double field_scale = 0;   ///< |B(x_P)|
  unsigned flags = 0;
};

/// Composite-surface integral for x_P outside the outer sphere.
CancellationResult exterior_cancellation(const FieldSampler& field, const SourceModel& src,
                                         double r_inner, double r_outer, const SpacetimePoint& p,
                                         const SurfaceSpec& spec);

struct Decomposition {
  Vec3 source_term;    ///< volume integral of curl j over the support
  Vec3 boundary_term;  ///< Kirchhoff term of the enclosing sphere
  Vec3 direct;         ///< curl A at x_P
  bool inside = true;  ///< whether x_P lies inside the enclosing sphere
  /// |source + boundary - chi direct| / |direct|, chi = 1 inside, 0 outside.
  double closure_error = 0;
  double boundary_ratio = 0;  ///< |boundary| / |source|
  unsigned flags = 0;
};

/// Splits B(x_P) into the source-term volume integral and the boundary term
/// of a sphere of radius r_boundary enclosing the support. `direct` and
/// `source_term` come from the time-domain pipelines; boundary data from
/// `boundary_field`.
Decomposition decompose_field(const SourceModel& src, const FieldSampler& boundary_field,
                              double r_boundary, const SpacetimePoint& p,
                              const SurfaceSpec& spec, const QuadratureSpec& q = {});

/// Phasor sampler for sources with a harmonic steady state, else the
/// time-domain potential sampler.
std::unique_ptr<FieldSampler> make_field_sampler(const SourceModel& src,
                                                 const QuadratureSpec& q = {});

/// Earliest t_P at which every retarded boundary sample for a sphere of
/// radius r_boundary seen from x_P is in steady state.
double boundary_steady_time(const SourceModel& src, double r_boundary, const Vec3& x_P);

/// Time within one period after t0 at which |B(x)| peaks.
double peak_time(const FieldSampler& field, const Vec3& x, double t0, int n_samples = 64);

}  // namespace fieldlab
