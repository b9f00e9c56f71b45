#pragma once

#include <array>
#include <functional>

#include "fieldlab/source.hpp"

namespace fieldlab {

/// t_P - |x_P - x| / c
double retarded_time(const Vec3& x_P, const Vec3& x, double t_P, double c = 1.0);

/// Free-space retarded Green's function delta(t_P - t - R/c) / R, stateless.
struct RetardedKernel {
  double c = 1.0;
  /// Amplitude 1/R carried by the delta.
  double amplitude(const Vec3& x_P, const Vec3& x) const { return 1.0 / norm(x_P - x); }
  /// Emission time on the backward light cone.
  double emission_time(const Vec3& x_P, const Vec3& x, double t_P) const {
    return retarded_time(x_P, x, t_P, c);
  }
};

enum class QuadratureMethod {
  automatic,           ///< observer_centered inside the support ball, else source_cylindrical
  source_cylindrical,  ///< GL in r and z, trapezoid in phi, about the source axis
  observer_centered,   ///< spherical about x_P; removes the 1/R singularity
};

/// Refinement doubles every node count until two successive estimates of the
/// four-potential differ by less than tolerance (relative to the estimate).
struct QuadratureSpec {
  int n_r = 8;
  int n_phi = 16;
  int n_z = 8;
  double tolerance = 1e-6;
  int max_refinements = 3;
  QuadratureMethod method = QuadratureMethod::automatic;
};

/// A fixed rule: the node counts and method actually used.
struct QuadraturePlan {
  QuadratureMethod method = QuadratureMethod::source_cylindrical;
  int n_r = 8, n_phi = 16, n_z = 8;

  QuadraturePlan refined(int levels = 1) const {
    const int f = 1 << levels;
    return {method, n_r * f, n_phi * f, n_z * f};
  }
  friend bool operator==(const QuadraturePlan&, const QuadraturePlan&) = default;
};

struct FourPotential {
  double A0 = 0;
  Vec3 A;

  FourPotential& operator+=(const FourPotential& o) {
    A0 += o.A0;
    A += o.A;
    return *this;
  }
  double magnitude() const { return std::sqrt(A0 * A0 + dot(A, A)); }
};

struct FourPotentialSample {
  SpacetimePoint at;
  double A0 = 0;
  Vec3 A;
  double error_estimate = 0;
  unsigned flags = 0;
  QuadraturePlan plan;

  FourPotential value() const { return {A0, A}; }
  bool converged() const;
};

/// Starting plan for a source/observer pair: azimuthal count grows with
/// m + Omega * r_support so the retarded phase over the source is resolved.
QuadraturePlan initial_plan(const SourceModel& src, const Vec3& x_P, const QuadratureSpec& q);

/// Retarded potential with a fixed rule (no refinement).
FourPotential integrate_potential(const SourceModel& src, const SpacetimePoint& p,
                                  const QuadraturePlan& plan);

/// Volume density sampled at (x, t_ret); the scalar slot rides in A0.
using RetardedDensity = std::function<FourPotential(const SpacetimePoint&)>;

/// Int d3x f(x, t_P - R) / R over the source support with a fixed rule.
FourPotential integrate_retarded(const SourceModel& src, const SpacetimePoint& p,
                                 const QuadraturePlan& plan, const RetardedDensity& f);

/// Same with refinement (see QuadratureSpec).
FourPotentialSample integrate_retarded(const SourceModel& src, const SpacetimePoint& p,
                                       const QuadratureSpec& q, const RetardedDensity& f);

/// A^mu(x_P, t_P) = (1/c) Int d3x j^mu(x, t_P - R/c) / R with refinement.
/// On hitting the refinement cap returns the finest estimate with
/// kFlagQuadratureNotConverged set.
FourPotentialSample retarded_potential(const SourceModel& src, const SpacetimePoint& p,
                                       const QuadratureSpec& q = {});

/// Anything that yields a four-potential at a spacetime point.
class PotentialSampler {
 public:
  virtual ~PotentialSampler() = default;
  virtual FourPotential operator()(const SpacetimePoint& p) const = 0;
};

/// Retarded-potential quadrature with a frozen plan, so every stencil point
/// uses the same nodes.
class RetardedPotentialSampler final : public PotentialSampler {
 public:
  RetardedPotentialSampler(const SourceModel& src, const QuadraturePlan& plan)
      : src_(src), plan_(plan) {}
  FourPotential operator()(const SpacetimePoint& p) const override {
    return integrate_potential(src_, p, plan_);
  }
  const QuadraturePlan& plan() const { return plan_; }

 private:
  const SourceModel& src_;
  QuadraturePlan plan_;
};

/// d[k][mu] = d A^mu / d x^k with k = 0..2 spatial and k = 3 time; mu = 0 is A0.
struct PotentialJacobian {
  FourPotential center;
  std::array<std::array<double, 4>, 4> d{};
  double error_estimate = 0;
  unsigned flags = 0;
  QuadraturePlan plan;

  Vec3 curl_A() const { return {d[1][3] - d[2][2], d[2][1] - d[0][3], d[0][2] - d[1][1]}; }
  double div_A() const { return d[0][1] + d[1][2] + d[2][3]; }
  /// E = -grad A0 - dA/dt
  Vec3 electric() const {
    return {-d[0][0] - d[3][1], -d[1][0] - d[3][2], -d[2][0] - d[3][3]};
  }
};

/// Central differences in (x, y, z, t) at steps h and h/2 combined by
/// Richardson extrapolation; error estimate is |D(h/2) - D(h)|.
PotentialJacobian differentiate_potential(const PotentialSampler& sampler, const SpacetimePoint& p,
                                          double h, double h_t);

/// Differentiation step: 1e-3 of the reduced wavelength c / Omega, capped by
/// the source feature size inside the support and by the distance to the
/// support for static sources.
double default_step(const SourceModel& src, const Vec3& x_P);

/// Plan selection by refinement at p, then differentiation with that plan frozen.
PotentialJacobian potential_jacobian(const SourceModel& src, const SpacetimePoint& p,
                                     const QuadratureSpec& q = {}, double h = 0);

}  // namespace fieldlab
