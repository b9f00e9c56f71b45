#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fieldlab/field.hpp"

namespace fieldlab {

enum class FieldQuantity { magnetic, electric, magnetic_gradient };

/// |B|, |E| or the Frobenius norm of grad B.
double magnitude_of(const FieldSample& f, FieldQuantity q);

/// Source of field values (B, optionally E, grad B, dB/dt) at spacetime points.
class FieldSampler {
 public:
  virtual ~FieldSampler() = default;

  virtual FieldSample sample(const SpacetimePoint& p, bool with_gradient) const = 0;
  /// Parallel map over points; result order matches input order.
  virtual std::vector<FieldSample> sample_batch(std::span<const SpacetimePoint> pts,
                                                bool with_gradient) const;
  /// Period of the steady-state field, 0 when static.
  virtual double period() const { return 0.0; }
  /// Maximum of the chosen magnitude over one period starting at t0:
  /// n_samples uniform samples then golden-section refinement.
  virtual double period_max(const Vec3& x, double t0, FieldQuantity q, int n_samples = 32) const;
};

/// B and E by finite differences of the time-domain retarded potential.
class PotentialFieldSampler final : public FieldSampler {
 public:
  PotentialFieldSampler(const SourceModel& src, const QuadratureSpec& q = {}, double h = 0)
      : src_(src), spec_(q), step_(h) {}
  FieldSample sample(const SpacetimePoint& p, bool with_gradient) const override;
  double period() const override { return src_.period(); }

 private:
  const SourceModel& src_;
  QuadratureSpec spec_;
  double step_;
};

/// B by the source-term integral of curl j; no E.
class SourceTermFieldSampler final : public FieldSampler {
 public:
  SourceTermFieldSampler(const SourceModel& src, const QuadratureSpec& q = {},
                         const CurlOptions& curl = {}, double h = 0)
      : src_(src), spec_(q), curl_(curl), step_(h) {}
  FieldSample sample(const SpacetimePoint& p, bool with_gradient) const override;
  double period() const override { return src_.period(); }

 private:
  const SourceModel& src_;
  QuadratureSpec spec_;
  CurlOptions curl_;
  double step_;
};

/// Complex steady-state amplitudes, f(t) = Re[f~ exp(-i Omega t)].
struct PhasorAmplitude {
  cplx A0;
  CVec3 A, B, E;
  CMat3 gradB{};
};

/// Steady-state evaluation of the same retarded-potential integral for a
/// time-harmonic source: A~ = Int j~ exp(i k R) / R with the kernel
/// differentiated analytically. For rotation-covariant sources one volume
/// quadrature per (rho, z) serves every azimuth. Exterior points only.
class PhasorFieldSampler final : public FieldSampler {
 public:
  explicit PhasorFieldSampler(const SourceModel& src, const QuadratureSpec& q = {});

  PhasorAmplitude amplitude(const Vec3& x, bool with_gradient) const;
  FieldSample sample(const SpacetimePoint& p, bool with_gradient) const override;
  std::vector<FieldSample> sample_batch(std::span<const SpacetimePoint> pts,
                                        bool with_gradient) const override;
  double period() const override { return src_.period(); }
  /// Closed form for a harmonic field.
  double period_max(const Vec3& x, double t0, FieldQuantity q, int n_samples = 32) const override;

  const QuadraturePlan& plan() const { return plan_; }
  unsigned flags() const { return flags_; }

 private:
  void load_nodes(const QuadraturePlan& plan);
  PhasorAmplitude integrate(const Vec3& x, bool with_gradient) const;
  PhasorAmplitude rotated(const PhasorAmplitude& a, double alpha) const;
  FieldSample at_time(const PhasorAmplitude& a, const SpacetimePoint& p, bool with_gradient) const;
  void check_point(const SpacetimePoint& p) const;

  const SourceModel& src_;
  HarmonicInfo info_;
  QuadraturePlan plan_;
  unsigned flags_ = 0;
  std::vector<Vec3> x_;
  std::vector<double> w_;
  std::vector<CVec3> j_;
  std::vector<cplx> rho_;
};

/// Wraps a callable; used for synthetic and analytic fields.
class FunctionFieldSampler final : public FieldSampler {
 public:
  using Fn = std::function<FieldSample(const SpacetimePoint&, bool)>;
  explicit FunctionFieldSampler(Fn fn, double period = 0) : fn_(std::move(fn)), period_(period) {}
  FieldSample sample(const SpacetimePoint& p, bool with_gradient) const override {
    return fn_(p, with_gradient);
  }
  double period() const override { return period_; }

 private:
  Fn fn_;
  double period_;
};

/// Largest |Re[v exp(-i theta)]| over theta for a complex vector v = a + i b.
double harmonic_peak(std::span<const cplx> v);

}  // namespace fieldlab
