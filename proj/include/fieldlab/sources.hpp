#pragma once

#include <vector>

#include "fieldlab/source.hpp"

namespace fieldlab {

class ZeroSource final : public SourceModel {
 public:
  std::string kind() const override { return "zero"; }
  Vec3 current(const SpacetimePoint&) const override { return {}; }
  bool has_analytic_curl() const override { return true; }
  Vec3 analytic_curl_current(const SpacetimePoint&) const override { return {}; }
  SupportRegion support() const override { return SupportRegion::none(); }
  bool eternal() const override { return true; }
  std::optional<HarmonicInfo> harmonic() const override;
  CVec3 current_amplitude(const Vec3&) const override { return {}; }
  cplx charge_amplitude(const Vec3&) const override { return 0.0; }
  CVec3 curl_current_amplitude(const Vec3&) const override { return {}; }
  double peak_current() const override { return 0.0; }
  double length_scale() const override { return 1.0; }
};

/// Radius (in units of sigma) beyond which a unit Gaussian drops below 1e-12 of its peak.
double gaussian_cutoff_sigmas();

/// Static Gaussian charge cloud, truncated where it falls below 1e-12 of peak.
/// Exists for all time, so it carries no switch-on.
class StaticChargeBlob final : public SourceModel {
 public:
  StaticChargeBlob(double total_charge, double sigma);

  std::string kind() const override { return "blob"; }
  Vec3 current(const SpacetimePoint&) const override { return {}; }
  double charge(const SpacetimePoint& p) const override;
  bool has_charge() const override { return true; }
  bool has_analytic_curl() const override { return true; }
  Vec3 analytic_curl_current(const SpacetimePoint&) const override { return {}; }
  SupportRegion support() const override;
  bool eternal() const override { return true; }
  std::optional<HarmonicInfo> harmonic() const override;
  CVec3 current_amplitude(const Vec3&) const override { return {}; }
  cplx charge_amplitude(const Vec3& x) const override;
  CVec3 curl_current_amplitude(const Vec3&) const override { return {}; }
  double peak_current() const override { return 0.0; }
  double peak_charge() const override;
  double length_scale() const override { return sigma_; }

  double total_charge() const { return q_; }
  double sigma() const { return sigma_; }

 private:
  double density(const Vec3& x) const;
  double q_, sigma_;
};

/// Oscillating electric dipole p(t) z^ smeared by a Gaussian of width sigma:
/// P = p(t) g(x) z^, j = dP/dt, rho = -div P. Continuity holds exactly.
/// p(t) = p0 ramp(t - t0) sin(omega (t - t0)).
class HertzianDipoleSource final : public SourceModel {
 public:
  HertzianDipoleSource(double p0, double omega, double sigma, double tau_on = -1,
                       double start = 0);

  std::string kind() const override { return "dipole"; }
  Vec3 current(const SpacetimePoint& p) const override;
  double charge(const SpacetimePoint& p) const override;
  bool has_charge() const override { return true; }
  bool has_analytic_curl() const override { return true; }
  Vec3 analytic_curl_current(const SpacetimePoint& p) const override;
  SupportRegion support() const override;
  double start_time() const override { return start_; }
  double switch_on_duration() const override { return tau_; }
  std::optional<HarmonicInfo> harmonic() const override;
  CVec3 current_amplitude(const Vec3& x) const override;
  cplx charge_amplitude(const Vec3& x) const override;
  CVec3 curl_current_amplitude(const Vec3& x) const override;
  double peak_current() const override;
  double peak_charge() const override;
  double length_scale() const override { return sigma_; }

  double moment() const { return p0_; }
  double omega() const { return omega_; }
  double sigma() const { return sigma_; }
  /// Dipole moment p(t) and its first two derivatives.
  double moment_at(double t) const;
  double moment_rate(double t) const;
  /// Complex steady-state moment: p(t) = Re[p~ exp(-i omega t)].
  cplx moment_amplitude() const;

 private:
  double envelope(const Vec3& x) const;
  double p0_, omega_, sigma_, tau_, start_;
};

enum class Polarization { azimuthal, radial, axial };

/// Polarization P = P0(r, z) cos(m (phi - omega t)) ramp(t - t0) e^ whose
/// distribution pattern rotates rigidly with angular velocity omega; j = dP/dt.
/// P0 is a product of (1 - s^2)^4 bumps over r in [r_min, r_max] and
/// z in [-h, h]. With bound_charge the polarization charge -div P is included.
struct RotatingSourceParams {
  int mode = 5;
  double omega = 1.5;
  double r_min = 0.5;
  double r_max = 1.0;
  double half_height = 0.25;
  double amplitude = 1.0;
  Polarization polarization = Polarization::azimuthal;
  bool bound_charge = true;
  double tau_on = -1;  // < 0: one rotation period
  double start = 0;
};

class RotatingPolarizationSource final : public SourceModel {
 public:
  explicit RotatingPolarizationSource(const RotatingSourceParams& params);

  std::string kind() const override { return "rotating"; }
  Vec3 current(const SpacetimePoint& p) const override;
  double charge(const SpacetimePoint& p) const override;
  bool has_charge() const override { return params_.bound_charge; }
  bool has_analytic_curl() const override { return true; }
  Vec3 analytic_curl_current(const SpacetimePoint& p) const override;
  SupportRegion support() const override;
  double start_time() const override { return params_.start; }
  double switch_on_duration() const override { return tau_; }
  std::optional<HarmonicInfo> harmonic() const override;
  CVec3 current_amplitude(const Vec3& x) const override;
  cplx charge_amplitude(const Vec3& x) const override;
  CVec3 curl_current_amplitude(const Vec3& x) const override;
  double peak_current() const override;
  double peak_charge() const override;
  double length_scale() const override;
  double pattern_speed() const override { return params_.omega * params_.r_max; }

  const RotatingSourceParams& params() const { return params_; }
  bool superluminal() const { return params_.omega * params_.r_max > 1.0; }
  /// Polarization vector P(x, t).
  Vec3 polarization(const SpacetimePoint& p) const;

 private:
  struct Envelope {
    double p0 = 0, dr = 0, dz = 0;
  };
  Envelope envelope(double r, double z) const;
  template <class T>
  struct Fields {
    BasicVec3<T> current, curl;
    T charge;
  };
  // Angular factors: c = C, ct = dC/dt, cp = dC/dphi, cpt = d2C/dphi dt.
  template <class T>
  Fields<T> assemble(const Vec3& x, T c, T ct, T cp, T cpt) const;

  RotatingSourceParams params_;
  double tau_;
};

/// Spatially uniform current j0 inside a ball, switched on by the ramp.
/// Has no analytic curl (the current is discontinuous at the ball surface).
class UniformBallCurrent final : public SourceModel {
 public:
  UniformBallCurrent(const Vec3& j0, double radius, double tau_on = 0);

  std::string kind() const override { return "uniform_ball"; }
  Vec3 current(const SpacetimePoint& p) const override;
  SupportRegion support() const override { return SupportRegion::ball(radius_); }
  double switch_on_duration() const override { return tau_; }
  double peak_current() const override { return norm(j0_); }
  double length_scale() const override { return radius_; }

 private:
  Vec3 j0_;
  double radius_, tau_;
};

/// Sum of sources; integrated over the union of their supports.
class SuperposedSource final : public SourceModel {
 public:
  explicit SuperposedSource(std::vector<SourcePtr> parts);

  std::string kind() const override { return "superposed"; }
  Vec3 current(const SpacetimePoint& p) const override;
  double charge(const SpacetimePoint& p) const override;
  bool has_charge() const override;
  bool has_analytic_curl() const override;
  Vec3 analytic_curl_current(const SpacetimePoint& p) const override;
  SupportRegion support() const override;
  double start_time() const override;
  double switch_on_duration() const override;
  bool eternal() const override;
  std::optional<HarmonicInfo> harmonic() const override;
  CVec3 current_amplitude(const Vec3& x) const override;
  cplx charge_amplitude(const Vec3& x) const override;
  CVec3 curl_current_amplitude(const Vec3& x) const override;
  double peak_current() const override;
  double peak_charge() const override;
  double length_scale() const override;
  double pattern_speed() const override;

 private:
  std::vector<SourcePtr> parts_;
};

}  // namespace fieldlab
