#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fieldlab/units.hpp"
#include "fieldlab/vec.hpp"

namespace fieldlab {

/// Region outside of which a source's current and charge vanish identically.
/// Every region is centred on the origin and symmetric about the z axis.
struct SupportRegion {
  enum class Kind { empty, ball, cylinder };

  Kind kind = Kind::empty;
  double radius = 0;        // ball radius, or outer cylinder radius
  double inner_radius = 0;  // cylinder only
  double half_height = 0;   // cylinder only

  static SupportRegion none() { return {}; }
  static SupportRegion ball(double r) { return {Kind::ball, r, 0, 0}; }
  static SupportRegion cylinder(double r_in, double r_out, double h) {
    return {Kind::cylinder, r_out, r_in, h};
  }

  bool is_empty() const { return kind == Kind::empty; }
  bool contains(const Vec3& x) const;
  /// Radius of the smallest origin-centred ball containing the region.
  double bounding_radius() const;
  /// Smallest region of either kind containing both.
  SupportRegion united(const SupportRegion& other) const;

  // Cylindrical integration box [r_lo, r_hi] x [-z_half, z_half].
  double r_lo() const { return kind == Kind::cylinder ? inner_radius : 0.0; }
  double r_hi() const { return radius; }
  double z_half() const { return kind == Kind::cylinder ? half_height : radius; }
};

/// Steady-state description of a source that becomes exactly time harmonic,
/// f(x, t) = Re[f~(x) exp(-i Omega t)] for t >= steady_from.
struct HarmonicInfo {
  double omega = 0;
  /// f~(R_a x) = exp(i m a) R_a f~(x) for rotations R_a about z, when covariant.
  int azimuthal_order = 0;
  bool rotation_covariant = false;
  double steady_from = 0;
};

/// A localized current density j(x, t) and charge density j0(x, t) (c = 1).
/// Implementations are immutable after construction and safe to evaluate
/// concurrently.
class SourceModel {
 public:
  virtual ~SourceModel() = default;

  virtual std::string kind() const = 0;
  virtual Vec3 current(const SpacetimePoint& p) const = 0;
  virtual double charge(const SpacetimePoint&) const { return 0.0; }
  virtual bool has_charge() const { return false; }
  virtual bool has_analytic_curl() const { return false; }
  virtual Vec3 analytic_curl_current(const SpacetimePoint& p) const;
  virtual SupportRegion support() const = 0;

  /// Current vanishes for t <= start_time().
  virtual double start_time() const { return 0.0; }
  virtual double switch_on_duration() const { return 0.0; }
  /// Static sources that exist for all time (no switch-on).
  virtual bool eternal() const { return false; }

  virtual std::optional<HarmonicInfo> harmonic() const { return std::nullopt; }
  virtual CVec3 current_amplitude(const Vec3& x) const;
  virtual cplx charge_amplitude(const Vec3& x) const;
  virtual CVec3 curl_current_amplitude(const Vec3& x) const;

  /// Characteristic magnitudes used for normalisation.
  virtual double peak_current() const = 0;
  virtual double peak_charge() const { return 0.0; }
  /// Smallest spatial feature size of the distribution.
  virtual double length_scale() const = 0;
  /// Highest pattern speed over the support (omega * r_max); 0 if not rotating.
  virtual double pattern_speed() const { return 0.0; }
  /// Dominant angular frequency, 0 for static sources.
  double angular_frequency() const;
  /// 2 pi / Omega, or 0 for static sources.
  double period() const;
};

using SourcePtr = std::shared_ptr<const SourceModel>;

/// Quintic smoothstep ramp from 0 at t = 0 to 1 at t = tau (C2 at both ends).
double ramp(double t, double tau);
double ramp_rate(double t, double tau);

struct CurlOptions {
  /// Central-difference step used when the source has no analytic curl.
  std::optional<double> fallback_step;
};

Vec3 eval_current(const SourceModel& src, const SpacetimePoint& p);
double eval_charge(const SourceModel& src, const SpacetimePoint& p);
/// Throws CurlUnavailable when neither analytic curl nor a fallback step exists.
Vec3 eval_curl_current(const SourceModel& src, const SpacetimePoint& p,
                       const CurlOptions& opts = {});
/// Second-order central-difference curl (independent of any analytic form).
Vec3 finite_difference_curl(const SourceModel& src, const SpacetimePoint& p, double h);
SupportRegion support_bounds(const SourceModel& src);

/// Earliest observation time at x for which every retarded sample of the
/// source is in steady state; -inf for eternal sources.
double steady_state_time(const SourceModel& src, const Vec3& x);
/// Same, for every point within distance `reach` of the origin.
double steady_state_time(const SourceModel& src, double reach);

}  // namespace fieldlab
