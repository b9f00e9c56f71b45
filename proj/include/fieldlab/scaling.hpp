#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldlab/kirchhoff.hpp"

namespace fieldlab {

/// Least-squares power law y = C R^alpha fitted in log-log space.
struct ScalingReport {
  std::string quantity;
  double exponent = 0;
  double std_error = 0;
  double ci_low = 0, ci_high = 0;  ///< two-sided interval at `confidence`
  double confidence = 0.95;
  double r_squared = 1;
  double prefactor = 0;
  double r_min = 0, r_max = 0;
  std::size_t n = 0;
};

/// Throws NonPositiveSample if any y <= 0 (or R <= 0); needs at least 4 points.
ScalingReport fit_power_law(std::span<const double> R, std::span<const double> y,
                            const std::string& quantity = "", double confidence = 0.95);

/// Radii along one direction (theta from +z, phi from +x).
struct RadialSweep {
  double theta = 0.5 * kPi;
  double phi = 0;
  std::vector<double> radii;

  /// R_j = r0 g^j, j = 0..count-1.
  static RadialSweep geometric(double r0, double ratio, int count, double theta = 0.5 * kPi,
                               double phi = 0);
  Vec3 direction() const;
  Vec3 point(std::size_t j) const { return direction() * radii[j]; }
  /// Throws std::invalid_argument unless >= 4 ascending radii, ratio in
  /// (1, 2], all at least min_radius.
  void validate(double min_radius) const;
};

enum class Pipeline { from_potential, source_term_only };

/// from_potential: phasor sampler for harmonic sources, else the time-domain
/// potential sampler. source_term_only: time-domain integral of curl j.
std::unique_ptr<FieldSampler> make_pipeline_sampler(const SourceModel& src, Pipeline pipeline,
                                                    const QuadratureSpec& q = {});

/// Period-max magnitude at each point, starting at t0 (parallel over points).
std::vector<double> period_max_map(const FieldSampler& field, std::span<const Vec3> points,
                                   double t0, FieldQuantity q);

struct BeamPeak {
  double theta = 0, phi = 0;
  double value = 0;
  Vec3 direction() const;
};

/// Coarse scan of a geodesic mesh at radius R, then golden-section refinement
/// in theta and phi around the best node.
BeamPeak find_beam_peak(const FieldSampler& field, double radius, double t0, FieldQuantity q,
                        int level = 4);

struct SweepSamples {
  RadialSweep sweep;
  std::vector<double> values;  ///< period-max magnitude per radius
};

/// Period-max magnitude along the sweep. With search_direction the sweep
/// direction is replaced by the beam peak found at the smallest radius.
SweepSamples sweep_field(const SourceModel& src, const FieldSampler& field, RadialSweep sweep,
                         FieldQuantity q = FieldQuantity::magnetic, bool search_direction = true);

/// Same for the Frobenius norm of grad B.
SweepSamples gradient_sweep(const SourceModel& src, const FieldSampler& field, RadialSweep sweep,
                            bool search_direction = true);

struct SolidAngle {
  double steradians = 0;
  std::size_t cells = 0;  ///< mesh nodes inside the beam
  double peak = 0;
};

/// Area of the region where the period-max |B| is at least threshold times
/// its global maximum on a geodesic mesh of radius R. Throws MeshTooCoarse
/// when fewer than 16 nodes fall inside.
SolidAngle beam_solid_angle(const FieldSampler& field, double radius, double t0,
                            double threshold = 0.5, int level = 5,
                            FieldQuantity q = FieldQuantity::magnetic);

/// Full far-field study along the beam: field, gradient, boundary-term ratio
/// and beam solid angle versus radius.
struct ScalingStudyOptions {
  std::vector<double> radii;  ///< absolute radii
  int search_level = 4;
  int map_level = 5;
  double threshold = 0.5;
  bool field = true, gradient = true, boundary = true, solid_angle = true;
  SurfaceSpec surface;
  QuadratureSpec quadrature;
  /// Observer for the boundary decomposition, as a fraction of the radius.
  double observer_fraction = 0.5;
  /// Quantity of the field sweep and beam search; gradient and solid angle
  /// always use B.
  FieldQuantity quantity = FieldQuantity::magnetic;
  /// Fixed (theta, phi) instead of the beam search.
  std::optional<std::pair<double, double>> direction;
};

struct ScalingStudy {
  BeamPeak beam;
  std::vector<double> radii;
  std::vector<double> field, gradient, boundary_ratio, solid_angle;
  std::vector<double> closure_error;
  std::vector<ScalingReport> reports;
  unsigned flags = 0;
};

ScalingStudy run_scaling_study(const SourceModel& src, const FieldSampler& field,
                               const ScalingStudyOptions& opts);

}  // namespace fieldlab
