#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fieldlab/errors.hpp"
#include "fieldlab/greens.hpp"
#include "fieldlab/sources.hpp"

namespace fieldlab {

enum class RunKind { potential, field, decompose, reconstruct, cancellation, scaling, validate };

const char* to_string(RunKind k);
std::optional<RunKind> parse_run_kind(const std::string& s);
/// "potential, field, ..." in declaration order.
std::string run_kind_list();

/// A problem with one key of a scenario document (line is 1-based, 0 if unknown).
struct FieldError {
  std::string key;
  int line = 0;
  std::string message;
};

/// Malformed document or unrecognised run kind.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::vector<FieldError> errors = {})
      : Error(what), errors(std::move(errors)) {}
  std::vector<FieldError> errors;
};

/// Well-formed document with invalid values or inconsistent geometry.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<FieldError> errors)
      : Error(what), errors(std::move(errors)) {}
  std::vector<FieldError> errors;
};

struct DipoleSpec {
  double moment = 1;
  double omega = 2 * kPi;
  double sigma = 0.05;
  double tau_on = -1;  ///< < 0: one period
  double start = 0;
};

struct BlobSpec {
  double charge = 1;
  double sigma = 0.5;
};

struct BallSpec {
  Vec3 current{0, 0, 1};
  double radius = 1;
  double tau_on = 1;
};

struct SourceSpec {
  std::string kind = "dipole";  ///< dipole | blob | rotating | uniform_ball | zero
  DipoleSpec dipole;
  BlobSpec blob;
  RotatingSourceParams rotating;
  BallSpec ball;
};

SourcePtr build_source(const SourceSpec& s);

/// Lengths in the geometry and sweep blocks are multiples of this unit.
enum class LengthUnit { absolute, support, wavelength };
const char* to_string(LengthUnit u);

struct GeometrySpec {
  LengthUnit units = LengthUnit::absolute;
  std::vector<Vec3> points;
  int random_points = 0;
  double point_radius = 50;
  std::optional<double> time;  ///< absent: earliest steady-state time
  double inner_radius = 10;
  double outer_radius = 40;
  double observer_radius = 20;
  Vec3 direction{1, 0.3, 0.2};
  std::vector<double> boundary_radii{20, 40, 80, 160};
  double observer_fraction = 0.5;
};

struct SweepSpec {
  double r0 = 20;
  double ratio = 1.6817928305074290;  // 2^0.75
  int count = 5;
  bool search = true;
  double theta = 0.5 * kPi;
  double phi = 0;
  double threshold = 0.5;
  std::string pipeline = "from_potential";  ///< or source_term_only
  std::string quantity = "magnetic";        ///< magnetic | electric
  bool gradient = true;
  bool boundary = true;
  bool solid_angle = true;
};

struct NumericsSpec {
  QuadratureSpec quadrature;
  int mesh_level = 5;
  int search_level = 4;
  double surface_tolerance = 1e-3;
  double step = 0;  ///< 0: automatic
  bool electric = true;
  bool phasor = true;  ///< frequency-domain boundary data for harmonic sources
};

struct ValidationSpec {
  int exterior_probes = 3;
  int interior_probes = 1;
  double probe_radius = 5;  ///< absolute
  int gauge_trials = 10;
  int lorenz_points = 5;
};

struct ToleranceSpec {
  double reconstruct = 0.01;
  double cancellation = 1e-3;
  double closure = 0.02;
  double residual = 1e-2;
  double gauge = 1e-6;
};

struct OutputSpec {
  std::string dir = ".";
  std::string csv = "results.csv";
  std::string json = "summary.json";
};

struct Scenario {
  RunKind run = RunKind::field;
  SourceSpec source;
  GeometrySpec geometry;
  SweepSpec sweep;
  NumericsSpec numerics;
  ValidationSpec validation;
  ToleranceSpec tolerances;
  OutputSpec output;
  int workers = 0;
  std::uint64_t seed = 1;
};

/// Parses a YAML (or JSON) scenario. Missing keys take documented defaults;
/// defaults that depend on the run kind or source are resolved here.
/// `run_override` supplies the run kind when the document has none and must
/// agree with it otherwise.
Scenario parse_scenario(const std::string& text,
                        std::optional<RunKind> run_override = std::nullopt);

/// Fully resolved scenario as JSON; feeding it back to parse_scenario yields
/// the same Scenario.
nlohmann::json to_json(const Scenario& s);

}  // namespace fieldlab
