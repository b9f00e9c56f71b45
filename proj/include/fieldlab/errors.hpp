#pragma once

#include <stdexcept>
#include <string>

namespace fieldlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source exposes no analytic curl and no finite-difference fallback was configured.
class CurlUnavailable : public Error {
 public:
  using Error::Error;
};

/// Observation point violates the placement rule of a surface operation.
class GeometryViolation : public Error {
 public:
  using Error::Error;
};

/// Two surface refinement levels disagree by more than the surface tolerance,
/// or a beam covers too few mesh cells.
class MeshTooCoarse : public Error {
 public:
  using Error::Error;
};

class NonPositiveSample : public Error {
 public:
  using Error::Error;
};

/// A time-harmonic evaluation was requested before the source reached steady state.
class TransientRegime : public Error {
 public:
  using Error::Error;
};

/// Bit flags carried alongside numerical results.
enum Flag : unsigned {
  kFlagNone = 0,
  kFlagQuadratureNotConverged = 1u << 0,
  kFlagMeshTooCoarse = 1u << 1,
  kFlagCurlFallback = 1u << 2,
  kFlagIdentityFailed = 1u << 3,
  kFlagTransient = 1u << 4,
};

std::string describe_flags(unsigned flags);

}  // namespace fieldlab
