#pragma once

#include <cmath>

#include "fieldlab/vec.hpp"

namespace fieldlab {

/// Internally c = 1 with Gaussian source factors (4 pi / c). Scale factors
/// only apply when values are written out.
struct UnitSystem {
  double c = 1.0;
  double length_scale = 1.0;  ///< physical length per internal length unit
  double time_scale = 1.0;    ///< physical time per internal time unit

  double to_physical_length(double l) const { return l * length_scale; }
  double to_physical_time(double t) const { return t * time_scale; }
};

struct SpacetimePoint {
  Vec3 x;
  double t = 0;

  bool finite() const {
    return std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z) && std::isfinite(t);
  }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace fieldlab
