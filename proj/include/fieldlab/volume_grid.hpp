#pragma once

#include <memory>
#include <vector>

#include "fieldlab/source.hpp"

namespace fieldlab {

/// Product rule over the cylindrical box enclosing a support region:
/// Gauss-Legendre in r and z, trapezoid in phi. Weights include the r Jacobian.
struct CylinderGrid {
  std::vector<Vec3> x;
  std::vector<double> w;
};

std::shared_ptr<const CylinderGrid> cylinder_grid(const SupportRegion& region, int n_r, int n_phi,
                                                  int n_z);

/// Directions for an observer-centred rule: GL in cos(theta) x trapezoid in phi.
struct DirectionSet {
  std::vector<Vec3> n;
  std::vector<double> w;
};

std::shared_ptr<const DirectionSet> direction_set(int n_theta, int n_phi);

}  // namespace fieldlab
