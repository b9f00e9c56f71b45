#pragma once
// Closed-form fields used as independent references in tests. Nothing here
// calls the library's quadrature or differentiation code.

#include <cmath>
#include <complex>

#include "fieldlab/vec.hpp"

namespace oracle {

using fieldlab::CVec3;
using fieldlab::cplx;
using fieldlab::Vec3;

/// Oscillating point dipole p(t) = Re[p exp(-i k t)] z^ at the origin (c = 1,
/// Gaussian units). Exact at every r > 0.
struct PointDipole {
  cplx p;   // complex moment along z
  double k;

  CVec3 moment() const { return {0, 0, p}; }

  CVec3 B(const Vec3& x) const {
    const double r = fieldlab::norm(x);
    const Vec3 n = x / r;
    const cplx ikr(0, k * r);
    const cplx f = k * k * std::exp(ikr) / r * (1.0 - 1.0 / ikr);
    return fieldlab::cross(fieldlab::to_complex(n), moment()) * f;
  }
  CVec3 E(const Vec3& x) const {
    const double r = fieldlab::norm(x);
    const Vec3 n = x / r;
    const cplx e = std::exp(cplx(0, k * r));
    const CVec3 nc = fieldlab::to_complex(n);
    const CVec3 rad = fieldlab::cross(fieldlab::cross(nc, moment()), nc) * (k * k / r);
    const cplx np = n.z * p;
    const CVec3 near = (nc * (3.0 * np) - moment()) * (1.0 / (r * r * r) - cplx(0, k) / (r * r));
    return (rad + near) * e;
  }
  /// Vector potential (Lorenz gauge): A = -i k p exp(ikr) / r.
  CVec3 A(const Vec3& x) const {
    const double r = fieldlab::norm(x);
    return moment() * (cplx(0, -k) * std::exp(cplx(0, k * r)) / r);
  }
  /// Scalar potential: phi = (n.p) exp(ikr) (1/r^2 - ik/r).
  cplx A0(const Vec3& x) const {
    const double r = fieldlab::norm(x);
    return x.z / r * p * std::exp(cplx(0, k * r)) * (1.0 / (r * r) - cplx(0, k) / r);
  }

  static Vec3 at(const CVec3& v, double t, double k) {
    return fieldlab::real_part(v * std::exp(cplx(0, -k * t)));
  }
};

/// Moment of a Gaussian-smeared dipole as seen from outside its support.
inline cplx smeared_moment(cplx p, double k, double sigma) {
  return p * std::exp(-0.5 * k * k * sigma * sigma);
}

/// Spherically symmetric charge q: phi = q / r, E = q x / r^3 outside.
struct Coulomb {
  double q = 1;
  double phi(const Vec3& x) const { return q / fieldlab::norm(x); }
  Vec3 E(const Vec3& x) const {
    const double r = fieldlab::norm(x);
    return x * (q / (r * r * r));
  }
  Vec3 grad_phi(const Vec3& x) const { return -E(x); }
};

}  // namespace oracle
