#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace fieldlab {

using cplx = std::complex<double>;

template <class T>
struct BasicVec3 {
  T x{}, y{}, z{};

  constexpr T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr BasicVec3& operator+=(const BasicVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr BasicVec3& operator-=(const BasicVec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  template <class S>
  constexpr BasicVec3& operator*=(S s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr BasicVec3 operator+(BasicVec3 a, const BasicVec3& b) { return a += b; }
  friend constexpr BasicVec3 operator-(BasicVec3 a, const BasicVec3& b) { return a -= b; }
  friend constexpr BasicVec3 operator-(const BasicVec3& a) { return {-a.x, -a.y, -a.z}; }
  template <class S>
  friend constexpr BasicVec3 operator*(BasicVec3 a, S s) { return a *= s; }
  template <class S>
  friend constexpr BasicVec3 operator*(S s, BasicVec3 a) { return a *= s; }
  template <class S>
  friend constexpr BasicVec3 operator/(BasicVec3 a, S s) { return a *= (T(1) / T(s)); }
  friend constexpr bool operator==(const BasicVec3&, const BasicVec3&) = default;
};

using Vec3 = BasicVec3<double>;
using CVec3 = BasicVec3<cplx>;

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 cross(const Vec3& a, const CVec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 to_complex(const Vec3& a) { return {a.x, a.y, a.z}; }
inline Vec3 real_part(const CVec3& a) { return {a.x.real(), a.y.real(), a.z.real()}; }
inline Vec3 imag_part(const CVec3& a) { return {a.x.imag(), a.y.imag(), a.z.imag()}; }

/// Row-major 3x3; for gradients, m[i][j] = d_i v_j.
template <class T>
using BasicMat3 = std::array<std::array<T, 3>, 3>;
using Mat3 = BasicMat3<double>;
using CMat3 = BasicMat3<cplx>;

inline double frobenius(const Mat3& m) {
  double s = 0;
  for (const auto& row : m)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

/// Rotation about the z axis by angle a.
struct ZRotation {
  double c = 1, s = 0;
  static ZRotation by(double a) { return {std::cos(a), std::sin(a)}; }
  template <class T>
  BasicVec3<T> apply(const BasicVec3<T>& v) const {
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
  }
  template <class T>
  BasicVec3<T> apply_inverse(const BasicVec3<T>& v) const {
    return {c * v.x + s * v.y, -s * v.x + c * v.y, v.z};
  }
  /// R m R^T
  template <class T>
  BasicMat3<T> conjugate(const BasicMat3<T>& m) const {
    const double r[3][3] = {{c, -s, 0}, {s, c, 0}, {0, 0, 1}};
    BasicMat3<T> tmp{}, out{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) tmp[i][j] += r[i][k] * m[k][j];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) out[i][j] += tmp[i][k] * r[j][k];
    return out;
  }
};

}  // namespace fieldlab
