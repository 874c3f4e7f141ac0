#ifndef CLERAY_POINT_HPP_
#define CLERAY_POINT_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace cleray {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// A point of C^2 = R^4 in real coordinates (u1, v1, u2, v2), w_j = u_j + i v_j.
struct RealPoint4 {
  std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};

  RealPoint4() = default;
  RealPoint4(double u1, double v1, double u2, double v2) : x{u1, v1, u2, v2} {}

  static RealPoint4 from_complex(cplx w1, cplx w2) {
    return {w1.real(), w1.imag(), w2.real(), w2.imag()};
  }

  double& operator[](std::size_t k) { return x[k]; }
  double operator[](std::size_t k) const { return x[k]; }

  cplx w1() const { return {x[0], x[1]}; }
  cplx w2() const { return {x[2], x[3]}; }
  cplx w(int j) const { return j == 0 ? w1() : w2(); }

  RealPoint4& operator+=(const RealPoint4& o) {
    for (int k = 0; k < 4; ++k) x[k] += o.x[k];
    return *this;
  }
  RealPoint4& operator-=(const RealPoint4& o) {
    for (int k = 0; k < 4; ++k) x[k] -= o.x[k];
    return *this;
  }
  RealPoint4& operator*=(double s) {
    for (auto& c : x) c *= s;
    return *this;
  }
  friend RealPoint4 operator+(RealPoint4 a, const RealPoint4& b) { return a += b; }
  friend RealPoint4 operator-(RealPoint4 a, const RealPoint4& b) { return a -= b; }
  friend RealPoint4 operator*(double s, RealPoint4 a) { return a *= s; }
  friend RealPoint4 operator*(RealPoint4 a, double s) { return a *= s; }
  friend bool operator==(const RealPoint4&, const RealPoint4&) = default;
};

inline double dot(const RealPoint4& a, const RealPoint4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double norm(const RealPoint4& a) { return std::sqrt(dot(a, a)); }

inline double distance(const RealPoint4& a, const RealPoint4& b) { return norm(a - b); }

/// Multiplication by i on C^2, written in real coordinates.
inline RealPoint4 complex_structure(const RealPoint4& a) { return {-a[1], a[0], -a[3], a[2]}; }

/// dw_j(t) for a real tangent vector t.
inline cplx dw(const RealPoint4& t, int j) { return {t[2 * j], t[2 * j + 1]}; }

/// d(conj w_j)(t).
inline cplx dwbar(const RealPoint4& t, int j) { return {t[2 * j], -t[2 * j + 1]}; }

}  // namespace cleray

#endif  // CLERAY_POINT_HPP_
