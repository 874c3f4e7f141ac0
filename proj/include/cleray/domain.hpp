#ifndef CLERAY_DOMAIN_HPP_
#define CLERAY_DOMAIN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cleray/errors.hpp"
#include "cleray/point.hpp"

namespace cleray {

enum class DomainKind { Flat, PowerM, Ball };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Flat: return "flat";
    case DomainKind::PowerM: return "power_m";
    case DomainKind::Ball: return "ball";
  }
  return "unknown";
}

/// The three model domains share the separable form
///   rho(w) = |u1|^p0 + |v1|^p1 + |u2|^p2 + |v2|^p3 - 1
/// with exponents (2,4,2,2) for Flat, (m,2,2,2) for PowerM and (2,2,2,2) for Ball.
class Domain {
 public:
  static Domain flat() { return Domain(DomainKind::Flat, 0.0, {2.0, 4.0, 2.0, 2.0}); }
  static Domain ball() { return Domain(DomainKind::Ball, 0.0, {2.0, 2.0, 2.0, 2.0}); }
  static Domain power_m(double m) {
    if (!(m > 1.0 && m < 2.0)) {
      throw ConfigError("power_m domain requires 1 < m < 2, got " + std::to_string(m));
    }
    return Domain(DomainKind::PowerM, m, {m, 2.0, 2.0, 2.0});
  }

  DomainKind kind() const { return kind_; }
  double m() const { return m_; }
  double exponent(int k) const { return p_[k]; }
  const std::array<double, 4>& exponents() const { return p_; }

  std::string name() const {
    if (kind_ == DomainKind::PowerM) return "power_m(m=" + std::to_string(m_) + ")";
    return to_string(kind_);
  }

  /// phi_k(x) = |x|^p_k and its first two derivatives.
  double phi(int k, double x) const { return ipow(std::abs(x), p_[k]); }
  double dphi(int k, double x) const {
    const double p = p_[k];
    if (p == 2.0) return 2.0 * x;
    if (p == 4.0) return 4.0 * x * x * x;
    if (x == 0.0) return 0.0;
    return p * std::pow(std::abs(x), p - 1.0) * (x > 0 ? 1.0 : -1.0);
  }
  double ddphi(int k, double x) const {
    const double p = p_[k];
    if (p == 2.0) return 2.0;
    if (p == 4.0) return 12.0 * x * x;
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    return p * (p - 1.0) * std::pow(std::abs(x), p - 2.0);
  }
  /// Inverse of phi_k on [0, inf).
  double phi_inverse(int k, double y) const {
    const double p = p_[k];
    if (p == 2.0) return std::sqrt(y);
    if (p == 4.0) return std::sqrt(std::sqrt(y));
    return std::pow(y, 1.0 / p);
  }

  friend bool operator==(const Domain& a, const Domain& b) { return a.kind_ == b.kind_ && a.m_ == b.m_; }

 private:
  Domain(DomainKind k, double m, std::array<double, 4> p) : kind_(k), m_(m), p_(p) {}

  static double ipow(double a, double p) {
    if (p == 2.0) return a * a;
    if (p == 4.0) {
      const double a2 = a * a;
      return a2 * a2;
    }
    return std::pow(a, p);
  }

  DomainKind kind_;
  double m_;
  std::array<double, 4> p_;
};

using RealMatrix4 = std::array<std::array<double, 4>, 4>;
using ComplexMatrix2 = std::array<std::array<cplx, 2>, 2>;

struct DerivativeStack {
  double rho = 0.0;
  RealPoint4 real_grad;
  std::array<cplx, 2> hol_grad{};   // d rho / d w_j
  RealMatrix4 real_hess{};
  ComplexMatrix2 hol_hess{};        // d^2 rho / d w_j d w_k
  ComplexMatrix2 mixed_hess{};      // d^2 rho / d w_j d conj(w_k)
  bool hess_finite = true;
};

inline double rho(const Domain& d, const RealPoint4& w) {
  double s = -1.0;
  for (int k = 0; k < 4; ++k) s += d.phi(k, w[k]);
  return s;
}

inline RealPoint4 real_gradient(const Domain& d, const RealPoint4& w) {
  return {d.dphi(0, w[0]), d.dphi(1, w[1]), d.dphi(2, w[2]), d.dphi(3, w[3])};
}

/// Wirtinger gradient from a real gradient: d/dw_j = (d/du_j - i d/dv_j) / 2.
inline std::array<cplx, 2> holomorphic_gradient(const RealPoint4& g) {
  return {cplx(0.5 * g[0], -0.5 * g[1]), cplx(0.5 * g[2], -0.5 * g[3])};
}

/// Complex second derivatives from the real Hessian.
inline void complex_hessians(const RealMatrix4& h, ComplexMatrix2& hol, ComplexMatrix2& mixed) {
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const double uu = h[2 * j][2 * k], vv = h[2 * j + 1][2 * k + 1];
      const double uv = h[2 * j][2 * k + 1], vu = h[2 * j + 1][2 * k];
      hol[j][k] = 0.25 * cplx(uu - vv, -(uv + vu));
      mixed[j][k] = 0.25 * cplx(uu + vv, uv - vu);
    }
  }
}

inline DerivativeStack derivative_stack(const Domain& d, const RealPoint4& w) {
  DerivativeStack s;
  s.rho = rho(d, w);
  s.real_grad = real_gradient(d, w);
  s.hol_grad = holomorphic_gradient(s.real_grad);
  for (int k = 0; k < 4; ++k) {
    const double h = d.ddphi(k, w[k]);
    if (!std::isfinite(h)) s.hess_finite = false;
    s.real_hess[k][k] = h;
  }
  if (s.hess_finite) complex_hessians(s.real_hess, s.hol_hess, s.mixed_hess);
  return s;
}

/// <a, b> = a_1 b_1 + a_2 b_2, the non-hermitian pairing.
inline cplx pairing(const std::array<cplx, 2>& a, cplx b1, cplx b2) { return a[0] * b1 + a[1] * b2; }

/// Delta(w, z) = <d rho(w), w - z>.
inline cplx delta(const Domain& d, const RealPoint4& w, const RealPoint4& z) {
  const auto g = holomorphic_gradient(real_gradient(d, w));
  return pairing(g, w.w1() - z.w1(), w.w2() - z.w2());
}

inline cplx delta(const std::array<cplx, 2>& hol_grad, const RealPoint4& w, const RealPoint4& z) {
  return pairing(hol_grad, w.w1() - z.w1(), w.w2() - z.w2());
}

/// Coefficients (dw1, dw2, dconj(w1), dconj(w2)) of the one-form
/// sum_j (w_j - z_j) d(d rho / d w_j).
inline std::array<cplx, 4> hessian_one_form(const DerivativeStack& s, const RealPoint4& w, const RealPoint4& z) {
  const cplx d1 = w.w1() - z.w1(), d2 = w.w2() - z.w2();
  std::array<cplx, 4> c{};
  for (int k = 0; k < 2; ++k) {
    c[k] = s.hol_hess[0][k] * d1 + s.hol_hess[1][k] * d2;
    c[2 + k] = s.mixed_hess[0][k] * d1 + s.mixed_hess[1][k] * d2;
  }
  return c;
}

/// phi_k'(w)(w - z) - phi_k(w) + phi_k(z), written without cancellation where possible.
inline double bregman(const Domain& d, int k, double w, double z) {
  const double p = d.exponent(k), e = w - z;
  if (p == 2.0) return e * e;
  if (p == 4.0) return e * e * (3.0 * w * w + 2.0 * w * z + z * z);
  return d.dphi(k, w) * e - d.phi(k, w) + d.phi(k, z);
}

/// Re Delta(w, z) for w, z on the boundary: half the sum of the coordinate Bregman divergences
/// (rho(w) = rho(z) = 0 removes the zeroth-order terms). Accurate near the diagonal.
inline double re_delta_boundary(const Domain& d, const RealPoint4& w, const RealPoint4& z) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += bregman(d, k, w[k], z[k]);
  return 0.5 * s;
}

inline RealPoint4 inward_normal(const Domain& d, const RealPoint4& z) {
  const RealPoint4 g = real_gradient(d, z);
  const double n = norm(g);
  if (n < 1e-12) throw DegenerateGradient("gradient of rho vanishes at the requested point");
  return (-1.0 / n) * g;
}

/// Point on the boundary along the ray from the origin through direction dir.
inline RealPoint4 radial_boundary_point(const Domain& d, const RealPoint4& dir) {
  double lo = 0.0, hi = 1.0;
  while (rho(d, hi * dir) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rho(d, mid * dir) < 0.0 ? lo : hi) = mid;
  }
  // Newton polish along the ray.
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const RealPoint4 p = t * dir;
    const double f = rho(d, p), df = dot(real_gradient(d, p), dir);
    if (df == 0.0) break;
    const double tn = t - f / df;
    if (!(tn > lo && tn < hi)) break;
    t = tn;
  }
  return t * dir;
}

/// Deterministic random boundary samples (radial projection of Gaussian directions).
inline std::vector<RealPoint4> sample_boundary(const Domain& d, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<RealPoint4> out;
  out.reserve(count);
  while (out.size() < count) {
    RealPoint4 dir(nd(gen), nd(gen), nd(gen), nd(gen));
    if (norm(dir) < 1e-8) continue;
    out.push_back(radial_boundary_point(d, dir));
  }
  return out;
}

/// Largest push length for which z + eps N(z) stays inside and on the near side of the
/// medial axis, estimated as half the chord length along the inward normal (min over samples).
inline double eps_max(const Domain& d, std::size_t samples = 2000, std::uint64_t seed = 7) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : sample_boundary(d, samples, seed)) {
    const RealPoint4 n = inward_normal(d, z);
    double lo = 1e-9, hi = 4.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rho(d, z + mid * n) < 0.0 ? lo : hi) = mid;
    }
    best = std::min(best, 0.5 * lo);
  }
  return best;
}

inline RealPoint4 eps_push(const Domain& d, const RealPoint4& z, double eps, double eps_limit) {
  if (eps < 0.0) throw EpsTooLarge("eps must be non-negative");
  if (eps == 0.0) return z;
  if (eps >= eps_limit) {
    throw EpsTooLarge("eps = " + std::to_string(eps) + " exceeds eps_max = " + std::to_string(eps_limit));
  }
  const RealPoint4 p = z + eps * inward_normal(d, z);
  if (!(rho(d, p) < 0.0)) throw EpsTooLarge("pushed point is not interior");
  return p;
}

inline RealPoint4 eps_push(const Domain& d, const RealPoint4& z, double eps) {
  return eps_push(d, z, eps, std::numeric_limits<double>::infinity());
}

/// Distance from an interior point to the boundary, as the smallest distance to a supporting
/// hyperplane at the given boundary samples (exact in the limit of dense samples, D convex).
inline double distance_to_boundary(const Domain& d, const RealPoint4& z, const std::vector<RealPoint4>& samples) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    const RealPoint4 g = real_gradient(d, p);
    best = std::min(best, dot(p - z, g) / norm(g));
  }
  return best;
}

/// Seeded interior points at distance at least min_dist from the boundary.
inline std::vector<RealPoint4> interior_points(const Domain& d, std::size_t count, double min_dist, std::uint64_t seed) {
  const auto samples = sample_boundary(d, 20000, seed + 17);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<RealPoint4> out;
  for (int tries = 0; out.size() < count && tries < 1000000; ++tries) {
    const RealPoint4 z(u(gen), u(gen), u(gen), u(gen));
    if (rho(d, z) < 0.0 && distance_to_boundary(d, z, samples) >= min_dist) out.push_back(z);
  }
  if (out.size() < count) throw ConfigError("could not place interior points at the requested distance");
  return out;
}

/// Boundary point with prescribed (u1, v1, v2) and u2 >= 0 solved from rho = 0.
inline RealPoint4 boundary_point_solving(const Domain& d, RealPoint4 w, int solve_for, double sign = 1.0) {
  double s = 1.0;
  for (int k = 0; k < 4; ++k)
    if (k != solve_for) s -= d.phi(k, w[k]);
  if (s < 0.0) throw ConfigError("no boundary point with the requested coordinates");
  w[solve_for] = sign * d.phi_inverse(solve_for, s);
  return w;
}

}  // namespace cleray

#endif  // CLERAY_DOMAIN_HPP_
