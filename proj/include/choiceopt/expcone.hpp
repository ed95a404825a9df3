// Copyright 2026 The choiceopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The exponential cone
//   K = closure{(a1, a2, a3) : a3 <= a2 log(a1 / a2), a1 > 0, a2 > 0}
// its dual
//   K* = closure{(b1, b2, b3) : b1 >= -b3 exp(b2 / b3 - 1), b1 > 0, b3 < 0}
// and the logarithmically homogeneous barrier
//   F(a) = -log(a2 log(a1 / a2) - a3) - log a1 - log a2      (parameter 3).

#ifndef CHOICEOPT_EXPCONE_HPP
#define CHOICEOPT_EXPCONE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace choiceopt::conic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kExpConeDegree = 3.0;

/// Central point shared by K and K*: s = -grad F(s).
inline Vec3 expcone_central_point() { return {1.290928, 0.805102, -0.827838}; }

inline bool expcone_contains(double a1, double a2, double a3, double tol) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3)) return false;
  if (a2 > tol) {
    if (a1 <= 0.0) return false;
    return a3 - a2 * std::log(a1 / a2) <= tol;
  }
  return a2 >= -tol && a1 >= -tol && a3 <= tol;
}

inline bool expcone_dual_contains(double b1, double b2, double b3, double tol) {
  if (!std::isfinite(b1) || !std::isfinite(b2) || !std::isfinite(b3)) return false;
  if (b3 < 0.0) return b1 >= -b3 * std::exp(b2 / b3 - 1.0) - tol;
  return b3 <= tol && b1 >= -tol && b2 >= -tol;
}

/// Signed violation: <= 0 inside K, > 0 outside. On the a2 > 0 branch this is
/// a3 - a2 log(a1 / a2).
inline double expcone_violation(double a1, double a2, double a3) {
  if (a2 > 0.0) return a1 > 0.0 ? a3 - a2 * std::log(a1 / a2) : std::max(a2, -a1);
  return std::max({-a2, -a1, a3});
}

inline bool expcone_interior(const Vec3& a) {
  if (!(a(0) > 0.0) || !(a(1) > 0.0) || !std::isfinite(a(2))) return false;
  return a(1) * std::log(a(0) / a(1)) - a(2) > 0.0;
}

inline bool expcone_dual_interior(const Vec3& b) {
  if (!(b(0) > 0.0) || !(b(2) < 0.0) || !std::isfinite(b(1))) return false;
  return std::log(b(0)) > std::log(-b(2)) + b(1) / b(2) - 1.0;
}

/// Strict slack of a dual-cone point: min(b1 - (-b3) exp(b2/b3 - 1), -b3).
/// Positive exactly on the interior of K*.
inline double expcone_dual_margin(const Vec3& b) {
  if (!(b(2) < 0.0)) return std::min(-std::abs(b(2)), 0.0);
  return std::min(b(0) + b(2) * std::exp(b(1) / b(2) - 1.0), -b(2));
}

struct BarrierDerivatives {
  Vec3 gradient;
  Mat3 hessian;
};

/// Gradient and Hessian of F at an interior point of K.
inline BarrierDerivatives expcone_barrier(const Vec3& a) {
  const double x = a(0), y = a(1);
  const double log_ratio = std::log(x / y);
  const double psi = y * log_ratio - a(2);
  const Vec3 dpsi(y / x, log_ratio - 1.0, -1.0);
  Mat3 d2psi;
  d2psi << -y / (x * x), 1.0 / x, 0.0,
           1.0 / x, -1.0 / y, 0.0,
           0.0, 0.0, 0.0;
  BarrierDerivatives out;
  out.gradient = -dpsi / psi - Vec3(1.0 / x, 1.0 / y, 0.0);
  out.hessian = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
  out.hessian(0, 0) += 1.0 / (x * x);
  out.hessian(1, 1) += 1.0 / (y * y);
  return out;
}

/// Inverse Hessian of F at an interior point, from the Schur complement onto
/// (a1, a2). Every term is positive, so no cancellation near the boundary.
inline Mat3 expcone_inverse_hessian(const Vec3& a) {
  const double x = a(0), y = a(1);
  const double log_ratio = std::log(x / y);
  const double psi = y * log_ratio - a(2);
  const double s11 = y / (x * x * psi) + 1.0 / (x * x);
  const double s22 = 1.0 / (y * psi) + 1.0 / (y * y);
  const double s12 = -1.0 / (x * psi);
  const double det = (2.0 / (y * psi) + 1.0 / (y * y)) / (x * x);
  Eigen::Matrix2d s_inv;
  s_inv << s22 / det, -s12 / det,
           -s12 / det, s11 / det;
  const Eigen::Vector2d g(y / x, log_ratio - 1.0);
  const Eigen::Vector2d sg = s_inv * g;
  Mat3 out;
  out.block<2, 2>(0, 0) = s_inv;
  out.block<2, 1>(0, 2) = sg;
  out.block<1, 2>(2, 0) = sg.transpose();
  out(2, 2) = psi * psi + g.dot(sg);
  return out;
}

/// H^{-1} = L diag(d) L' with L unit lower triangular. The pivots d are
/// formed without cancellation; d(2) = psi^2.
struct InverseHessianFactor {
  Mat3 L;
  Vec3 d;
};

inline InverseHessianFactor expcone_inverse_hessian_factor(const Vec3& a) {
  const double x = a(0), y = a(1);
  const double log_ratio = std::log(x / y);
  const double psi = y * log_ratio - a(2);
  const double s22 = 1.0 / (y * psi) + 1.0 / (y * y);
  const double det = (2.0 / (y * psi) + 1.0 / (y * y)) / (x * x);
  const double l = (1.0 / (x * psi)) / s22;
  const double g1 = y / x, g2 = log_ratio - 1.0;
  InverseHessianFactor out;
  out.L << 1.0, 0.0, 0.0,
           l, 1.0, 0.0,
           g1 + g2 * l, g2, 1.0;
  out.d = Vec3(s22 / det, 1.0 / s22, psi * psi);
  return out;
}

/// Largest alpha in [0, alpha_max] keeping point + alpha * dir in the
/// interior (of K or K*, per `dual`), located by bisection.
inline double expcone_max_step(const Vec3& point, const Vec3& dir, double alpha_max, bool dual) {
  auto inside = [&](double alpha) {
    const Vec3 p = point + alpha * dir;
    return dual ? expcone_dual_interior(p) : expcone_interior(p);
  };
  if (inside(alpha_max)) return alpha_max;
  double lo = 0.0, hi = alpha_max;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * alpha_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace choiceopt::conic

#endif  // CHOICEOPT_EXPCONE_HPP
