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

// Homogeneous self-dual interior-point method for programs with linear rows
// and exponential-cone memberships.
//
// A ConicProgram (maximize o.w) is brought to the standard form
//
//   minimize c'x  s.t.  Ax = b,  Gx + s = h,  s in R^m_+ x K_exp^n
//
// with c = -o. Inequality rows a.w <= beta give G = a, h = beta; a cone
// triple T w + t0 gives G = -T, h = t0. The dual is
//
//   maximize -b'y - h'z  s.t.  A'y + G'z + c = 0,  z in R^m_+ x (K_exp*)^n.
//
// The embedding drives the residuals
//
//   r_x = A'y + G'z + c tau,  r_y = Ax - b tau,  r_z = Gx + s - h tau,
//   r_tau = kappa + c'x + b'y + h'z
//
// to zero while (s, z, tau, kappa) follow the central path. Exponential cones
// use the primal barrier linearization  dz + mu H(s) ds = -z - sigma mu g(s).
// Step lengths stay inside a neighbourhood of the central path.

#ifndef CHOICEOPT_SOLVER_HPP
#define CHOICEOPT_SOLVER_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/expcone.hpp"
#include "choiceopt/program.hpp"

namespace choiceopt {

struct SolverConfig {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int max_iter = 200;
  double initial_centering = 0.5;  // sigma on the first iteration
  bool mehrotra = false;           // second-order correction on linear rows
  double step_fraction = 0.98;
  double center_proximity = 0.5;  // centering steps while proximity exceeds this
  double wide_proximity = 0.95;   // predictor steps stay within this

  void validate() const {
    if (!(tol_gap > 0.0) || !(tol_feas > 0.0))
      throw Error(ErrorCode::InvariantError, "solver tolerances must be > 0");
    if (max_iter < 1) throw Error(ErrorCode::InvariantError, "max_iter must be >= 1");
    if (!(initial_centering > 0.0 && initial_centering <= 1.0))
      throw Error(ErrorCode::InvariantError, "initial_centering must lie in (0, 1]");
    if (!(step_fraction > 0.0 && step_fraction < 1.0))
      throw Error(ErrorCode::InvariantError, "step_fraction must lie in (0, 1)");
    if (!(center_proximity > 0.0 && center_proximity < wide_proximity && wide_proximity < 1.0))
      throw Error(ErrorCode::InvariantError, "proximity bounds must satisfy 0 < center < wide < 1");
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

/// Solver output in the units of the ConicProgram.
///
/// Multipliers certify  objective = A_eq' y + A_in' z_in - T' z_cone  with
/// z_in >= 0 and z_cone in K_exp*; the dual objective is
/// b_eq'y + b_in'z_in + t0'z_cone. For Infeasible they form a Farkas ray
/// normalized to dual objective -1; for Unbounded `w` is an improving ray.
struct PrimalDualSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector w;
  Vector eq_multipliers;
  Vector ineq_multipliers;
  std::vector<conic::Vec3> cone_multipliers;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double primal_residual = std::numeric_limits<double>::quiet_NaN();  // relative
  double dual_residual = std::numeric_limits<double>::quiet_NaN();    // relative
  double gap = std::numeric_limits<double>::quiet_NaN();              // relative
  double certificate_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

namespace detail {

struct StandardForm {
  Index n = 0, p = 0, m_lp = 0, n_exp = 0;
  Matrix A, G;
  Vector b, c, h;
  Vector row_scale_eq, row_scale_g;  // scaled row = original row * scale
  double obj_scale = 1.0;            // c_scaled = c / obj_scale

  Index m() const { return m_lp + 3 * n_exp; }
  double degree() const { return double(m_lp) + 3.0 * double(n_exp); }
};

inline void put(const LinearExpr& e, Matrix& M, Index row, double sign) {
  for (const auto& t : e.terms) M(row, t.var) += sign * t.coef;
}

inline StandardForm to_standard(const ConicProgram& prog) {
  StandardForm sf;
  sf.n = prog.n_vars;
  sf.p = Index(prog.equalities.size());
  sf.m_lp = Index(prog.inequalities.size());
  sf.n_exp = Index(prog.cones.size());
  sf.A = Matrix::Zero(sf.p, sf.n);
  sf.b = Vector::Zero(sf.p);
  sf.G = Matrix::Zero(sf.m(), sf.n);
  sf.h = Vector::Zero(sf.m());
  for (Index i = 0; i < sf.p; ++i) {
    const auto& r = prog.equalities[std::size_t(i)];
    put(r.lhs, sf.A, i, 1.0);
    sf.b(i) = r.rhs - r.lhs.constant;
  }
  for (Index i = 0; i < sf.m_lp; ++i) {
    const auto& r = prog.inequalities[std::size_t(i)];
    put(r.lhs, sf.G, i, 1.0);
    sf.h(i) = r.rhs - r.lhs.constant;
  }
  for (Index c = 0; c < sf.n_exp; ++c)
    for (Index a = 0; a < 3; ++a) {
      const Index row = sf.m_lp + 3 * c + a;
      const auto& e = prog.cones[std::size_t(c)].parts[std::size_t(a)];
      put(e, sf.G, row, -1.0);
      sf.h(row) = e.constant;
    }
  sf.c = -prog.objective;

  auto norm_of = [](const auto& row, double rhs) {
    double v = row.cwiseAbs().maxCoeff();
    if (v == 0.0) v = std::abs(rhs);
    return v > 0.0 ? 1.0 / v : 1.0;
  };
  sf.row_scale_eq = Vector::Ones(sf.p);
  for (Index i = 0; i < sf.p; ++i) sf.row_scale_eq(i) = norm_of(sf.A.row(i), sf.b(i));
  sf.row_scale_g = Vector::Ones(sf.m());
  for (Index i = 0; i < sf.m_lp; ++i) sf.row_scale_g(i) = norm_of(sf.G.row(i), sf.h(i));
  for (Index c = 0; c < sf.n_exp; ++c) {
    const Index r0 = sf.m_lp + 3 * c;
    double v = sf.G.block(r0, 0, 3, sf.n).cwiseAbs().maxCoeff();
    if (v == 0.0) v = sf.h.segment(r0, 3).cwiseAbs().maxCoeff();
    sf.row_scale_g.segment(r0, 3).setConstant(v > 0.0 ? 1.0 / v : 1.0);
  }
  sf.A = sf.row_scale_eq.asDiagonal() * sf.A;
  sf.b = sf.row_scale_eq.asDiagonal() * sf.b;
  sf.G = sf.row_scale_g.asDiagonal() * sf.G;
  sf.h = sf.row_scale_g.asDiagonal() * sf.h;
  sf.obj_scale = std::max(1.0, sf.c.size() ? sf.c.cwiseAbs().maxCoeff() : 0.0);
  sf.c /= sf.obj_scale;
  return sf;
}

struct Iterate {
  Vector x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

class HsdSolver {
 public:
  HsdSolver(const StandardForm& sf, const SolverConfig& cfg) : sf_(sf), cfg_(cfg) {
    N_ = sf_.n + sf_.p + sf_.m() + 1;
  }

  PrimalDualSolution run() {
    Iterate it = initial_point();
    PrimalDualSolution out;
    const double nb = 1.0 + (sf_.b.size() ? sf_.b.cwiseAbs().maxCoeff() : 0.0);
    const double nh = 1.0 + (sf_.h.size() ? sf_.h.cwiseAbs().maxCoeff() : 0.0);
    const double nc = 1.0 + (sf_.c.size() ? sf_.c.cwiseAbs().maxCoeff() : 0.0);

    for (int iter = 0;; ++iter) {
      out.iterations = iter;
      const Residuals r = residuals(it);
      const double mu = centrality(it);

      const double pres = std::max(r.y.size() ? r.y.cwiseAbs().maxCoeff() / nb : 0.0,
                                   r.z.size() ? r.z.cwiseAbs().maxCoeff() / nh : 0.0) / it.tau;
      const double dres = (r.x.size() ? r.x.cwiseAbs().maxCoeff() : 0.0) / (it.tau * nc);
      const double pobj = sf_.c.dot(it.x) / it.tau;
      const double dobj = -(sf_.b.dot(it.y) + sf_.h.dot(it.z)) / it.tau;
      const double compl_gap = it.s.dot(it.z) / (it.tau * it.tau);
      const double gap = std::max(compl_gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj));
      out.primal_residual = pres;
      out.dual_residual = dres;
      out.gap = gap;

      if (pres <= cfg_.tol_feas && dres <= cfg_.tol_feas && gap <= cfg_.tol_gap) {
        out.status = SolveStatus::Optimal;
        finish_optimal(it, out);
        return out;
      }
      const double by = sf_.b.dot(it.y) + sf_.h.dot(it.z);
      if (by < 0.0 && it.tau < it.kappa) {
        const Vector ray = sf_.A.transpose() * it.y + sf_.G.transpose() * it.z;
        if (ray.cwiseAbs().maxCoeff() / -by <= cfg_.tol_feas) {
          out.status = SolveStatus::Infeasible;
          finish_infeasible(it, out);
          return out;
        }
      }
      const double cx = sf_.c.dot(it.x);
      if (cx < 0.0 && it.tau < it.kappa) {
        const double ax = sf_.p ? (sf_.A * it.x).cwiseAbs().maxCoeff() : 0.0;
        const double gx = sf_.m() ? (sf_.G * it.x + it.s).cwiseAbs().maxCoeff() : 0.0;
        if (std::max(ax, gx) / -cx <= cfg_.tol_feas) {
          out.status = SolveStatus::Unbounded;
          finish_unbounded(it, out);
          return out;
        }
      }
      if (iter >= cfg_.max_iter) {
        out.status = SolveStatus::MaxIterations;
        finish_optimal(it, out);
        return out;
      }

      if (!factor(it, mu)) {
        out.status = SolveStatus::NumericalFailure;
        finish_optimal(it, out);
        return out;
      }
      const double prox = proximity(it);
      // A centering step is tried first when off-center; if either step type
      // makes no progress the other one is tried.
      const bool centre_first = prox > cfg_.center_proximity;
      bool moved = false;
      for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
        const bool centre = (attempt == 0) == centre_first;
        Direction dir;
        double limit;
        if (centre) {
          dir = direction(it, r, mu, 1.0, nullptr);
          limit = prox;
        } else {
          double sigma = cfg_.initial_centering;
          Direction affine;
          if (iter > 0) {
            affine = direction(it, r, mu, 0.0, nullptr);
            const double alpha_aff = max_step(it, affine);
            sigma = std::clamp(std::pow(1.0 - std::min(alpha_aff, 1.0), 3.0), 1e-4, 1.0);
          }
          dir = direction(it, r, mu, sigma, cfg_.mehrotra && iter > 0 ? &affine : nullptr);
          limit = std::max(prox, cfg_.wide_proximity);
        }
        if (!dir.finite) continue;
        double alpha = std::min(1.0, cfg_.step_fraction * max_step(it, dir));
        Iterate next = advance(it, dir, alpha);
        while (!(proximity(next) <= limit) && alpha > 1e-8) {
          alpha *= 0.7;
          next = advance(it, dir, alpha);
        }
        if (alpha > 1e-8) {
          it = std::move(next);
          moved = true;
        }
      }
      if (!moved) {
        out.status = SolveStatus::NumericalFailure;
        finish_optimal(it, out);
        return out;
      }
    }
  }

 private:
  struct Residuals {
    Vector x, y, z;
    double tau = 0.0;
  };
  struct Direction {
    Vector x, y, z, s;
    double tau = 0.0, kappa = 0.0;
    bool finite = true;
  };

  Index lp() const { return sf_.m_lp; }
  Index ncones() const { return sf_.n_exp; }

  Iterate initial_point() const {
    Iterate it;
    it.x = Vector::Zero(sf_.n);
    it.y = Vector::Zero(sf_.p);
    it.s = Vector::Ones(sf_.m());
    it.z = Vector::Ones(sf_.m());
    const conic::Vec3 e = conic::expcone_central_point();
    for (Index c = 0; c < ncones(); ++c) {
      it.s.segment<3>(lp() + 3 * c) = e;
      it.z.segment<3>(lp() + 3 * c) = e;
    }
    return it;
  }

  Residuals residuals(const Iterate& it) const {
    Residuals r;
    r.x = sf_.A.transpose() * it.y + sf_.G.transpose() * it.z + sf_.c * it.tau;
    r.y = sf_.A * it.x - sf_.b * it.tau;
    r.z = sf_.G * it.x + it.s - sf_.h * it.tau;
    r.tau = it.kappa + sf_.c.dot(it.x) + sf_.b.dot(it.y) + sf_.h.dot(it.z);
    return r;
  }

  double centrality(const Iterate& it) const {
    return (it.s.dot(it.z) + it.tau * it.kappa) / (sf_.degree() + 1.0);
  }

  // Assembles and factors the reduced Newton matrix; W blocks are kept for
  // the right-hand sides.
  bool factor(const Iterate& it, double mu) {
    const Index n = sf_.n, p = sf_.p, m = sf_.m();
    M_ = Matrix::Zero(N_, N_);
    M_.block(0, n, n, p) = sf_.A.transpose();
    M_.block(0, n + p, n, m) = sf_.G.transpose();
    M_.block(0, N_ - 1, n, 1) = sf_.c;
    M_.block(n, 0, p, n) = sf_.A;
    M_.block(n, N_ - 1, p, 1) = -sf_.b;
    M_.block(n + p, 0, m, n) = sf_.G;
    M_.block(n + p, N_ - 1, m, 1) = -sf_.h;
    M_.block(N_ - 1, 0, 1, n) = sf_.c.transpose();
    M_.block(N_ - 1, n, 1, p) = sf_.b.transpose();
    M_.block(N_ - 1, n + p, 1, m) = sf_.h.transpose();
    M_(N_ - 1, N_ - 1) = -it.kappa / it.tau;

    W_lp_ = Vector(lp());
    for (Index i = 0; i < lp(); ++i) {
      W_lp_(i) = it.s(i) / it.z(i);
      M_(n + p + i, n + p + i) = -W_lp_(i);
    }
    fac_exp_.assign(std::size_t(ncones()), conic::InverseHessianFactor{});
    Linv_exp_.assign(std::size_t(ncones()), conic::Mat3::Identity());
    g_exp_.assign(std::size_t(ncones()), conic::Vec3::Zero());
    // Cone rows are premultiplied by L^{-1}, leaving the diagonal -diag(d) / mu.
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      const Index row = n + p + r0;
      g_exp_[std::size_t(c)] = conic::expcone_barrier(it.s.segment<3>(r0)).gradient;
      const conic::InverseHessianFactor f = conic::expcone_inverse_hessian_factor(it.s.segment<3>(r0));
      if (!f.L.allFinite() || !f.d.allFinite()) return false;
      const conic::Mat3 Linv = f.L.triangularView<Eigen::UnitLower>().solve(conic::Mat3::Identity());
      fac_exp_[std::size_t(c)] = f;
      Linv_exp_[std::size_t(c)] = Linv;
      const Matrix Gc = Linv * sf_.G.middleRows(r0, 3);
      const conic::Vec3 hc = Linv * sf_.h.segment<3>(r0);
      M_.block(row, 0, 3, n) = Gc;
      M_.block(0, row, n, 3) = Gc.transpose();
      M_.block<3, 1>(row, N_ - 1) = -hc;
      M_.block<1, 3>(N_ - 1, row) = hc.transpose();
      M_.block<3, 3>(row, row) = -conic::Mat3(f.d.asDiagonal()) / mu;
    }
    if (!M_.allFinite()) return false;

    Matrix reg = M_;
    const double delta = 1e-11;
    for (Index i = 0; i < n; ++i) reg(i, i) += delta;
    for (Index i = n; i < N_ - 1; ++i) reg(i, i) -= delta;
    lu_.compute(reg);
    return true;
  }

  Vector solve_kkt(const Vector& rhs) const {
    Vector sol = lu_.solve(rhs);
    for (int k = 0; k < 3; ++k) {
      const Vector res = rhs - M_ * sol;
      sol += lu_.solve(res);
    }
    return sol;
  }

  // sigma = 0 gives the affine direction. `affine` enables the second-order
  // term on linear rows.
  Direction direction(const Iterate& it, const Residuals& r, double mu, double sigma,
                      const Direction* affine) const {
    const Index n = sf_.n, p = sf_.p, m = sf_.m();
    const double eta = 1.0 - sigma;
    const double smu = sigma * mu;

    // ds = q - W dz
    Vector q(m);
    for (Index i = 0; i < lp(); ++i) {
      double target = smu - it.s(i) * it.z(i);
      if (affine) target -= affine->s(i) * affine->z(i);
      q(i) = target / it.z(i);
    }
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      const conic::Vec3 zc = it.z.segment<3>(r0);
      const auto& f = fac_exp_[std::size_t(c)];
      // Stored premultiplied by L^{-1}.
      q.segment<3>(r0) = -f.d.cwiseProduct(f.L.transpose() * (zc + smu * g_exp_[std::size_t(c)])) / mu;
    }
    const double tk_target = smu - it.tau * it.kappa;

    Vector rhs(N_);
    rhs.segment(0, n) = -eta * r.x;
    rhs.segment(n, p) = -eta * r.y;
    rhs.segment(n + p, m) = -eta * r.z - q;
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      rhs.segment<3>(n + p + r0) = Linv_exp_[std::size_t(c)] * (-eta * r.z.segment<3>(r0)) - q.segment<3>(r0);
    }
    rhs(N_ - 1) = -eta * r.tau - tk_target / it.tau;

    const Vector sol = solve_kkt(rhs);
    Direction d;
    d.x = sol.segment(0, n);
    d.y = sol.segment(n, p);
    d.z = sol.segment(n + p, m);
    d.tau = sol(N_ - 1);
    d.s = Vector(m);
    for (Index i = 0; i < lp(); ++i) d.s(i) = q(i) - W_lp_(i) * d.z(i);
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      const auto& f = fac_exp_[std::size_t(c)];
      const conic::Vec3 zt = d.z.segment<3>(r0);
      d.z.segment<3>(r0) = Linv_exp_[std::size_t(c)].transpose() * zt;
      d.s.segment<3>(r0) = f.L * (q.segment<3>(r0) - f.d.cwiseProduct(zt) / mu);
    }
    d.kappa = (tk_target - it.kappa * d.tau) / it.tau;
    d.finite = sol.allFinite() && d.s.allFinite() && std::isfinite(d.kappa);
    return d;
  }

  double max_step(const Iterate& it, const Direction& d) const {
    double alpha = 1.0 / cfg_.step_fraction;
    auto lin = [&](double v, double dv) {
      if (dv < 0.0) alpha = std::min(alpha, -v / dv);
    };
    for (Index i = 0; i < lp(); ++i) {
      lin(it.s(i), d.s(i));
      lin(it.z(i), d.z(i));
    }
    lin(it.tau, d.tau);
    lin(it.kappa, d.kappa);
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      alpha = conic::expcone_max_step(it.s.segment<3>(r0), d.s.segment<3>(r0), alpha, false);
      alpha = conic::expcone_max_step(it.z.segment<3>(r0), d.z.segment<3>(r0), alpha, true);
    }
    return alpha;
  }

  Iterate advance(const Iterate& it, const Direction& d, double alpha) const {
    Iterate next;
    next.x = it.x + alpha * d.x;
    next.y = it.y + alpha * d.y;
    next.z = it.z + alpha * d.z;
    next.s = it.s + alpha * d.s;
    next.tau = it.tau + alpha * d.tau;
    next.kappa = it.kappa + alpha * d.kappa;
    return next;
  }

  // || z + mu g(s) ||_{H(s)^-1} / mu over all cones plus the tau-kappa pair;
  // infinity outside the interior.
  double proximity(const Iterate& it) const {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (!(it.tau > 0.0) || !(it.kappa > 0.0)) return kInf;
    const double mu = centrality(it);
    if (!(mu > 0.0) || !std::isfinite(mu)) return kInf;
    double sum = 0.0;
    const double tk = it.tau * it.kappa / mu - 1.0;
    sum += tk * tk;
    for (Index i = 0; i < lp(); ++i) {
      if (!(it.s(i) > 0.0) || !(it.z(i) > 0.0)) return kInf;
      const double t = it.s(i) * it.z(i) / mu - 1.0;
      sum += t * t;
    }
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      const conic::Vec3 s = it.s.segment<3>(r0);
      const conic::Vec3 z = it.z.segment<3>(r0);
      if (!conic::expcone_interior(s) || !conic::expcone_dual_interior(z)) return kInf;
      const conic::BarrierDerivatives bd = conic::expcone_barrier(s);
      const conic::Vec3 psi = z / mu + bd.gradient;
      sum += std::max(0.0, psi.dot(conic::expcone_inverse_hessian(s) * psi));
    }
    return std::sqrt(sum);
  }

  void unscale_multipliers(const Vector& y, const Vector& z, double factor, PrimalDualSolution& out) const {
    out.eq_multipliers = (sf_.row_scale_eq.array() * y.array()).matrix() * factor;
    out.ineq_multipliers = (sf_.row_scale_g.head(lp()).array() * z.head(lp()).array()).matrix() * factor;
    out.cone_multipliers.assign(std::size_t(ncones()), conic::Vec3::Zero());
    for (Index c = 0; c < ncones(); ++c) {
      const Index r0 = lp() + 3 * c;
      out.cone_multipliers[std::size_t(c)] = z.segment<3>(r0) * (sf_.row_scale_g(r0) * factor);
    }
  }

  void finish_optimal(const Iterate& it, PrimalDualSolution& out) const {
    out.w = it.x / it.tau;
    unscale_multipliers(it.y, it.z, sf_.obj_scale / it.tau, out);
    out.objective = -sf_.obj_scale * sf_.c.dot(out.w);
  }

  void finish_infeasible(const Iterate& it, PrimalDualSolution& out) const {
    const double by = sf_.b.dot(it.y) + sf_.h.dot(it.z);
    out.w = Vector::Zero(sf_.n);
    unscale_multipliers(it.y, it.z, 1.0 / -by, out);
    const Vector ray = sf_.A.transpose() * it.y + sf_.G.transpose() * it.z;
    out.certificate_residual = ray.cwiseAbs().maxCoeff() / -by;
  }

  void finish_unbounded(const Iterate& it, PrimalDualSolution& out) const {
    const double cx = sf_.c.dot(it.x);
    out.w = it.x / -cx;
    const double ax = sf_.p ? (sf_.A * it.x).cwiseAbs().maxCoeff() : 0.0;
    const double gx = sf_.m() ? (sf_.G * it.x + it.s).cwiseAbs().maxCoeff() : 0.0;
    out.certificate_residual = std::max(ax, gx) / -cx;
    out.eq_multipliers = Vector::Zero(sf_.p);
    out.ineq_multipliers = Vector::Zero(lp());
    out.cone_multipliers.assign(std::size_t(ncones()), conic::Vec3::Zero());
  }

  const StandardForm& sf_;
  const SolverConfig& cfg_;
  Index N_ = 0;
  Matrix M_;
  Eigen::PartialPivLU<Matrix> lu_;
  Vector W_lp_;
  std::vector<conic::InverseHessianFactor> fac_exp_;
  std::vector<conic::Mat3> Linv_exp_;
  std::vector<conic::Vec3> g_exp_;
};

}  // namespace detail

/// Dual objective of a program at the given multipliers:
/// b_eq'y + b_in'z_in + t0'z_cone.
inline double dual_objective(const ConicProgram& prog, const Vector& y, const Vector& z_in,
                             const std::vector<conic::Vec3>& z_cone) {
  double out = 0.0;
  for (std::size_t i = 0; i < prog.equalities.size(); ++i)
    out += (prog.equalities[i].rhs - prog.equalities[i].lhs.constant) * y(Index(i));
  for (std::size_t i = 0; i < prog.inequalities.size(); ++i)
    out += (prog.inequalities[i].rhs - prog.inequalities[i].lhs.constant) * z_in(Index(i));
  for (std::size_t c = 0; c < prog.cones.size(); ++c)
    for (std::size_t a = 0; a < 3; ++a) out += prog.cones[c].parts[a].constant * z_cone[c](Index(a));
  return out;
}

/// objective - (A_eq' y + A_in' z_in - T' z_cone), the dual stationarity
/// residual vector.
inline Vector dual_stationarity(const ConicProgram& prog, const Vector& y, const Vector& z_in,
                                const std::vector<conic::Vec3>& z_cone) {
  Vector r = prog.objective;
  for (std::size_t i = 0; i < prog.equalities.size(); ++i)
    for (const auto& t : prog.equalities[i].lhs.terms) r(t.var) -= t.coef * y(Index(i));
  for (std::size_t i = 0; i < prog.inequalities.size(); ++i)
    for (const auto& t : prog.inequalities[i].lhs.terms) r(t.var) -= t.coef * z_in(Index(i));
  for (std::size_t c = 0; c < prog.cones.size(); ++c)
    for (std::size_t a = 0; a < 3; ++a)
      for (const auto& t : prog.cones[c].parts[a].terms) r(t.var) += t.coef * z_cone[c](Index(a));
  return r;
}

inline PrimalDualSolution solve(const ConicProgram& prog, const SolverConfig& cfg = {}) {
  cfg.validate();
  prog.validate();
  const detail::StandardForm sf = detail::to_standard(prog);
  detail::HsdSolver solver(sf, cfg);
  PrimalDualSolution out = solver.run();
  if (out.status == SolveStatus::Optimal || out.status == SolveStatus::MaxIterations ||
      out.status == SolveStatus::NumericalFailure)
    out.dual_objective = dual_objective(prog, out.eq_multipliers, out.ineq_multipliers, out.cone_multipliers);
  return out;
}

/// Residuals of a solver point plus the primal-dual objective gap.
inline ResidualReport residuals(const ConicProgram& prog, const PrimalDualSolution& sol) {
  ResidualReport out = residuals(prog, sol.w);
  out.gap = sol.dual_objective - sol.objective;
  return out;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_SOLVER_HPP
