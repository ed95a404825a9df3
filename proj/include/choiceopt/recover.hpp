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

#ifndef CHOICEOPT_RECOVER_HPP
#define CHOICEOPT_RECOVER_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/program.hpp"
#include "choiceopt/reform.hpp"
#include "choiceopt/solver.hpp"

namespace choiceopt {

/// Values of u/d within this distance outside the box are clamped onto it.
inline constexpr double kClampBand = 1e-9;
inline constexpr double kMinShare = 1e-10;

struct RecoveredSolution {
  Matrix x;
  Matrix u;              // x_jk d_j; for NL the solution of the disaggregation system
  MarketShares shares;   // as read from the program
  double objective = 0;  // expected_profit(inst, x)
  double program_objective = 0;
  Vector tightness;         // per product, then per nest (NL, gamma < 1)
  double box_violation = 0;  // beyond the clamp band
  int clamped = 0;
  bool fast_path = false;  // NL: disaggregation solved by the split-instance rule
};

struct RoundtripReport {
  double share_residual = 0;
  double tightness_residual = 0;
  double box_violation = 0;
  double objective_mismatch = 0;

  bool passes(double threshold = 1e-6) const {
    return share_residual <= threshold && tightness_residual <= threshold && box_violation <= threshold &&
           objective_mismatch <= threshold;
  }
};

namespace detail {

inline double read(const ConicProgram& prog, const Vector& w, const std::string& role, std::size_t i) {
  return w(prog.variables[role][i]);
}

inline Vector read_block(const ConicProgram& prog, const Vector& w, const std::string& role) {
  const auto& idx = prog.variables[role];
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(Index(i)) = w(idx[i]);
  return out;
}

// x = u / d, clamped onto the box inside the band.
inline void divide_and_clamp(RecoveredSolution& rec, const Matrix& lo, const Matrix& hi) {
  rec.x = Matrix(rec.u.rows(), rec.u.cols());
  for (Index j = 0; j < rec.u.rows(); ++j)
    for (Index k = 0; k < rec.u.cols(); ++k) {
      double x = rec.u(j, k) / rec.shares.d(j);
      const double below = lo(j, k) - x, above = x - hi(j, k);
      if (below > 0.0 || above > 0.0) {
        const double out = std::max(below, above);
        if (out <= kClampBand) ++rec.clamped;
        else rec.box_violation = std::max(rec.box_violation, out);
        x = std::clamp(x, lo(j, k), hi(j, k));
      }
      rec.x(j, k) = x;
    }
}

inline void require_positive(const Vector& d, const char* what) {
  for (Index j = 0; j < d.size(); ++j)
    if (!(d(j) > kMinShare))
      throw Error(ErrorCode::DegenerateShare, std::string(what) + "[" + std::to_string(j) + "] = " +
                                                  std::to_string(d(j)) + " is not above 1e-10");
}

// Row sums of u must equal `target`, column sums `v`, and lo_j d_j <= u_jk <= hi_j d_j.
inline double s3_residual(const Matrix& u, const Vector& target, const Vector& v, const Vector& d,
                          const Matrix& lo, const Matrix& hi) {
  double out = 0.0;
  for (Index j = 0; j < u.rows(); ++j) out = std::max(out, std::abs(u.row(j).sum() - target(j)));
  for (Index k = 0; k < u.cols(); ++k) out = std::max(out, std::abs(u.col(k).sum() - v(k)));
  for (Index j = 0; j < u.rows(); ++j)
    for (Index k = 0; k < u.cols(); ++k)
      out = std::max({out, lo(j, k) * d(j) - u(j, k), u(j, k) - hi(j, k) * d(j)});
  return out;
}

inline std::optional<Matrix> s3_split(const Nest& nest, const Vector& target, const Vector& v) {
  if (nest.owner.empty()) return std::nullopt;
  const auto J = static_cast<Index>(nest.products.size());
  const Index K = v.size();
  Matrix u = Matrix::Zero(J, K);
  Index shared = -1;
  for (Index k = 0; k < K; ++k) {
    const int owner = nest.owner[std::size_t(k)];
    if (owner >= 0) u(owner, k) = v(k);
    else if (owner == kSharedAttribute) shared = k;
  }
  if (shared < 0) return std::nullopt;
  for (Index j = 0; j < J; ++j) u(j, shared) = target(j) - (u.row(j).sum() - u(j, shared));
  return u;
}

// Largest distance of u / d outside the box.
inline double s3_box_excess(const Matrix& u, const Vector& d, const Matrix& lo, const Matrix& hi) {
  double out = 0.0;
  for (Index j = 0; j < u.rows(); ++j)
    for (Index k = 0; k < u.cols(); ++k) {
      const double x = u(j, k) / d(j);
      out = std::max({out, lo(j, k) - x, x - hi(j, k)});
    }
  return out;
}

// Phase I in x = u / d: minimize the total violation of the row and column
// sums with the box imposed on x itself, on the interior-point solver.
inline Matrix s3_phase_one(const Vector& target, const Vector& v, const Vector& d, const Matrix& lo,
                           const Matrix& hi) {
  const Index J = target.size(), K = v.size();
  ConicProgram lp;
  const Index x = lp.add_variables("x", J * K);
  const Index slack = lp.add_variables("slack", 2 * (J + K));
  for (Index i = 0; i < 2 * (J + K); ++i) {
    lp.objective(slack + i) = -1.0;
    lp.inequalities.push_back({LinearExpr::var(slack + i, -1.0), 0.0, "slack", i});
  }
  for (Index j = 0; j < J; ++j) {
    LinearExpr row({{slack + 2 * j, 1.0}, {slack + 2 * j + 1, -1.0}});
    for (Index k = 0; k < K; ++k) {
      row.add(x + j * K + k, d(j));
      lp.inequalities.push_back({LinearExpr::var(x + j * K + k, -1.0), -lo(j, k), "b", j * K + k});
      lp.inequalities.push_back({LinearExpr::var(x + j * K + k, 1.0), hi(j, k), "q", j * K + k});
    }
    lp.equalities.push_back({row, target(j), "row", j});
  }
  for (Index k = 0; k < K; ++k) {
    const Index s = slack + 2 * J + 2 * k;
    LinearExpr col({{s, 1.0}, {s + 1, -1.0}});
    for (Index j = 0; j < J; ++j) col.add(x + j * K + k, d(j));
    lp.equalities.push_back({col, v(k), "column", k});
  }
  SolverConfig cfg;
  cfg.tol_gap = cfg.tol_feas = 1e-10;
  const PrimalDualSolution sol = solve(lp, cfg);
  if (sol.status != SolveStatus::Optimal)
    throw Error(ErrorCode::S3Infeasible, std::string("phase-one solve ended with status ") + to_string(sol.status));
  Matrix out(J, K);
  for (Index j = 0; j < J; ++j)
    for (Index k = 0; k < K; ++k) out(j, k) = d(j) * std::clamp(sol.w(x + j * K + k), lo(j, k), hi(j, k));
  return out;
}

inline RecoveredSolution recover_nl(const NlInstance& inst, const ConicProgram& prog, const Vector& w) {
  RecoveredSolution rec;
  const Vector d = read_block(prog, w, "d");
  const Vector p = read_block(prog, w, "p");
  const double p0 = read(prog, w, "p0", 0);
  require_positive(d, "d");
  require_positive(p, "p");
  if (!(p0 > kMinShare)) throw Error(ErrorCode::DegenerateShare, "p0 is not above 1e-10");
  rec.shares.d = d;
  rec.shares.outside = p0;
  rec.shares.nest_shares = p;

  const Index K = inst.K;
  const Index n = inst.products();
  rec.u = Matrix::Zero(n, K);
  std::vector<double> tight;
  std::vector<double> nest_tight;
  rec.fast_path = true;
  for (std::size_t i = 0; i < inst.nests.size(); ++i) {
    const Nest& nest = inst.nests[i];
    const double gamma = nest.gamma;
    const Index off = inst.offset(i);
    const auto Ji = static_cast<Index>(nest.products.size());
    Vector target(Ji), dn(Ji);
    Matrix lo(Ji, K), hi(Ji, K);
    for (Index j = 0; j < Ji; ++j) {
      const double dj = d(off + j);
      dn(j) = dj;
      target(j) = gamma * dj * std::log(p0 / dj) + (1.0 - gamma) * dj * std::log(p0 / p(Index(i)));
      lo.row(j) = nest.products[std::size_t(j)].x_lower.transpose();
      hi.row(j) = nest.products[std::size_t(j)].x_upper.transpose();
      tight.push_back(std::abs(read(prog, w, "e", std::size_t(off + j)) - dj * std::log(p0 / dj)));
    }
    if (gamma < 1.0)
      nest_tight.push_back(std::abs(read(prog, w, "g", i) - p(Index(i)) * std::log(p0 / p(Index(i)))));
    Vector v(K);
    for (Index k = 0; k < K; ++k) v(k) = read(prog, w, "v", i * std::size_t(K) + std::size_t(k));

    const double imbalance = std::abs(target.sum() - v.sum());
    const double accept = 1e-8 + imbalance;
    Matrix u;
    std::optional<Matrix> fast = s3_split(nest, target, v);
    if (fast && s3_residual(*fast, target, v, dn, lo, hi) <= accept &&
        s3_box_excess(*fast, dn, lo, hi) <= kClampBand) {
      u = *fast;
    } else {
      rec.fast_path = false;
      u = s3_phase_one(target, v, dn, lo, hi);
      const double res = s3_residual(u, target, v, dn, lo, hi);
      if (res > accept)
        throw Error(ErrorCode::S3Infeasible, "nest " + std::to_string(i) + ": disaggregation residual " +
                                                 std::to_string(res) + " exceeds " + std::to_string(accept));
    }
    rec.u.middleRows(off, Ji) = u;
  }
  tight.insert(tight.end(), nest_tight.begin(), nest_tight.end());
  rec.tightness = Eigen::Map<Vector>(tight.data(), Index(tight.size()));
  divide_and_clamp(rec, inst.x_lower(), inst.x_upper());
  return rec;
}

template <class Inst>
RecoveredSolution recover_linear(const Inst& inst, const ConicProgram& prog, const Vector& w, bool mc) {
  RecoveredSolution rec;
  const Index J = inst.products(), K = inst.attributes();
  const Vector d = read_block(prog, w, "d");
  require_positive(d, "d");
  rec.shares.d = d;
  Vector ref(J);
  if (mc) {
    rec.shares.visits = read_block(prog, w, "v");
    require_positive(rec.shares.visits, "v");
    ref = rec.shares.visits;
  } else {
    const double d0 = read(prog, w, "d0", 0);
    if (!(d0 > kMinShare)) throw Error(ErrorCode::DegenerateShare, "d0 is not above 1e-10");
    rec.shares.outside = d0;
    ref.setConstant(d0);
  }
  rec.u = Matrix(J, K);
  rec.tightness = Vector(J);
  for (Index j = 0; j < J; ++j) {
    for (Index k = 0; k < K; ++k) rec.u(j, k) = read(prog, w, "u", std::size_t(j * K + k));
    rec.tightness(j) = std::abs(d(j) * std::log(d(j) / ref(j)) + rec.u.row(j).sum());
  }
  divide_and_clamp(rec, inst.x_lower, inst.x_upper);
  return rec;
}

}  // namespace detail

/// Attribute matrix and shares from an optimal program solution.
inline RecoveredSolution recover(const ChoiceInstance& inst, const ConicProgram& prog,
                                 const PrimalDualSolution& sol) {
  if (sol.status != SolveStatus::Optimal)
    throw Error(ErrorCode::NotOptimal, std::string("cannot recover from status ") + to_string(sol.status));
  RecoveredSolution rec = std::visit(
      [&](const auto& m) -> RecoveredSolution {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MnlInstance>) return detail::recover_linear(m, prog, sol.w, false);
        else if constexpr (std::is_same_v<T, McInstance>) return detail::recover_linear(m, prog, sol.w, true);
        else return detail::recover_nl(m, prog, sol.w);
      },
      inst);
  rec.program_objective = sol.objective;
  rec.objective = expected_profit(inst, rec.x);
  return rec;
}

/// Re-evaluates a recovered solution through the share evaluators.
inline RoundtripReport roundtrip_check(const ChoiceInstance& inst, const RecoveredSolution& rec) {
  RoundtripReport out;
  const MarketShares fresh = shares(inst, rec.x);
  out.share_residual = (fresh.d - rec.shares.d).cwiseAbs().maxCoeff();
  if (fresh.outside && rec.shares.outside)
    out.share_residual = std::max(out.share_residual, std::abs(*fresh.outside - *rec.shares.outside));
  out.tightness_residual = rec.tightness.size() ? rec.tightness.maxCoeff() : 0.0;
  const ProductView view = product_view(inst);
  for (Index j = 0; j < rec.x.rows(); ++j)
    for (Index k = 0; k < rec.x.cols(); ++k)
      out.box_violation = std::max({out.box_violation, view.x_lower(j, k) - rec.x(j, k),
                                    rec.x(j, k) - view.x_upper(j, k), rec.box_violation});
  out.objective_mismatch = std::abs(expected_profit(inst, rec.x) - rec.program_objective);
  return out;
}

/// Solver settings for recovery: x = u / d magnifies absolute program errors
/// by 1 / d, so the pipeline solves tighter than the solver default.
inline SolverConfig recovery_config() {
  SolverConfig cfg;
  cfg.tol_gap = cfg.tol_feas = 1e-10;
  return cfg;
}

struct PipelineResult {
  ConicProgram program;
  PrimalDualSolution solution;
  std::optional<RecoveredSolution> recovered;  // set when the solve is Optimal
  double tolerance = 0;                        // tolerance of the reported solve
  bool relaxed = false;                        // tight solve stalled; re-solved at 1e-8
};

/// build -> with_resources -> solve -> recover. A stalled solve below 1e-8
/// is repeated once at 1e-8.
inline PipelineResult run_pipeline(const ChoiceInstance& inst, const ResourceConstraints& rc = {},
                                   const SolverConfig& cfg = recovery_config()) {
  PipelineResult out;
  out.program = with_resources(build(inst), rc);
  out.solution = solve(out.program, cfg);
  out.tolerance = std::max(cfg.tol_gap, cfg.tol_feas);
  const bool stalled = out.solution.status == SolveStatus::NumericalFailure ||
                       out.solution.status == SolveStatus::MaxIterations;
  if (stalled && out.tolerance < 1e-8) {
    SolverConfig loose = cfg;
    loose.tol_gap = std::max(cfg.tol_gap, 1e-8);
    loose.tol_feas = std::max(cfg.tol_feas, 1e-8);
    out.solution = solve(out.program, loose);
    out.tolerance = 1e-8;
    out.relaxed = true;
  }
  if (out.solution.status == SolveStatus::Optimal) out.recovered = recover(inst, out.program, out.solution);
  return out;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_RECOVER_HPP
