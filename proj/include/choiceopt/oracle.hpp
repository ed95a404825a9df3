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

// Brute-force lattice search for small instances.
//
// Shares depend on x only through the per-product sums S_j = sum_k x_jk, and
// for a fixed S_j the best margin sum_k phi_jk x_jk over the box is obtained
// by starting at x_lower and filling attributes in decreasing order of phi
// (ties: lower k first). The lattice therefore ranges over S, one dimension
// per product, and every lattice point is a point of the original box.

#ifndef CHOICEOPT_ORACLE_HPP
#define CHOICEOPT_ORACLE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/feasibility.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/program.hpp"
#include "choiceopt/recover.hpp"
#include "choiceopt/solver.hpp"

namespace choiceopt {

inline constexpr Index kOracleMaxDims = 6;
inline constexpr double kOracleMaxEvaluations = 1e8;

struct GridSpec {
  int points_per_dim = 201;
  int refine_rounds = 3;

  void validate() const {
    if (points_per_dim < 2) throw Error(ErrorCode::InvariantError, "points_per_dim must be >= 2");
    if (refine_rounds < 0) throw Error(ErrorCode::InvariantError, "refine_rounds must be >= 0");
  }

  /// Largest point count <= `points` with points^dims <= budget.
  static GridSpec fitted(Index dims, double budget, int points = 201, int refine_rounds = 3) {
    int fit = points;
    while (fit > 2 && std::pow(double(fit), double(dims)) > budget) --fit;
    return {fit, refine_rounds};
  }
};

struct OracleResult {
  bool feasible = false;  // some lattice point satisfies the resource rows
  Matrix best_x;
  double best_objective = -std::numeric_limits<double>::infinity();
  long long evaluations = 0;
  double resolution = 0;  // largest lattice spacing of the final round
};

namespace detail {

/// Best allocation of sum s over [lo, hi] by decreasing margin.
inline Vector allocate(const Vector& phi, const Vector& lo, const Vector& hi, double s) {
  std::vector<Index> order(std::size_t(phi.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return phi(a) > phi(b); });
  Vector x = lo;
  double rest = s - lo.sum();
  for (Index k : order) {
    if (rest <= 0.0) break;
    const double add = std::min(rest, hi(k) - lo(k));
    x(k) += add;
    rest -= add;
  }
  return x;
}

/// Margin sum_k phi x - psi of the best allocation at sum s.
inline double best_margin(const Vector& phi, double psi, const Vector& lo, const Vector& hi, double s) {
  return phi.dot(allocate(phi, lo, hi, s)) - psi;
}

// Shares from weights w_j = exp(-S_j); writes d and returns sum_j margin_j d_j.
class SumEvaluator {
 public:
  explicit SumEvaluator(const ChoiceInstance& inst) : inst_(inst) {
    if (const auto* nl = std::get_if<NlInstance>(&inst)) {
      for (std::size_t i = 0; i < nl->nests.size(); ++i) {
        nest_begin_.push_back(nl->offset(i));
        nest_size_.push_back(static_cast<Index>(nl->nests[i].products.size()));
        gamma_.push_back(nl->nests[i].gamma);
      }
    }
  }

  /// Per-dimension weight of sum s: e^{-s}, or e^{-s / gamma} for NL.
  double weight(Index j, double s) const {
    if (const auto* nl = std::get_if<NlInstance>(&inst_)) {
      const auto nest = nl->nest_of_product()[std::size_t(j)];
      return std::exp(-s / nl->nests[nest].gamma);
    }
    return std::exp(-s);
  }

  /// Called whenever a weight other than the last one changes.
  void prepare(const double* w, Index n) {
    if (const auto* mc = std::get_if<McInstance>(&inst_)) prepare(*mc, w, n);
  }

  double operator()(const double* w, const double* margin, double* d, Index n) {
    return std::visit([&](const auto& m) { return eval(m, w, margin, d, n); }, inst_);
  }

 private:
  // (I - R^T) v = lambda with R_ij = (1 - w_i) rho_ij. Column n-1 of the
  // system is affine in the last weight: M = B + w_{n-1} a e'. B is solved
  // once per outer lattice point for p = B^{-1} lambda and q = B^{-1} a, and
  // the inner loop applies Sherman-Morrison.
  void prepare(const McInstance& mc, const double* w, Index n) {
    std::array<std::array<double, kOracleMaxDims + 2>, kOracleMaxDims> a{};
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double wi = i + 1 == n ? 0.0 : w[i];
        a[j][i] = (i == j ? 1.0 : 0.0) - (1.0 - wi) * mc.rho(i, j);
      }
      a[j][n] = mc.lambda(j);
      a[j][n + 1] = mc.rho(n - 1, j);
    }
    for (Index c = 0; c < n; ++c) {
      Index piv = c;
      for (Index r = c + 1; r < n; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      for (Index r = c + 1; r < n; ++r) {
        const double f = a[r][c] / a[c][c];
        for (Index k = c; k <= n + 1; ++k) a[r][k] -= f * a[c][k];
      }
    }
    for (Index r = n - 1; r >= 0; --r) {
      double accp = a[r][n], accq = a[r][n + 1];
      for (Index k = r + 1; k < n; ++k) {
        accp -= a[r][k] * p_[k];
        accq -= a[r][k] * q_[k];
      }
      p_[r] = accp / a[r][r];
      q_[r] = accq / a[r][r];
    }
  }

  double eval(const MnlInstance&, const double* w, const double* margin, double* d, Index n) const {
    double denom = 1.0;
    for (Index j = 0; j < n; ++j) denom += w[j];
    double out = 0.0;
    for (Index j = 0; j < n; ++j) {
      d[j] = w[j] / denom;
      out += margin[j] * d[j];
    }
    return out;
  }

  double eval(const McInstance&, const double* w, const double* margin, double* d, Index n) {
    const double last = w[n - 1];
    const double c = last * p_[n - 1] / (1.0 + last * q_[n - 1]);
    double out = 0.0;
    for (Index j = 0; j < n; ++j) {
      d[j] = w[j] * (p_[j] - c * q_[j]);
      out += margin[j] * d[j];
    }
    return out;
  }
  double eval(const NlInstance&, const double* w, const double* margin, double* d, Index) const {
    double denom = 1.0;
    double attraction[kOracleMaxDims];
    double total[kOracleMaxDims];
    for (std::size_t i = 0; i < nest_begin_.size(); ++i) {
      double W = 0.0;
      for (Index j = 0; j < nest_size_[i]; ++j) W += w[nest_begin_[i] + j];
      total[i] = W;
      attraction[i] = std::pow(W, gamma_[i]);
      denom += attraction[i];
    }
    double out = 0.0;
    for (std::size_t i = 0; i < nest_begin_.size(); ++i)
      for (Index j = 0; j < nest_size_[i]; ++j) {
        const Index r = nest_begin_[i] + j;
        d[r] = attraction[i] / denom * w[r] / total[i];
        out += margin[r] * d[r];
      }
    return out;
  }

  const ChoiceInstance& inst_;
  std::vector<Index> nest_begin_, nest_size_;
  std::vector<double> gamma_;
  std::array<double, kOracleMaxDims> p_{}, q_{};
};

}  // namespace detail

/// Exhaustive search over the lattice of per-product attribute sums,
/// followed by `refine_rounds` re-griddings around the incumbent (window
/// shrinks 10x per round). Ties keep the lexicographically first lattice point.
inline OracleResult grid_search(const ChoiceInstance& inst, const GridSpec& grid,
                                const ResourceConstraints& rc = {}) {
  grid.validate();
  validate(inst);
  const ProductView view = product_view(inst);
  const Index n = view.phi.rows();
  if (n > kOracleMaxDims)
    throw Error(ErrorCode::TooManyDims, std::to_string(n) + " products exceed the oracle limit of 6");
  if (std::pow(double(grid.points_per_dim), double(n)) > kOracleMaxEvaluations)
    throw Error(ErrorCode::TooManyDims, "points_per_dim^" + std::to_string(n) + " exceeds 1e8 evaluations");
  if (rc.rows() > 0 && rc.Gamma.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "Gamma must have one column per product");
  if (const auto* mc = std::get_if<McInstance>(&inst)) require_mc_base_system(*mc);

  Vector s_lo(n), s_hi(n);
  for (Index j = 0; j < n; ++j) {
    s_lo(j) = view.x_lower.row(j).sum();
    s_hi(j) = view.x_upper.row(j).sum();
  }
  detail::SumEvaluator evaluate(inst);

  OracleResult out;
  Vector best_s = s_lo;
  Vector lo = s_lo, hi = s_hi;
  for (int round = 0; round <= grid.refine_rounds; ++round) {
    std::vector<std::vector<double>> values{std::size_t(n)}, weights{std::size_t(n)}, margins{std::size_t(n)};
    out.resolution = 0.0;
    for (Index j = 0; j < n; ++j) {
      const int count = hi(j) > lo(j) ? grid.points_per_dim : 1;
      const double step = count > 1 ? (hi(j) - lo(j)) / double(count - 1) : 0.0;
      out.resolution = std::max(out.resolution, step);
      for (int t = 0; t < count; ++t) {
        const double s = t + 1 == count ? hi(j) : lo(j) + step * t;
        values[std::size_t(j)].push_back(s);
        weights[std::size_t(j)].push_back(evaluate.weight(j, s));
        margins[std::size_t(j)].push_back(detail::best_margin(view.phi.row(j).transpose(), view.psi(j),
                                                              view.x_lower.row(j).transpose(),
                                                              view.x_upper.row(j).transpose(), s));
      }
    }

    std::vector<std::size_t> idx(std::size_t(n), 0);
    double w[kOracleMaxDims], margin[kOracleMaxDims], d[kOracleMaxDims];
    std::vector<std::size_t> round_best;
    double round_value = -std::numeric_limits<double>::infinity();
    bool outer_changed = true;
    for (;;) {
      for (Index j = 0; j < n; ++j) {
        w[j] = weights[std::size_t(j)][idx[std::size_t(j)]];
        margin[j] = margins[std::size_t(j)][idx[std::size_t(j)]];
      }
      if (outer_changed) evaluate.prepare(w, n);
      const double value = evaluate(w, margin, d, n);
      ++out.evaluations;
      bool ok = true;
      for (Index l = 0; l < rc.rows() && ok; ++l) {
        double lhs = 0.0;
        for (Index j = 0; j < n; ++j) lhs += rc.Gamma(l, j) * d[j];
        ok = lhs >= rc.gamma_rhs(l);
      }
      if (ok && value > round_value) {
        round_value = value;
        round_best = idx;
      }
      Index j = n - 1;
      while (j >= 0 && ++idx[std::size_t(j)] == values[std::size_t(j)].size()) idx[std::size_t(j--)] = 0;
      if (j < 0) break;
      outer_changed = j + 1 < n;
    }
    if (round_best.empty()) {
      if (round == 0) return out;
      break;
    }
    if (round_value > out.best_objective || round == 0) {
      out.best_objective = round_value;
      for (Index j = 0; j < n; ++j) best_s(j) = values[std::size_t(j)][round_best[std::size_t(j)]];
    }
    out.feasible = true;
    for (Index j = 0; j < n; ++j) {
      const double half = (hi(j) - lo(j)) / 20.0;
      lo(j) = std::max(s_lo(j), best_s(j) - half);
      hi(j) = std::min(s_hi(j), best_s(j) + half);
    }
  }

  out.best_x = Matrix(n, view.phi.cols());
  for (Index j = 0; j < n; ++j)
    out.best_x.row(j) = detail::allocate(view.phi.row(j).transpose(), view.x_lower.row(j).transpose(),
                                         view.x_upper.row(j).transpose(), best_s(j))
                            .transpose();
  out.best_objective = expected_profit(inst, out.best_x);
  return out;
}

/// L = sum |phi| * (1 + max |margin|) over the box.
inline double lipschitz_bound(const ChoiceInstance& inst) {
  const ProductView view = product_view(inst);
  double max_margin = 0.0;
  for (Index j = 0; j < view.phi.rows(); ++j) {
    double hi = -view.psi(j), lo = -view.psi(j);
    for (Index k = 0; k < view.phi.cols(); ++k) {
      const double a = view.phi(j, k) * view.x_lower(j, k), b = view.phi(j, k) * view.x_upper(j, k);
      hi += std::max(a, b);
      lo += std::min(a, b);
    }
    max_margin = std::max({max_margin, std::abs(hi), std::abs(lo)});
  }
  return view.phi.cwiseAbs().sum() * (1.0 + max_margin);
}

struct ComparisonReport {
  SolveStatus solver_status = SolveStatus::NumericalFailure;
  bool solver_infeasible = false;
  bool oracle_infeasible = false;
  double solver_objective = std::numeric_limits<double>::quiet_NaN();
  double oracle_objective = std::numeric_limits<double>::quiet_NaN();
  double objective_difference = std::numeric_limits<double>::quiet_NaN();  // solver - oracle
  double x_difference = std::numeric_limits<double>::quiet_NaN();  // over equal-margin groups
  double tolerance = 0;       // 1e-3 (1 + |solver objective|)
  double lipschitz_slack = 0;  // L * final resolution
  Matrix solver_x;
  Matrix oracle_x;
  bool passes = false;
};

/// Largest difference of attribute sums over groups of equal margin.
inline double grouped_x_difference(const ChoiceInstance& inst, const Matrix& a, const Matrix& b) {
  const ProductView view = product_view(inst);
  double out = 0.0;
  for (Index j = 0; j < a.rows(); ++j) {
    std::vector<bool> seen(std::size_t(a.cols()), false);
    for (Index k = 0; k < a.cols(); ++k) {
      if (seen[std::size_t(k)]) continue;
      double sa = 0.0, sb = 0.0;
      for (Index l = k; l < a.cols(); ++l)
        if (std::abs(view.phi(j, l) - view.phi(j, k)) <= 1e-12) {
          seen[std::size_t(l)] = true;
          sa += a(j, l);
          sb += b(j, l);
        }
      out = std::max(out, std::abs(sa - sb));
    }
  }
  return out;
}

/// Full pipeline against grid_search.
inline ComparisonReport compare(const ChoiceInstance& inst, const SolverConfig& cfg, const GridSpec& grid,
                                const ResourceConstraints& rc = {}) {
  ComparisonReport out;
  const OracleResult oracle = grid_search(inst, grid, rc);
  const PipelineResult pipe = run_pipeline(inst, rc, cfg);
  out.solver_status = pipe.solution.status;
  out.solver_infeasible = pipe.solution.status == SolveStatus::Infeasible;
  out.oracle_infeasible = !oracle.feasible;
  out.lipschitz_slack = lipschitz_bound(inst) * oracle.resolution;
  if (oracle.feasible) {
    out.oracle_objective = oracle.best_objective;
    out.oracle_x = oracle.best_x;
  }
  if (pipe.recovered) {
    out.solver_objective = pipe.recovered->objective;
    out.solver_x = pipe.recovered->x;
  }
  if (out.solver_infeasible || out.oracle_infeasible) {
    out.passes = out.solver_infeasible && out.oracle_infeasible;
    return out;
  }
  if (!pipe.recovered) return out;
  out.objective_difference = out.solver_objective - out.oracle_objective;
  out.x_difference = grouped_x_difference(inst, out.solver_x, out.oracle_x);
  out.tolerance = 1e-3 * (1.0 + std::abs(out.solver_objective));
  out.passes = std::abs(out.objective_difference) <= out.tolerance;
  return out;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_ORACLE_HPP
