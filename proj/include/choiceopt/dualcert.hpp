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

// Lagrangian duals of the market-share programs and explicit strictly
// feasible dual points.
//
// For  max o.w  s.t.  A w = b,  G w <= h,  T_c w + t_c in K_exp  the dual is
//
//   min  b'y + h'z + sum_c t_c' k_c
//   s.t. A'y + G'z - sum_c T_c' k_c = o,   z >= 0,   k_c in K_exp*,
//
// with one stationarity row per primal variable. Multipliers take the role
// names of the primal rows they price: z, z0, w, c for equalities, b and q
// for box rows, m for resource rows, and (r<l>, s<l>, t<l>) for cone family l.

#ifndef CHOICEOPT_DUALCERT_HPP
#define CHOICEOPT_DUALCERT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/expcone.hpp"
#include "choiceopt/feasibility.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/program.hpp"
#include "choiceopt/reform.hpp"
#include "choiceopt/solver.hpp"

namespace choiceopt {

struct DualProgram {
  Index n_vars = 0;
  Vector objective;                   // minimized
  std::vector<LinearRow> equalities;  // stationarity, one per primal variable
  std::vector<Index> nonnegative;
  std::vector<std::array<Index, 3>> cones;  // members of K_exp*
  VariableMap variables;

  // Layout: equality multipliers, inequality multipliers, cone multipliers.
  Index n_eq = 0, n_in = 0, n_cone = 0;

  bool has(const std::string& role, Index index) const { return lookup_.count({role, index}) > 0; }

  Index at(const std::string& role, Index index) const {
    auto it = lookup_.find({role, index});
    if (it == lookup_.end())
      throw Error(ErrorCode::InvariantError, "dual variable " + role + "[" + std::to_string(index) + "] absent");
    return it->second;
  }

  void name(const std::string& role, Index index, Index var) {
    lookup_[{role, index}] = var;
    variables.entry(role).push_back(var);
  }

 private:
  std::map<std::pair<std::string, Index>, Index> lookup_;
};

inline DualProgram dualize(const ConicProgram& prog) {
  prog.validate();
  DualProgram dual;
  dual.n_eq = static_cast<Index>(prog.equalities.size());
  dual.n_in = static_cast<Index>(prog.inequalities.size());
  dual.n_cone = static_cast<Index>(prog.cones.size());
  dual.n_vars = dual.n_eq + dual.n_in + 3 * dual.n_cone;
  dual.objective = Vector::Zero(dual.n_vars);
  dual.equalities.resize(std::size_t(prog.n_vars));
  for (Index k = 0; k < prog.n_vars; ++k) dual.equalities[std::size_t(k)].rhs = prog.objective(k);

  auto role_or = [](const std::string& role, const char* fallback) { return role.empty() ? std::string(fallback) : role; };
  for (Index i = 0; i < dual.n_eq; ++i) {
    const auto& row = prog.equalities[std::size_t(i)];
    dual.objective(i) = row.rhs - row.lhs.constant;
    for (const auto& t : row.lhs.terms) dual.equalities[std::size_t(t.var)].lhs.add(i, t.coef);
    dual.name(role_or(row.role, "y"), row.role.empty() ? i : row.index, i);
  }
  for (Index i = 0; i < dual.n_in; ++i) {
    const auto& row = prog.inequalities[std::size_t(i)];
    const Index var = dual.n_eq + i;
    dual.objective(var) = row.rhs - row.lhs.constant;
    for (const auto& t : row.lhs.terms) dual.equalities[std::size_t(t.var)].lhs.add(var, t.coef);
    dual.nonnegative.push_back(var);
    dual.name(role_or(row.role, "n"), row.role.empty() ? i : row.index, var);
  }
  static constexpr const char* kPart[3] = {"r", "s", "t"};
  for (Index c = 0; c < dual.n_cone; ++c) {
    const auto& cone = prog.cones[std::size_t(c)];
    std::array<Index, 3> vars{};
    for (Index a = 0; a < 3; ++a) {
      const Index var = dual.n_eq + dual.n_in + 3 * c + a;
      vars[std::size_t(a)] = var;
      const auto& part = cone.parts[std::size_t(a)];
      dual.objective(var) = part.constant;
      for (const auto& t : part.terms) dual.equalities[std::size_t(t.var)].lhs.add(var, -t.coef);
      dual.name(kPart[a] + role_or(cone.role, "k"), cone.role.empty() ? c : cone.index, var);
    }
    dual.cones.push_back(vars);
  }
  return dual;
}

inline DualProgram dualize(const ChoiceInstance& inst, const ResourceConstraints& rc = {}) {
  return dualize(with_resources(build(inst), rc));
}

struct DualPoint {
  Vector values;
  double interior_margin = 0.0;  // min over cones of expcone_dual_margin
  double row_residual = 0.0;     // max |stationarity residual|
  double parameter = 0.0;        // epsilon (MC) or delta (MNL, NL) that succeeded
};

inline double dual_value(const DualProgram& dual, const Vector& values) { return dual.objective.dot(values); }

inline double dual_row_residual(const DualProgram& dual, const Vector& values) {
  double out = 0.0;
  for (const auto& row : dual.equalities) out = std::max(out, std::abs(row.lhs.eval(values) - row.rhs));
  return out;
}

inline double dual_interior_margin(const DualProgram& dual, const Vector& values) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& c : dual.cones)
    out = std::min(out, conic::expcone_dual_margin(conic::Vec3(values(c[0]), values(c[1]), values(c[2]))));
  return out;
}

/// True when every nonnegative multiplier is >= -tol and every cone triple
/// lies in K_exp* within tol.
inline bool dual_feasible(const DualProgram& dual, const Vector& values, double tol) {
  if (dual_row_residual(dual, values) > tol) return false;
  for (Index v : dual.nonnegative)
    if (values(v) < -tol) return false;
  for (const auto& c : dual.cones)
    if (!conic::expcone_dual_contains(values(c[0]), values(c[1]), values(c[2]), tol)) return false;
  return true;
}

/// Dual vector assembled from solver multipliers.
inline Vector dual_values(const DualProgram& dual, const PrimalDualSolution& sol) {
  Vector out = Vector::Zero(dual.n_vars);
  if (sol.eq_multipliers.size() == dual.n_eq) out.head(dual.n_eq) = sol.eq_multipliers;
  if (sol.ineq_multipliers.size() == dual.n_in) out.segment(dual.n_eq, dual.n_in) = sol.ineq_multipliers;
  if (static_cast<Index>(sol.cone_multipliers.size()) == dual.n_cone)
    for (Index c = 0; c < dual.n_cone; ++c)
      out.segment<3>(dual.n_eq + dual.n_in + 3 * c) = sol.cone_multipliers[std::size_t(c)];
  return out;
}

namespace detail {

inline DualPoint finish_point(const DualProgram& dual, Vector values, double parameter) {
  DualPoint out;
  out.interior_margin = dual_interior_margin(dual, values);
  out.row_residual = dual_row_residual(dual, values);
  out.parameter = parameter;
  out.values = std::move(values);
  return out;
}

inline bool acceptable(const DualPoint& p) {
  return p.interior_margin > 0.0 && p.row_residual <= 1e-9 * std::max(1.0, p.values.cwiseAbs().maxCoeff());
}

// Box multipliers b = max_k phi - phi, q = 0, so t1 = -max_k phi prices u.
inline Vector offset_box_multipliers(const DualProgram& dual, const Matrix& phi, Vector values) {
  const Index K = phi.cols();
  for (Index j = 0; j < phi.rows(); ++j) {
    const double top = phi.row(j).maxCoeff();
    values(dual.at("t1", j)) = -top;
    for (Index k = 0; k < K; ++k) values(dual.at("b", j * K + k)) = top - phi(j, k);
  }
  return values;
}

inline DualPoint strict_point_mc(const McInstance& inst, const DualProgram& dual) {
  const Index J = inst.products();
  const Index K = inst.attributes();
  Vector base = offset_box_multipliers(dual, inst.phi, Vector::Zero(dual.n_vars));
  Vector r1(J);
  for (Index j = 0; j < J; ++j) {
    const double top = inst.phi.row(j).maxCoeff();
    r1(j) = 1.0 + top * std::exp(-inst.psi(j) / top - 1.0);
  }
  const Matrix system = Matrix::Identity(J, J) - inst.rho;
  const Vector z = system.partialPivLu().solve(r1);
  const Vector rho_z = inst.rho * z;
  Vector s1(J);
  for (Index j = 0; j < J; ++j) {
    double lower = 0.0;
    for (Index k = 0; k < K; ++k) lower += inst.x_lower(j, k) * base(dual.at("b", j * K + k));
    s1(j) = inst.psi(j) + rho_z(j) + lower;
    base(dual.at("z", j)) = z(j);
  }
  DualPoint last;
  for (double eps = 1e-1; eps >= 1e-8 * 0.999; eps /= 10.0) {
    Vector values = base;
    for (Index j = 0; j < J; ++j) {
      const double x_hi_sum = inst.x_upper.row(j).sum();
      values(dual.at("r1", j)) = r1(j) - eps * (1.0 + x_hi_sum);
      values(dual.at("s1", j)) = s1(j) - eps;
      values(dual.at("r2", j)) = eps;
      values(dual.at("s2", j)) = eps;
      values(dual.at("t2", j)) = -eps;
    }
    last = finish_point(dual, std::move(values), eps);
    if (acceptable(last)) return last;
  }
  throw Error(ErrorCode::ConstructionFailed,
              "no epsilon in {1e-1, ..., 1e-8} gives a strictly feasible dual point (margin " +
                  std::to_string(last.interior_margin) + ")");
}

inline DualPoint strict_point_mnl(const MnlInstance& inst, const DualProgram& dual) {
  const Index J = inst.products();
  const Index K = inst.attributes();
  const Vector base = offset_box_multipliers(dual, inst.phi, Vector::Zero(dual.n_vars));
  DualPoint last;
  for (double delta = 10.0; delta <= 1e12; delta *= 10.0) {
    Vector values = base;
    values(dual.at("z0", 0)) = delta;
    for (Index j = 0; j < J; ++j) {
      const double x_hi_sum = inst.x_upper.row(j).sum();
      double lower = 0.0;
      for (Index k = 0; k < K; ++k) lower += inst.x_lower(j, k) * base(dual.at("b", j * K + k));
      values(dual.at("r2", j)) = 1.0;
      values(dual.at("s2", j)) = 1.0;
      values(dual.at("t2", j)) = -1.0;
      values(dual.at("r1", j)) = delta / double(J) - 1.0 - x_hi_sum;
      values(dual.at("s1", j)) = inst.psi(j) + delta + lower - 1.0;
    }
    last = finish_point(dual, std::move(values), delta);
    if (acceptable(last)) return last;
  }
  throw Error(ErrorCode::ConstructionFailed, "no delta up to 1e12 gives a strictly feasible dual point");
}

inline DualPoint strict_point_nl(const NlInstance& inst, const DualProgram& dual) {
  const Index K = inst.K;
  DualPoint last;
  for (double delta = 1e3; delta <= 1e12; delta *= 10.0) {
    Vector values = Vector::Zero(dual.n_vars);
    values(dual.at("z0", 0)) = 2.0 * delta;
    std::vector<Index> shared_pool;  // r1, s2, r3, s4 split the p0 row
    double remainder = 2.0 * delta;
    Index r = 0;
    for (Index i = 0; i < static_cast<Index>(inst.nests.size()); ++i) {
      const Nest& nest = inst.nests[std::size_t(i)];
      const double gamma = nest.gamma;
      const auto Ji = static_cast<Index>(nest.products.size());
      values(dual.at("w", i)) = -1.0;
      for (Index k = 0; k < K; ++k) {
        values(dual.at("q", i * K + k)) = nest.rho_shared(k);
        values(dual.at("b", i * K + k)) = 1.0;
      }
      const double zi = gamma < 1.0 ? delta : 2.0 * delta;
      values(dual.at("z", i)) = zi;
      if (gamma < 1.0) {
        values(dual.at("s3", i)) = 0.5 * delta;
        values(dual.at("r4", i)) = 0.5 * delta;
        values(dual.at("t3", i)) = -(1.0 - gamma);
        values(dual.at("t4", i)) = -(1.0 - gamma) * double(Ji);
        shared_pool.push_back(dual.at("r3", i));
        shared_pool.push_back(dual.at("s4", i));
      }
      for (Index j = 0; j < Ji; ++j, ++r) {
        const NlProduct& prod = nest.products[std::size_t(j)];
        values(dual.at("c", r)) = -1.0;
        values(dual.at("t1", r)) = -gamma;
        values(dual.at("t2", r)) = -gamma;
        double row = prod.psi + zi;
        for (Index k = 0; k < K; ++k) row += prod.x_lower(k) - prod.x_upper(k) * nest.rho_shared(k);
        values(dual.at("s1", r)) = 0.5 * row;
        values(dual.at("r2", r)) = 0.5 * row;
        remainder -= prod.x_upper.sum();
        shared_pool.push_back(dual.at("r1", r));
        shared_pool.push_back(dual.at("s2", r));
      }
    }
    for (Index var : shared_pool) values(var) = remainder / double(shared_pool.size());
    last = finish_point(dual, std::move(values), delta);
    if (acceptable(last)) return last;
  }
  throw Error(ErrorCode::ConstructionFailed, "no delta up to 1e12 gives a strictly feasible dual point");
}

}  // namespace detail

/// Strictly feasible point of the dual of build(inst) with resource rows rc;
/// resource multipliers are zero.
inline DualPoint strict_dual_point(const ChoiceInstance& inst, const ResourceConstraints& rc = {}) {
  const DualProgram dual = dualize(inst, rc);
  return std::visit(
      [&](const auto& m) -> DualPoint {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MnlInstance>) return detail::strict_point_mnl(m, dual);
        else if constexpr (std::is_same_v<T, McInstance>) return detail::strict_point_mc(m, dual);
        else return detail::strict_point_nl(m, dual);
      },
      inst);
}

/// Dual objective at `point` minus the primal objective.
inline double duality_gap(const PrimalDualSolution& primal, const DualProgram& dual, const DualPoint& point) {
  return dual_value(dual, point.values) - primal.objective;
}

/// Gap between the solver's own dual and primal objectives.
inline double duality_gap(const PrimalDualSolution& primal) { return primal.dual_objective - primal.objective; }

}  // namespace choiceopt

#endif  // CHOICEOPT_DUALCERT_HPP
