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

#ifndef CHOICEOPT_PROGRAM_HPP
#define CHOICEOPT_PROGRAM_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/expcone.hpp"
#include "choiceopt/model.hpp"

namespace choiceopt {

using Index = Eigen::Index;

struct LinearTerm {
  Index var;
  double coef;
};

/// constant + sum coef * w[var]
struct LinearExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  LinearExpr() = default;
  LinearExpr(std::vector<LinearTerm> t, double c = 0.0) : terms(std::move(t)), constant(c) {}

  static LinearExpr var(Index v, double coef = 1.0) { return LinearExpr({{v, coef}}); }

  LinearExpr& add(Index v, double coef) {
    terms.push_back({v, coef});
    return *this;
  }

  double eval(const Vector& w) const {
    double out = constant;
    for (const auto& t : terms) out += t.coef * w(t.var);
    return out;
  }
};

/// lhs (== or <=) rhs; lhs carries no constant. `role` and `index` name the
/// row's multiplier in the dual.
struct LinearRow {
  LinearExpr lhs;
  double rhs = 0.0;
  std::string role;
  Index index = 0;
};

/// (parts[0], parts[1], parts[2]) in the exponential cone. The dual
/// multiplier is named (r<role>, s<role>, t<role>)[index].
struct ConeTriple {
  std::array<LinearExpr, 3> parts;
  std::string role;
  Index index = 0;
};

/// Named blocks of program variables, e.g. "d" -> indices of d_1..d_J.
class VariableMap {
 public:
  const std::vector<Index>& operator[](const std::string& role) const {
    auto it = roles_.find(role);
    if (it == roles_.end()) throw Error(ErrorCode::InvariantError, "unknown variable role " + role);
    return it->second;
  }
  bool contains(const std::string& role) const { return roles_.count(role) > 0; }
  const std::map<std::string, std::vector<Index>>& roles() const { return roles_; }
  std::vector<Index>& entry(const std::string& role) { return roles_[role]; }

 private:
  std::map<std::string, std::vector<Index>> roles_;
};

/// maximize objective . w subject to equalities, inequalities and
/// exponential-cone memberships of affine expressions.
struct ConicProgram {
  Index n_vars = 0;
  Vector objective;
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;
  std::vector<ConeTriple> cones;
  VariableMap variables;

  /// Appends `count` variables under `role` and returns the first index.
  Index add_variables(const std::string& role, Index count) {
    const Index first = n_vars;
    auto& slot = variables.entry(role);
    for (Index i = 0; i < count; ++i) slot.push_back(first + i);
    n_vars += count;
    Vector grown = Vector::Zero(n_vars);
    if (objective.size() > 0) grown.head(objective.size()) = objective;
    objective = grown;
    return first;
  }

  void validate() const {
    if (objective.size() != n_vars)
      throw Error(ErrorCode::DimensionMismatch, "objective length differs from n_vars");
    auto check = [&](const LinearExpr& e) {
      for (const auto& t : e.terms)
        if (t.var < 0 || t.var >= n_vars)
          throw Error(ErrorCode::InvariantError, "expression references variable out of range");
    };
    for (const auto& r : equalities) check(r.lhs);
    for (const auto& r : inequalities) check(r.lhs);
    for (const auto& c : cones)
      for (const auto& p : c.parts) check(p);
    std::set<Index> seen;
    for (const auto& [role, idx] : variables.roles())
      for (Index i : idx) {
        if (i < 0 || i >= n_vars) throw Error(ErrorCode::InvariantError, "role " + role + " out of range");
        if (!seen.insert(i).second)
          throw Error(ErrorCode::InvariantError, "variable roles overlap at index " + std::to_string(i));
      }
  }
};

/// Rows sum_j Gamma(l, j) d_j >= gamma_rhs(l) on market shares.
struct ResourceConstraints {
  Matrix Gamma;
  Vector gamma_rhs;

  Index rows() const { return Gamma.rows(); }
};

/// Absolute residuals of a candidate point.
struct ResidualReport {
  double equality = 0.0;    // max |a.w - b|
  double inequality = 0.0;  // max(0, a.w - b)
  double cone = 0.0;        // worst signed cone violation (<= 0 inside)
  double gap = std::numeric_limits<double>::quiet_NaN();
};

inline ResidualReport residuals(const ConicProgram& prog, const Vector& w) {
  ResidualReport out;
  for (const auto& r : prog.equalities)
    out.equality = std::max(out.equality, std::abs(r.lhs.eval(w) - r.rhs));
  for (const auto& r : prog.inequalities)
    out.inequality = std::max(out.inequality, r.lhs.eval(w) - r.rhs);
  out.cone = prog.cones.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (const auto& c : prog.cones)
    out.cone = std::max(out.cone, conic::expcone_violation(c.parts[0].eval(w), c.parts[1].eval(w),
                                                           c.parts[2].eval(w)));
  return out;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_PROGRAM_HPP
