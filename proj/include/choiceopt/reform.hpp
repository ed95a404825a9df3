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

// Conic market-share programs. Each builder introduces u_jk = x_jk d_j (or the
// nest totals v_k) and encodes the logarithmic share relations as
// exponential-cone memberships of affine expressions.

#ifndef CHOICEOPT_REFORM_HPP
#define CHOICEOPT_REFORM_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/feasibility.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/program.hpp"

namespace choiceopt {

namespace detail {

inline void add_box_rows(ConicProgram& prog, Index d, const std::vector<Index>& u_row, const Matrix& lo,
                         const Matrix& hi, Index j) {
  for (Index k = 0; k < lo.cols(); ++k) {
    const Index u = u_row[std::size_t(k)];
    prog.inequalities.push_back({LinearExpr({{d, lo(j, k)}, {u, -1.0}}), 0.0, "b", j * lo.cols() + k});
    prog.inequalities.push_back({LinearExpr({{u, 1.0}, {d, -hi(j, k)}}), 0.0, "q", j * lo.cols() + k});
  }
}

}  // namespace detail

/// Variables d (J), d0, u (J*K, row-major by product).
inline ConicProgram build_mnl(const MnlInstance& inst) {
  inst.validate();
  const Index J = inst.products();
  const Index K = inst.attributes();
  ConicProgram prog;
  const Index d = prog.add_variables("d", J);
  const Index d0 = prog.add_variables("d0", 1);
  const Index u = prog.add_variables("u", J * K);

  LinearExpr simplex;
  simplex.add(d0, 1.0);
  for (Index j = 0; j < J; ++j) {
    prog.objective(d + j) = -inst.psi(j);
    simplex.add(d + j, 1.0);
    LinearExpr sum_u;
    std::vector<Index> u_row;
    for (Index k = 0; k < K; ++k) {
      prog.objective(u + j * K + k) = inst.phi(j, k);
      sum_u.add(u + j * K + k, 1.0);
      u_row.push_back(u + j * K + k);
    }
    const double x_hi_sum = inst.x_upper.row(j).sum();
    prog.cones.push_back({{LinearExpr::var(d0), LinearExpr::var(d + j), sum_u}, "1", j});
    prog.cones.push_back({{LinearExpr::var(d + j), LinearExpr::var(d0), LinearExpr::var(d0, -x_hi_sum)}, "2", j});
    detail::add_box_rows(prog, d + j, u_row, inst.x_lower, inst.x_upper, j);
  }
  prog.equalities.push_back({simplex, 1.0, "z0", 0});
  return prog;
}

/// Variables v (J), d (J), u (J*K).
inline ConicProgram build_mc(const McInstance& inst) {
  inst.validate();
  require_mc_base_system(inst);
  const Index J = inst.products();
  const Index K = inst.attributes();
  ConicProgram prog;
  const Index d = prog.add_variables("d", J);
  const Index v = prog.add_variables("v", J);
  const Index u = prog.add_variables("u", J * K);

  for (Index j = 0; j < J; ++j) {
    prog.objective(d + j) = -inst.psi(j);
    LinearExpr flow;
    flow.add(v + j, 1.0);
    for (Index i = 0; i < J; ++i) {
      if (inst.rho(i, j) == 0.0) continue;
      flow.add(v + i, -inst.rho(i, j));
      flow.add(d + i, inst.rho(i, j));
    }
    prog.equalities.push_back({flow, inst.lambda(j), "z", j});

    LinearExpr sum_u;
    std::vector<Index> u_row;
    for (Index k = 0; k < K; ++k) {
      prog.objective(u + j * K + k) = inst.phi(j, k);
      sum_u.add(u + j * K + k, 1.0);
      u_row.push_back(u + j * K + k);
    }
    const double x_hi_sum = inst.x_upper.row(j).sum();
    prog.cones.push_back({{LinearExpr::var(v + j), LinearExpr::var(d + j), sum_u}, "1", j});
    prog.cones.push_back({{LinearExpr::var(d + j), LinearExpr::var(v + j), LinearExpr::var(v + j, -x_hi_sum)}, "2", j});
    detail::add_box_rows(prog, d + j, u_row, inst.x_lower, inst.x_upper, j);
  }
  return prog;
}

/// Variables d (sum J_i), p0, p (I), v (I*K), e and f (sum J_i), g and h (I).
/// Products and nest totals are laid out nest by nest.
inline ConicProgram build_nl(const NlInstance& inst) {
  inst.validate();
  const auto I = static_cast<Index>(inst.nests.size());
  const Index K = inst.K;
  const Index n = inst.products();
  ConicProgram prog;
  const Index d = prog.add_variables("d", n);
  const Index p0 = prog.add_variables("p0", 1);
  const Index p = prog.add_variables("p", I);
  const Index v = prog.add_variables("v", I * K);
  const Index e = prog.add_variables("e", n);
  const Index f = prog.add_variables("f", n);
  const Index g = prog.add_variables("g", I);
  const Index h = prog.add_variables("h", I);

  LinearExpr simplex;
  simplex.add(p0, 1.0);
  Index row = 0;
  for (Index i = 0; i < I; ++i) {
    const Nest& nest = inst.nests[std::size_t(i)];
    const double gamma = nest.gamma;
    const auto Ji = static_cast<Index>(nest.products.size());
    simplex.add(p + i, 1.0);

    LinearExpr eg;
    LinearExpr nest_sum;
    for (Index j = 0; j < Ji; ++j) {
      const Index r = row + j;
      const NlProduct& prod = nest.products[std::size_t(j)];
      prog.objective(d + r) = -prod.psi;
      eg.add(e + r, gamma);
      nest_sum.add(d + r, 1.0);

      LinearExpr fh;
      fh.add(f + r, gamma);
      if (gamma < 1.0) fh.add(h + i, 1.0 - gamma);
      fh.add(p0, prod.x_upper.sum());
      prog.equalities.push_back({fh, 0.0, "c", r});

      prog.cones.push_back({{LinearExpr::var(p0), LinearExpr::var(d + r), LinearExpr::var(e + r)}, "1", r});
      prog.cones.push_back({{LinearExpr::var(d + r), LinearExpr::var(p0), LinearExpr::var(f + r)}, "2", r});
    }
    if (gamma < 1.0) eg.add(g + i, 1.0 - gamma);
    for (Index k = 0; k < K; ++k) {
      const Index vk = v + i * K + k;
      prog.objective(vk) = nest.rho_shared(k);
      eg.add(vk, -1.0);
      LinearExpr lower, upper;
      for (Index j = 0; j < Ji; ++j) {
        const NlProduct& prod = nest.products[std::size_t(j)];
        if (prod.x_lower(k) != 0.0) lower.add(d + row + j, prod.x_lower(k));
        if (prod.x_upper(k) != 0.0) upper.add(d + row + j, -prod.x_upper(k));
      }
      lower.add(vk, -1.0);
      upper.add(vk, 1.0);
      prog.inequalities.push_back({lower, 0.0, "b", i * K + k});
      prog.inequalities.push_back({upper, 0.0, "q", i * K + k});
    }
    prog.equalities.push_back({eg, 0.0, "w", i});
    nest_sum.add(p + i, -1.0);
    prog.equalities.push_back({nest_sum, 0.0, "z", i});
    if (gamma < 1.0) {
      prog.cones.push_back({{LinearExpr::var(p0), LinearExpr::var(p + i), LinearExpr::var(g + i)}, "3", i});
      prog.cones.push_back({{LinearExpr::var(p + i), LinearExpr::var(p0), LinearExpr::var(h + i)}, "4", i});
    } else {
      // gamma = 1: g and h are pinned to zero without nest cones.
      prog.equalities.push_back({LinearExpr::var(g + i), 0.0, "g_pin", i});
      prog.equalities.push_back({LinearExpr::var(h + i), 0.0, "h_pin", i});
    }
    row += Ji;
  }
  prog.equalities.push_back({simplex, 1.0, "z0", 0});
  return prog;
}

/// Appends -sum_j Gamma(l, j) d_j <= -gamma_rhs(l) for every row l.
inline ConicProgram with_resources(ConicProgram prog, const ResourceConstraints& rc) {
  if (rc.rows() == 0) return prog;
  const auto& d = prog.variables["d"];
  if (rc.Gamma.cols() != static_cast<Index>(d.size()))
    throw Error(ErrorCode::DimensionMismatch, "Gamma must have one column per product share");
  if (rc.gamma_rhs.size() != rc.Gamma.rows())
    throw Error(ErrorCode::DimensionMismatch, "gamma_rhs must have one entry per Gamma row");
  for (Index l = 0; l < rc.rows(); ++l) {
    LinearExpr lhs;
    for (Index j = 0; j < rc.Gamma.cols(); ++j)
      if (rc.Gamma(l, j) != 0.0) lhs.add(d[std::size_t(j)], -rc.Gamma(l, j));
    prog.inequalities.push_back({lhs, -rc.gamma_rhs(l), "m", l});
  }
  return prog;
}

/// Dispatches to the matching builder.
inline ConicProgram build(const ChoiceInstance& inst) {
  return std::visit(
      [](const auto& m) -> ConicProgram {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MnlInstance>) return build_mnl(m);
        else if constexpr (std::is_same_v<T, McInstance>) return build_mc(m);
        else return build_nl(m);
      },
      inst);
}

/// Maps an original-problem point (x, shares) to program variables.
inline Vector lift(const ChoiceInstance& inst, const ConicProgram& prog, const Matrix& x) {
  const MarketShares s = shares(inst, x);
  Vector w = Vector::Zero(prog.n_vars);
  const auto& d = prog.variables["d"];
  for (std::size_t j = 0; j < d.size(); ++j) w(d[j]) = s.d(Index(j));
  if (const auto* nl = std::get_if<NlInstance>(&inst)) {
    const double p0 = *s.outside;
    w(prog.variables["p0"][0]) = p0;
    const auto& p = prog.variables["p"];
    const auto& v = prog.variables["v"];
    const auto& e = prog.variables["e"];
    const auto& f = prog.variables["f"];
    const auto& g = prog.variables["g"];
    const auto& h = prog.variables["h"];
    Index row = 0;
    for (std::size_t i = 0; i < nl->nests.size(); ++i) {
      const auto& nest = nl->nests[i];
      const auto Ji = static_cast<Index>(nest.products.size());
      const double pi = s.nest_shares(Index(i));
      const double gamma = nest.gamma;
      w(p[i]) = pi;
      w(g[i]) = gamma < 1.0 ? pi * std::log(p0 / pi) : 0.0;
      w(h[i]) = gamma < 1.0 ? p0 * std::log(pi / p0) : 0.0;
      for (Index k = 0; k < nl->K; ++k) {
        double total = 0.0;
        for (Index j = 0; j < Ji; ++j) total += x(row + j, k) * s.d(row + j);
        w(v[std::size_t(Index(i) * nl->K + k)]) = total;
      }
      for (Index j = 0; j < Ji; ++j) {
        const double dj = s.d(row + j);
        const double x_hi_sum = nest.products[std::size_t(j)].x_upper.sum();
        w(e[std::size_t(row + j)]) = dj * std::log(p0 / dj);
        w(f[std::size_t(row + j)]) = (-p0 * x_hi_sum - (1.0 - gamma) * w(h[i])) / gamma;
      }
      row += Ji;
    }
    return w;
  }
  const auto& u = prog.variables["u"];
  const Index K = x.cols();
  for (Index j = 0; j < x.rows(); ++j)
    for (Index k = 0; k < K; ++k) w(u[std::size_t(j * K + k)]) = x(j, k) * s.d(j);
  if (prog.variables.contains("d0")) w(prog.variables["d0"][0]) = *s.outside;
  if (prog.variables.contains("v"))
    for (std::size_t j = 0; j < d.size(); ++j) w(prog.variables["v"][j]) = s.visits(Index(j));
  return w;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_REFORM_HPP
