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

#ifndef CHOICEOPT_FEASIBILITY_HPP
#define CHOICEOPT_FEASIBILITY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/model.hpp"

namespace choiceopt {

/// Box half-width standing in for an unbounded attribute, in adjusted units.
inline constexpr double kUnboundedAttribute = 1e6;

// ---------------------------------------------------------------------------
// Markov-chain base system v = lambda + rho^T v.

struct S2Classification {
  enum class Kind { Unique, NoSolution, InfinitelyMany };
  Kind kind = Kind::NoSolution;
  Vector visits;  // set for Unique
  bool strictly_positive = false;
  double residual = 0.0;  // ||(I - rho^T) v - lambda||_inf, or least-squares residual

  bool unique_positive() const { return kind == Kind::Unique && strictly_positive; }
};

inline const char* to_string(S2Classification::Kind kind) {
  switch (kind) {
    case S2Classification::Kind::Unique: return "unique";
    case S2Classification::Kind::NoSolution: return "no_solution";
    case S2Classification::Kind::InfinitelyMany: return "infinitely_many";
  }
  return "unknown";
}

inline S2Classification s2_classify(const Vector& lambda, const Matrix& rho) {
  const auto J = lambda.size();
  detail::require_shape(rho, J, J, "rho");
  const Matrix system = Matrix::Identity(J, J) - rho.transpose();

  // Absolute pivot tolerance 1e-12 * ||rho||_inf (floored at 1e-12).
  const double rho_norm = rho.size() == 0 ? 0.0 : rho.cwiseAbs().rowwise().sum().maxCoeff();
  const double pivot_tol = 1e-12 * std::max(1.0, rho_norm);
  Eigen::FullPivLU<Matrix> lu(system);
  const double max_pivot = lu.maxPivot();
  lu.setThreshold(max_pivot > 0.0 ? pivot_tol / max_pivot : pivot_tol);

  S2Classification out;
  if (lu.rank() == J) {
    out.kind = S2Classification::Kind::Unique;
    out.visits = lu.solve(lambda);
    out.residual = (system * out.visits - lambda).cwiseAbs().maxCoeff();
    out.strictly_positive = (out.visits.array() > 0.0).all();
    return out;
  }
  const Vector ls = system.completeOrthogonalDecomposition().solve(lambda);
  out.residual = (system * ls - lambda).norm();
  out.kind = out.residual <= 1e-9 ? S2Classification::Kind::InfinitelyMany
                                  : S2Classification::Kind::NoSolution;
  return out;
}

inline void require_mc_base_system(const McInstance& inst) {
  const auto s2 = s2_classify(inst.lambda, inst.rho);
  if (!s2.unique_positive())
    throw Error(ErrorCode::McBaseSystemDegenerate,
                std::string("base visit system is ") + to_string(s2.kind) +
                    (s2.kind == S2Classification::Kind::Unique ? " but not strictly positive" : ""));
}

// ---------------------------------------------------------------------------

struct DefaultPoint {
  Matrix x;
  MarketShares shares;
};

/// Every attribute at its lower bound; feasible for the original problem.
inline DefaultPoint default_point(const ChoiceInstance& inst) {
  if (const auto* mc = std::get_if<McInstance>(&inst)) require_mc_base_system(*mc);
  DefaultPoint out;
  out.x = product_view(inst).x_lower;
  out.shares = shares(inst, out.x);
  return out;
}

// ---------------------------------------------------------------------------
// Nested-logit margin structure.

struct A3Report {
  bool passes = true;
  std::vector<Vector> rho_shared;  // per nest; valid when passes
  std::vector<std::pair<std::size_t, Eigen::Index>> offending;  // (nest, attribute)
};

/// Checks that within each nest, attribute k has one strictly positive
/// margin shared by every product. `nest_margins[i]` is J_i x K.
inline A3Report a3_validate(const std::vector<Matrix>& nest_margins) {
  constexpr double kTol = 1e-12;
  A3Report report;
  for (std::size_t i = 0; i < nest_margins.size(); ++i) {
    const Matrix& m = nest_margins[i];
    Vector shared = m.rows() > 0 ? Vector(m.row(0).transpose()) : Vector();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      bool ok = m.rows() > 0;
      for (Eigen::Index j = 0; j < m.rows(); ++j) {
        if (!(m(j, k) > 0.0) || std::abs(m(j, k) - m(0, k)) > kTol) ok = false;
      }
      if (!ok) {
        report.passes = false;
        report.offending.emplace_back(i, k);
      }
    }
    report.rho_shared.push_back(std::move(shared));
  }
  if (!report.passes) report.rho_shared.clear();
  return report;
}

/// Product description before attribute splitting: K' attributes with
/// product-specific margins.
struct ProductSpec {
  double psi = 0.0;
  Vector phi;
  Vector x_lower;
  Vector x_upper;
};

struct NestSpec {
  double gamma = 1.0;
  std::vector<ProductSpec> products;
};

/// Builds an NL instance directly when margins already satisfy the shared
/// margin structure.
inline NlInstance nl_from_specs(const std::vector<NestSpec>& specs) {
  std::vector<Matrix> margins;
  for (const auto& nest : specs) {
    const auto K = nest.products.empty() ? 0 : nest.products.front().phi.size();
    Matrix m(static_cast<Eigen::Index>(nest.products.size()), K);
    for (std::size_t j = 0; j < nest.products.size(); ++j) {
      if (nest.products[j].phi.size() != K)
        throw Error(ErrorCode::DimensionMismatch, "products in a nest need equal attribute counts");
      m.row(Eigen::Index(j)) = nest.products[j].phi.transpose();
    }
    margins.push_back(std::move(m));
  }
  const A3Report report = a3_validate(margins);
  if (!report.passes) {
    std::string what = "margins differ within a nest or are not positive at";
    for (const auto& [i, k] : report.offending)
      what += " (nest " + std::to_string(i) + ", attribute " + std::to_string(k) + ")";
    throw Error(ErrorCode::A3Violated, what);
  }
  NlInstance out;
  out.K = specs.empty() || specs.front().products.empty() ? 0 : specs.front().products.front().phi.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Nest nest;
    nest.gamma = specs[i].gamma;
    nest.rho_shared = report.rho_shared[i];
    for (const auto& p : specs[i].products) nest.products.push_back({p.psi, p.x_lower, p.x_upper});
    if (nest.rho_shared.size() != out.K)
      throw Error(ErrorCode::DimensionMismatch, "all nests need the same attribute count");
    out.nests.push_back(std::move(nest));
  }
  out.validate();
  return out;
}

/// Splits every non-shared attribute into one column per product of the
/// nest: column (p, j) carries product j's margin and box for attribute p and
/// a [0, 0] box for the other products. The shared attribute is appended
/// last. Nests with fewer columns are padded with switched-off attributes so
/// that all nests have K = max_i J_i (K' - 1) + 1 columns.
inline NlInstance split_attributes(const std::vector<NestSpec>& specs, Eigen::Index shared) {
  if (specs.empty()) throw Error(ErrorCode::InvariantError, "at least one nest is required");
  const Eigen::Index K_raw = specs.front().products.empty() ? 0 : specs.front().products.front().phi.size();
  if (shared < 0 || shared >= K_raw)
    throw Error(ErrorCode::InvariantError, "shared attribute index out of range");

  std::vector<Eigen::Index> private_attrs;
  for (Eigen::Index k = 0; k < K_raw; ++k)
    if (k != shared) private_attrs.push_back(k);
  const auto P = static_cast<Eigen::Index>(private_attrs.size());

  Eigen::Index K = 1;
  for (const auto& nest : specs) {
    if (nest.products.empty()) throw Error(ErrorCode::InvariantError, "nest without products");
    K = std::max(K, static_cast<Eigen::Index>(nest.products.size()) * P + 1);
  }

  NlInstance out;
  out.K = K;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const auto J = static_cast<Eigen::Index>(spec.products.size());
    for (const auto& p : spec.products)
      if (p.phi.size() != K_raw || p.x_lower.size() != K_raw || p.x_upper.size() != K_raw)
        throw Error(ErrorCode::DimensionMismatch, "products need K' margins and bounds");
    const double shared_margin = spec.products.front().phi(shared);
    for (const auto& p : spec.products)
      if (!(p.phi(shared) > 0.0) || std::abs(p.phi(shared) - shared_margin) > 1e-12)
        throw Error(ErrorCode::NoSharedAttribute,
                    "nest " + std::to_string(i) + ": shared attribute margins differ");

    Nest nest;
    nest.gamma = spec.gamma;
    nest.rho_shared = Vector::Ones(K);
    nest.owner.assign(std::size_t(K), kPaddingAttribute);
    nest.products.resize(std::size_t(J));
    for (auto& p : nest.products) {
      p.x_lower = Vector::Zero(K);
      p.x_upper = Vector::Zero(K);
    }
    for (Eigen::Index j = 0; j < J; ++j) nest.products[std::size_t(j)].psi = spec.products[std::size_t(j)].psi;

    for (Eigen::Index pi = 0; pi < P; ++pi) {
      const Eigen::Index attr = private_attrs[std::size_t(pi)];
      for (Eigen::Index j = 0; j < J; ++j) {
        const Eigen::Index col = pi * J + j;
        const auto& src = spec.products[std::size_t(j)];
        nest.rho_shared(col) = src.phi(attr);
        nest.owner[std::size_t(col)] = static_cast<int>(j);
        nest.products[std::size_t(j)].x_lower(col) = src.x_lower(attr);
        nest.products[std::size_t(j)].x_upper(col) = src.x_upper(attr);
      }
    }
    nest.rho_shared(K - 1) = shared_margin;
    nest.owner[std::size_t(K - 1)] = kSharedAttribute;
    for (Eigen::Index j = 0; j < J; ++j) {
      nest.products[std::size_t(j)].x_lower(K - 1) = spec.products[std::size_t(j)].x_lower(shared);
      nest.products[std::size_t(j)].x_upper(K - 1) = spec.products[std::size_t(j)].x_upper(shared);
    }
    out.nests.push_back(std::move(nest));
  }
  out.validate();
  return out;
}

/// Maps an attribute matrix of a split instance back to the K' original
/// attributes (per product, in original column order).
inline Matrix merge_split_attributes(const NlInstance& split, const Matrix& x, Eigen::Index K_raw,
                                     Eigen::Index shared) {
  Matrix out = Matrix::Zero(split.products(), K_raw);
  std::vector<Eigen::Index> private_attrs;
  for (Eigen::Index k = 0; k < K_raw; ++k)
    if (k != shared) private_attrs.push_back(k);
  Eigen::Index row = 0;
  for (const auto& nest : split.nests) {
    const auto J = static_cast<Eigen::Index>(nest.products.size());
    for (Eigen::Index j = 0; j < J; ++j) {
      for (Eigen::Index pi = 0; pi < static_cast<Eigen::Index>(private_attrs.size()); ++pi)
        out(row + j, private_attrs[std::size_t(pi)]) = x(row + j, pi * J + j);
      out(row + j, shared) = x(row + j, split.K - 1);
    }
    row += J;
  }
  return out;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_FEASIBILITY_HPP
