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

// Choice-model instances (MNL, Markov chain, nested logit) in adjusted
// attribute units, and the evaluators for market shares and expected profit.
//
// Adjusted attributes x enter every model only through the per-product sum
// S_j = sum_k x_jk, with choice weight exp(-S_j).

#ifndef CHOICEOPT_MODEL_HPP
#define CHOICEOPT_MODEL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"

namespace choiceopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

inline std::string at(const char* field, Eigen::Index j) {
  std::ostringstream os;
  os << field << "[" << j << "]";
  return os.str();
}

inline std::string at(const char* field, Eigen::Index j, Eigen::Index k) {
  std::ostringstream os;
  os << field << "[" << j << "][" << k << "]";
  return os.str();
}

[[noreturn]] inline void invariant_failure(const std::string& what) {
  throw Error(ErrorCode::InvariantError, what);
}

inline void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                          const char* field) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << field << " must be " << rows << "x" << cols << ", got " << m.rows()
       << "x" << m.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

inline void require_size(const Vector& v, Eigen::Index size, const char* field) {
  if (v.size() != size) {
    std::ostringstream os;
    os << field << " must have " << size << " entries, got " << v.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

inline void require_finite(const Matrix& m, const char* field) {
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      if (!std::isfinite(m(j, k))) invariant_failure(at(field, j, k) + " must be finite");
}

inline void require_box(const Matrix& lower, const Matrix& upper, const char* lower_name,
                        const char* upper_name) {
  for (Eigen::Index j = 0; j < lower.rows(); ++j)
    for (Eigen::Index k = 0; k < lower.cols(); ++k)
      if (lower(j, k) > upper(j, k))
        invariant_failure(at(lower_name, j, k) + " must be <= " + at(upper_name, j, k));
}

// log(exp(0) + sum_i exp(a_i)), shifted by the largest exponent.
inline double log1p_sum_exp(const Vector& a) {
  double shift = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) shift = std::max(shift, a(i));
  double sum = std::exp(-shift);
  for (Eigen::Index i = 0; i < a.size(); ++i) sum += std::exp(a(i) - shift);
  return shift + std::log(sum);
}

inline double log_sum_exp(const Vector& a) {
  double shift = a.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) sum += std::exp(a(i) - shift);
  return shift + std::log(sum);
}

}  // namespace detail

/// Raw attribute model: utility alpha_j - sum_k beta_jk y_jk and per-product
/// profit sum_k margin_raw_jk y_jk - cost_raw_j.
struct RawAttributeModel {
  Vector alpha;
  Matrix beta;
  Matrix margin_raw;
  Vector cost_raw;
  Matrix y_lower;
  Matrix y_upper;

  Eigen::Index products() const { return beta.rows(); }
  Eigen::Index attributes() const { return beta.cols(); }

  void validate() const {
    const auto J = products();
    const auto K = attributes();
    detail::require_size(alpha, J, "alpha");
    detail::require_shape(margin_raw, J, K, "margin_raw");
    detail::require_size(cost_raw, J, "cost_raw");
    detail::require_shape(y_lower, J, K, "y_lower");
    detail::require_shape(y_upper, J, K, "y_upper");
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index k = 0; k < K; ++k)
        if (!(beta(j, k) > 0.0))
          throw Error(ErrorCode::NonPositiveBeta, detail::at("beta", j, k) + " must be > 0");
    detail::require_box(y_lower, y_upper, "y_lower", "y_upper");
  }
};

/// Adjusted MNL instance. Row j of every matrix is product j, column k is
/// attribute k.
struct MnlInstance {
  Matrix phi;
  Vector psi;
  Matrix x_lower;
  Matrix x_upper;

  Eigen::Index products() const { return phi.rows(); }
  Eigen::Index attributes() const { return phi.cols(); }

  void validate() const {
    const auto J = products();
    const auto K = attributes();
    if (J < 1 || K < 1) detail::invariant_failure("instance needs at least one product and attribute");
    detail::require_size(psi, J, "psi");
    detail::require_shape(x_lower, J, K, "x_lower");
    detail::require_shape(x_upper, J, K, "x_upper");
    detail::require_finite(x_lower, "x_lower");
    detail::require_finite(x_upper, "x_upper");
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index k = 0; k < K; ++k)
        if (!(phi(j, k) > 0.0)) detail::invariant_failure(detail::at("phi", j, k) + " must be > 0");
    detail::require_box(x_lower, x_upper, "x_lower", "x_upper");
  }
};

/// Adjusted Markov-chain instance: arrivals lambda and transition weights
/// rho(i, j) from product i to product j.
struct McInstance {
  Matrix phi;
  Vector psi;
  Matrix x_lower;
  Matrix x_upper;
  Vector lambda;
  Matrix rho;

  Eigen::Index products() const { return phi.rows(); }
  Eigen::Index attributes() const { return phi.cols(); }

  void validate() const {
    MnlInstance{phi, psi, x_lower, x_upper}.validate();
    const auto J = products();
    detail::require_size(lambda, J, "lambda");
    detail::require_shape(rho, J, J, "rho");
    for (Eigen::Index j = 0; j < J; ++j)
      if (!(lambda(j) >= 0.0)) detail::invariant_failure(detail::at("lambda", j) + " must be >= 0");
    for (Eigen::Index i = 0; i < J; ++i)
      for (Eigen::Index j = 0; j < J; ++j)
        if (!(rho(i, j) >= 0.0)) detail::invariant_failure(detail::at("rho", i, j) + " must be >= 0");
    for (Eigen::Index j = 0; j < J; ++j)
      for (Eigen::Index k = 0; k < attributes(); ++k)
        if (x_lower(j, k) < 0.0)
          detail::invariant_failure(detail::at("x_lower", j, k) + " must be >= 0 for the MC model");
  }
};

struct NlProduct {
  double psi = 0.0;
  Vector x_lower;
  Vector x_upper;
};

/// Attribute ownership after `split_attributes`: the product (index within the
/// nest) whose private attribute occupies column k, or one of the markers.
inline constexpr int kSharedAttribute = -1;
inline constexpr int kPaddingAttribute = -2;

struct Nest {
  double gamma = 1.0;
  Vector rho_shared;  // margin of attribute k, identical for every product
  std::vector<NlProduct> products;
  std::vector<int> owner;  // empty unless produced by split_attributes
};

/// Two-level nested logit with non-overlapping nests and one no-purchase
/// alternative. Products are numbered nest by nest in the flat views.
struct NlInstance {
  Eigen::Index K = 0;
  std::vector<Nest> nests;

  Eigen::Index products() const {
    Eigen::Index n = 0;
    for (const auto& nest : nests) n += static_cast<Eigen::Index>(nest.products.size());
    return n;
  }
  Eigen::Index attributes() const { return K; }

  Eigen::Index offset(std::size_t nest) const {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < nest; ++i) n += static_cast<Eigen::Index>(nests[i].products.size());
    return n;
  }

  std::vector<std::size_t> nest_of_product() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nests.size(); ++i)
      out.insert(out.end(), nests[i].products.size(), i);
    return out;
  }

  Matrix phi() const {
    Matrix m(products(), K);
    Eigen::Index r = 0;
    for (const auto& nest : nests)
      for (std::size_t j = 0; j < nest.products.size(); ++j) m.row(r++) = nest.rho_shared.transpose();
    return m;
  }
  Vector psi() const {
    Vector v(products());
    Eigen::Index r = 0;
    for (const auto& nest : nests)
      for (const auto& p : nest.products) v(r++) = p.psi;
    return v;
  }
  Matrix x_lower() const { return stack(&NlProduct::x_lower); }
  Matrix x_upper() const { return stack(&NlProduct::x_upper); }

  void validate() const {
    if (nests.empty()) detail::invariant_failure("nested logit instance needs at least one nest");
    if (K < 1) detail::invariant_failure("nested logit instance needs at least one attribute");
    for (std::size_t i = 0; i < nests.size(); ++i) {
      const auto& nest = nests[i];
      const std::string where = "nests[" + std::to_string(i) + "]";
      if (!(nest.gamma > 0.0 && nest.gamma <= 1.0))
        detail::invariant_failure(where + ".gamma must lie in (0, 1]");
      if (nest.products.empty()) detail::invariant_failure(where + ".products must not be empty");
      if (nest.rho_shared.size() != K)
        throw Error(ErrorCode::DimensionMismatch, where + ".rho_shared must have K entries");
      for (Eigen::Index k = 0; k < K; ++k)
        if (!(nest.rho_shared(k) > 0.0))
          detail::invariant_failure(where + ".rho_shared[" + std::to_string(k) + "] must be > 0");
      for (std::size_t j = 0; j < nest.products.size(); ++j) {
        const auto& p = nest.products[j];
        const std::string pw = where + ".products[" + std::to_string(j) + "]";
        if (p.x_lower.size() != K || p.x_upper.size() != K)
          throw Error(ErrorCode::DimensionMismatch, pw + " bounds must have K entries");
        for (Eigen::Index k = 0; k < K; ++k) {
          if (!std::isfinite(p.x_lower(k)) || !std::isfinite(p.x_upper(k)))
            detail::invariant_failure(pw + ".x bounds must be finite");
          if (p.x_lower(k) > p.x_upper(k))
            detail::invariant_failure(pw + ".x_lower[" + std::to_string(k) + "] must be <= x_upper");
        }
      }
      if (!nest.owner.empty() && static_cast<Eigen::Index>(nest.owner.size()) != K)
        throw Error(ErrorCode::DimensionMismatch, where + ".owner must have K entries");
    }
  }

 private:
  Matrix stack(Vector NlProduct::*field) const {
    Matrix m(products(), K);
    Eigen::Index r = 0;
    for (const auto& nest : nests)
      for (const auto& p : nest.products) m.row(r++) = (p.*field).transpose();
    return m;
  }
};

using ChoiceInstance = std::variant<MnlInstance, McInstance, NlInstance>;

/// Shares for one attribute matrix. `outside` is the no-purchase share (MNL,
/// NL); `visits` is set for MC only; `nest_shares` for NL only.
struct MarketShares {
  Vector d;
  std::optional<double> outside;
  Vector visits;
  Vector nest_shares;
};

inline Vector attribute_sums(const Matrix& x) { return x.rowwise().sum(); }

// ---------------------------------------------------------------------------
// Adjustment between raw and adjusted attribute units.

/// Adjusted instance plus the affine map x = beta .* y - alpha / K used to
/// build it.
struct Adjustment {
  MnlInstance instance;
  Matrix scale;   // beta
  Matrix offset;  // alpha_j / K broadcast over k
};

/// Substituting y = (x + alpha_j/K) / beta into sum_k margin_raw y - cost_raw
/// gives margins margin_raw / beta and cost cost_raw - (alpha_j/K) sum_k
/// margin_raw / beta, so adjusted and raw profits agree exactly.
inline Adjustment adjust(const RawAttributeModel& raw) {
  raw.validate();
  const auto J = raw.products();
  const auto K = raw.attributes();
  Adjustment out;
  out.scale = raw.beta;
  out.offset = Matrix(J, K);
  for (Eigen::Index j = 0; j < J; ++j) out.offset.row(j).setConstant(raw.alpha(j) / double(K));

  auto& inst = out.instance;
  inst.phi = raw.margin_raw.cwiseQuotient(raw.beta);
  inst.x_lower = raw.beta.cwiseProduct(raw.y_lower) - out.offset;
  inst.x_upper = raw.beta.cwiseProduct(raw.y_upper) - out.offset;
  inst.psi = Vector(J);
  for (Eigen::Index j = 0; j < J; ++j)
    inst.psi(j) = raw.cost_raw(j) - raw.alpha(j) / double(K) * inst.phi.row(j).sum();
  return out;
}

inline Matrix unadjust(const Matrix& x, const RawAttributeModel& raw) {
  const auto J = raw.products();
  const auto K = raw.attributes();
  detail::require_shape(x, J, K, "x");
  Matrix y(J, K);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index k = 0; k < K; ++k) {
      if (!(raw.beta(j, k) > 0.0))
        throw Error(ErrorCode::NonPositiveBeta, detail::at("beta", j, k) + " must be > 0");
      y(j, k) = (x(j, k) + raw.alpha(j) / double(K)) / raw.beta(j, k);
    }
  return y;
}

// ---------------------------------------------------------------------------
// Share evaluators. All are total over finite x except the MC solve.

inline MarketShares mnl_shares_from_sums(const Vector& sums) {
  const Vector a = -sums;
  const double log_denominator = detail::log1p_sum_exp(a);
  MarketShares out;
  out.d = (a.array() - log_denominator).exp().matrix();
  out.outside = std::exp(-log_denominator);
  return out;
}

inline MarketShares mnl_shares(const MnlInstance& inst, const Matrix& x) {
  detail::require_shape(x, inst.products(), inst.attributes(), "x");
  return mnl_shares_from_sums(attribute_sums(x));
}

/// Visits solve v_j = lambda_j + sum_i (1 - exp(-S_i)) rho_ij v_i; product j
/// then captures d_j = exp(-S_j) v_j.
inline MarketShares mc_shares_from_sums(const McInstance& inst, const Vector& sums) {
  const auto J = inst.products();
  Matrix system = Matrix::Identity(J, J);
  for (Eigen::Index i = 0; i < J; ++i) {
    const double pass_on = -std::expm1(-sums(i));
    for (Eigen::Index j = 0; j < J; ++j) system(j, i) -= pass_on * inst.rho(i, j);
  }
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem, "visit system is not uniquely solvable at this x");
  MarketShares out;
  out.visits = lu.solve(inst.lambda);
  out.d = Vector(J);
  for (Eigen::Index j = 0; j < J; ++j) out.d(j) = std::exp(-sums(j)) * out.visits(j);
  return out;
}

inline MarketShares mc_shares(const McInstance& inst, const Matrix& x) {
  detail::require_shape(x, inst.products(), inst.attributes(), "x");
  return mc_shares_from_sums(inst, attribute_sums(x));
}

inline MarketShares nl_shares_from_sums(const NlInstance& inst, const Vector& sums) {
  const auto I = static_cast<Eigen::Index>(inst.nests.size());
  Vector nest_log_weight(I);  // gamma_i * log W_i
  std::vector<Vector> log_w(inst.nests.size());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < I; ++i) {
    const auto& nest = inst.nests[std::size_t(i)];
    const auto n = static_cast<Eigen::Index>(nest.products.size());
    log_w[std::size_t(i)] = -sums.segment(r, n) / nest.gamma;
    nest_log_weight(i) = nest.gamma * detail::log_sum_exp(log_w[std::size_t(i)]);
    r += n;
  }
  const double log_denominator = detail::log1p_sum_exp(nest_log_weight);

  MarketShares out;
  out.d = Vector(sums.size());
  out.nest_shares = Vector(I);
  out.outside = std::exp(-log_denominator);
  r = 0;
  for (Eigen::Index i = 0; i < I; ++i) {
    const auto& lw = log_w[std::size_t(i)];
    const double gamma = inst.nests[std::size_t(i)].gamma;
    const double log_nest = nest_log_weight(i) - log_denominator;
    const double log_w_total = nest_log_weight(i) / gamma;
    for (Eigen::Index j = 0; j < lw.size(); ++j)
      out.d(r + j) = std::exp(log_nest + lw(j) - log_w_total);
    out.nest_shares(i) = std::exp(log_nest);
    r += lw.size();
  }
  return out;
}

inline MarketShares nl_shares(const NlInstance& inst, const Matrix& x) {
  detail::require_shape(x, inst.products(), inst.attributes(), "x");
  return nl_shares_from_sums(inst, attribute_sums(x));
}

inline MarketShares shares(const ChoiceInstance& inst, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> MarketShares {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MnlInstance>) return mnl_shares(m, x);
        else if constexpr (std::is_same_v<T, McInstance>) return mc_shares(m, x);
        else return nl_shares(m, x);
      },
      inst);
}

/// Per-product margin matrix phi, cost vector psi and box, uniform across the
/// three model types.
struct ProductView {
  Matrix phi;
  Vector psi;
  Matrix x_lower;
  Matrix x_upper;
};

inline ProductView product_view(const ChoiceInstance& inst) {
  return std::visit(
      [](const auto& m) -> ProductView {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NlInstance>)
          return {m.phi(), m.psi(), m.x_lower(), m.x_upper()};
        else
          return {m.phi, m.psi, m.x_lower, m.x_upper};
      },
      inst);
}

inline void validate(const ChoiceInstance& inst) {
  std::visit([](const auto& m) { m.validate(); }, inst);
}

inline double expected_profit(const ChoiceInstance& inst, const Matrix& x) {
  const ProductView view = product_view(inst);
  const MarketShares s = shares(inst, x);
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j)
    total += (view.phi.row(j).dot(x.row(j)) - view.psi(j)) * s.d(j);
  return total;
}

}  // namespace choiceopt

#endif  // CHOICEOPT_MODEL_HPP
