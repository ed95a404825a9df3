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

// Random instance generators and small numeric oracles shared by the tests.

#ifndef CHOICEOPT_TESTS_SUPPORT_HPP
#define CHOICEOPT_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "choiceopt/choiceopt.hpp"

namespace choiceopt::testing {

class Random {
 public:
  explicit Random(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Ordered pair of points drawn from [lo, hi].
  std::pair<double, double> box(double lo, double hi) {
    const double a = uniform(lo, hi), b = uniform(lo, hi);
    return {std::min(a, b), std::max(a, b)};
  }

 private:
  std::mt19937 rng_;
};

/// phi in (0.1, 2], psi in [0, 1], boxes inside [0, 5].
inline MnlInstance random_mnl(Random& r, Index J, Index K) {
  MnlInstance m;
  m.phi = Matrix(J, K);
  m.psi = Vector(J);
  m.x_lower = Matrix(J, K);
  m.x_upper = Matrix(J, K);
  for (Index j = 0; j < J; ++j) {
    m.psi(j) = r.uniform(0.0, 1.0);
    for (Index k = 0; k < K; ++k) {
      m.phi(j, k) = 2.0 - r.uniform(0.0, 1.9);
      std::tie(m.x_lower(j, k), m.x_upper(j, k)) = r.box(0.0, 5.0);
    }
  }
  return m;
}

/// MNL data plus lambda in [0.1, 1] and a zero-diagonal rho scaled to
/// spectral radius <= 0.8.
inline McInstance random_mc(Random& r, Index J, Index K) {
  const MnlInstance base = random_mnl(r, J, K);
  McInstance m{base.phi, base.psi, base.x_lower, base.x_upper, Vector(J), Matrix::Zero(J, J)};
  for (Index j = 0; j < J; ++j) {
    m.lambda(j) = r.uniform(0.1, 1.0);
    for (Index i = 0; i < J; ++i)
      if (i != j) m.rho(j, i) = r.uniform(0.0, 1.0);
  }
  const double radius = J > 1 ? m.rho.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  if (radius > 0.0) m.rho *= r.uniform(0.0, 0.8) / radius;
  return m;
}

inline constexpr double kGammas[3] = {0.5, 0.8, 1.0};

/// Nested logit instance with conformant margins built the way attribute
/// splitting produces them: per nest, each product has `private_attrs`
/// product-specific attributes (margins in (0.1, 2], boxes inside [0, 5])
/// plus one shared attribute with a nest-wide margin and box [-10, 10].
inline NlInstance random_nl(Random& r, Index I, std::vector<Index> nest_sizes, Index private_attrs) {
  std::vector<NestSpec> specs;
  const Index K_raw = private_attrs + 1;
  for (Index i = 0; i < I; ++i) {
    NestSpec nest;
    nest.gamma = kGammas[r.integer(0, 2)];
    const double shared = 2.0 - r.uniform(0.0, 1.9);
    for (Index j = 0; j < nest_sizes[std::size_t(i)]; ++j) {
      ProductSpec p;
      p.psi = r.uniform(0.0, 1.0);
      p.phi = Vector(K_raw);
      p.x_lower = Vector(K_raw);
      p.x_upper = Vector(K_raw);
      for (Index k = 0; k < private_attrs; ++k) {
        p.phi(k) = 2.0 - r.uniform(0.0, 1.9);
        std::tie(p.x_lower(k), p.x_upper(k)) = r.box(0.0, 5.0);
      }
      p.phi(private_attrs) = shared;
      p.x_lower(private_attrs) = -10.0;
      p.x_upper(private_attrs) = 10.0;
      nest.products.push_back(p);
    }
    specs.push_back(nest);
  }
  return split_attributes(specs, private_attrs);
}

/// Random nest count in {1, 2}, nest sizes in {1, 2}, raw attribute count in {1, 2}.
inline NlInstance random_nl(Random& r) {
  const Index I = r.integer(1, 2);
  std::vector<Index> sizes;
  for (Index i = 0; i < I; ++i) sizes.push_back(r.integer(1, 2));
  return random_nl(r, I, sizes, r.integer(0, 1));
}

/// Singleton gamma = 1 nests with the margins and boxes of `m`.
inline NlInstance as_singleton_nests(const MnlInstance& m) {
  NlInstance nl;
  nl.K = m.attributes();
  for (Index j = 0; j < m.products(); ++j) {
    Nest nest;
    nest.gamma = 1.0;
    nest.rho_shared = m.phi.row(j).transpose();
    nest.products.push_back({m.psi(j), m.x_lower.row(j).transpose(), m.x_upper.row(j).transpose()});
    nl.nests.push_back(nest);
  }
  return nl;
}

/// Uniform random attribute matrix inside the instance box.
inline Matrix random_point(Random& r, const ChoiceInstance& inst) {
  const ProductView view = product_view(inst);
  Matrix x(view.phi.rows(), view.phi.cols());
  for (Index j = 0; j < x.rows(); ++j)
    for (Index k = 0; k < x.cols(); ++k) x(j, k) = r.uniform(view.x_lower(j, k), view.x_upper(j, k));
  return x;
}

/// Maximum of a unimodal function on [a, b].
inline double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

}  // namespace choiceopt::testing

#endif  // CHOICEOPT_TESTS_SUPPORT_HPP
