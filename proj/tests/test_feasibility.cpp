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

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace choiceopt {
namespace {

using Kind = S2Classification::Kind;
using testing::Random;

Matrix swap2() {
  Matrix rho(2, 2);
  rho << 0, 1, 1, 0;
  return rho;
}

TEST(S2Classify, IdentitySystemIsUnique) {
  Vector lambda(2);
  lambda << 0.3, 0.7;
  const auto c = s2_classify(lambda, Matrix::Zero(2, 2));
  EXPECT_EQ(c.kind, Kind::Unique);
  EXPECT_TRUE(c.strictly_positive);
  EXPECT_LE((c.visits - lambda).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(S2Classify, SingularConsistentSystem) {
  EXPECT_EQ(s2_classify(Vector::Zero(2), swap2()).kind, Kind::InfinitelyMany);
}

TEST(S2Classify, SingularInconsistentSystem) {
  Vector lambda(2);
  lambda << 1, 0;
  EXPECT_EQ(s2_classify(lambda, swap2()).kind, Kind::NoSolution);
}

TEST(S2Classify, ZeroTransitionsAlwaysUnique) {
  Random r(10);
  for (int t = 0; t < 50; ++t) {
    const Index J = r.integer(1, 6);
    Vector lambda(J);
    for (Index j = 0; j < J; ++j) lambda(j) = r.uniform(0, 1);
    const auto c = s2_classify(lambda, Matrix::Zero(J, J));
    EXPECT_EQ(c.kind, Kind::Unique);
    EXPECT_LE((c.visits - lambda).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(S2Classify, UniqueSolutionResidual) {
  Random r(11);
  for (int t = 0; t < 50; ++t) {
    const McInstance m = testing::random_mc(r, r.integer(1, 5), 1);
    const auto c = s2_classify(m.lambda, m.rho);
    ASSERT_EQ(c.kind, Kind::Unique);
    const Vector res = (Matrix::Identity(m.products(), m.products()) - m.rho.transpose()) * c.visits - m.lambda;
    EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + m.lambda.cwiseAbs().maxCoeff()));
  }
}

TEST(S2Classify, UniqueBaseSystemKeepsPerturbedSystemSolvable) {
  Random r(12);
  for (int t = 0; t < 100; ++t) {
    const McInstance m = testing::random_mc(r, r.integer(1, 5), r.integer(1, 2));
    ASSERT_TRUE(s2_classify(m.lambda, m.rho).unique_positive());
    const auto s = mc_shares(m, testing::random_point(r, m));
    EXPECT_TRUE(s.visits.allFinite());
    EXPECT_TRUE((s.visits.array() > 0).all());
  }
}

TEST(DefaultPoint, MnlLowerBounds) {
  MnlInstance m{Matrix::Ones(1, 1), Vector::Zero(1), Matrix::Zero(1, 1), Matrix::Constant(1, 1, 5)};
  const auto p = default_point(m);
  EXPECT_EQ(p.x(0, 0), 0.0);
  EXPECT_NEAR(p.shares.d(0), 0.5, 1e-15);
}

TEST(DefaultPoint, SingletonNest) {
  MnlInstance m{Matrix::Ones(1, 1), Vector::Zero(1), Matrix::Zero(1, 1), Matrix::Constant(1, 1, 5)};
  const auto p = default_point(testing::as_singleton_nests(m));
  EXPECT_EQ(p.x(0, 0), 0.0);
  EXPECT_NEAR(p.shares.d(0), 0.5, 1e-15);
}

TEST(DefaultPoint, MarkovChain) {
  McInstance m{Matrix::Ones(1, 1), Vector::Zero(1), Matrix::Zero(1, 1), Matrix::Constant(1, 1, 5),
               Vector::Ones(1), Matrix::Zero(1, 1)};
  const auto p = default_point(m);
  EXPECT_NEAR(p.shares.d(0), 1.0, 1e-15);
  EXPECT_NEAR(p.shares.visits(0), 1.0, 1e-15);
}

TEST(DefaultPoint, DegenerateBaseSystem) {
  McInstance m{Matrix::Ones(2, 1), Vector::Zero(2), Matrix::Zero(2, 1), Matrix::Ones(2, 1), Vector::Zero(2), swap2()};
  try {
    default_point(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::McBaseSystemDegenerate);
  }
}

TEST(A3Validate, EqualMarginsPass) {
  Matrix m(2, 2);
  m << 1, 2, 1, 2;
  const auto rep = a3_validate({m});
  ASSERT_TRUE(rep.passes);
  EXPECT_EQ(rep.rho_shared[0], (Vector(2) << 1, 2).finished());
}

TEST(A3Validate, DifferentMarginsFail) {
  Matrix m(2, 2);
  m << 1, 2, 1, 3;
  const auto rep = a3_validate({m});
  EXPECT_FALSE(rep.passes);
  ASSERT_EQ(rep.offending.size(), 1u);
  EXPECT_EQ(rep.offending[0].first, 0u);
  EXPECT_EQ(rep.offending[0].second, 1);
}

TEST(A3Validate, ZeroMarginFails) {
  Matrix m(1, 2);
  m << 0, 2;
  EXPECT_FALSE(a3_validate({m}).passes);
}

ProductSpec product(Vector phi, Vector lo, Vector hi, double psi = 0.1) { return {psi, phi, lo, hi}; }

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

TEST(SplitAttributes, TwoProductsGiveThreeColumns) {
  NestSpec nest{0.5, {product(v2(1.0, 0.8), v2(1, -10), v2(2, 10)), product(v2(0.6, 0.8), v2(0, -10), v2(3, 10))}};
  const NlInstance nl = split_attributes({nest}, 1);
  EXPECT_EQ(nl.K, 3);
  const auto& p1 = nl.nests[0].products[0];
  const auto& p2 = nl.nests[0].products[1];
  EXPECT_EQ(p1.x_lower(0), 1.0);
  EXPECT_EQ(p1.x_upper(0), 2.0);
  EXPECT_EQ(p2.x_lower(0), 0.0);
  EXPECT_EQ(p2.x_upper(0), 0.0);
  EXPECT_EQ(p2.x_upper(1), 3.0);
  EXPECT_EQ(nl.nests[0].rho_shared(2), 0.8);
  EXPECT_EQ(nl.nests[0].owner[2], kSharedAttribute);
}

TEST(SplitAttributes, SingleProductKeepsAttributeCount) {
  NestSpec nest{1.0, {product(v2(1.5, 0.8), v2(0, -10), v2(2, 10))}};
  const NlInstance nl = split_attributes({nest}, 0);
  EXPECT_EQ(nl.K, 2);
  EXPECT_EQ(nl.nests[0].rho_shared(0), 0.8);
  EXPECT_EQ(nl.nests[0].rho_shared(1), 1.5);
}

TEST(SplitAttributes, SharedMarginMustAgree) {
  NestSpec nest{0.5, {product(v2(1.0, 0.8), v2(0, -10), v2(2, 10)), product(v2(1.0, 0.9), v2(0, -10), v2(2, 10))}};
  try {
    split_attributes({nest}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSharedAttribute);
  }
}

TEST(SplitAttributes, OutputSatisfiesMarginStructure) {
  Random r(13);
  for (int t = 0; t < 50; ++t) {
    const NlInstance nl = testing::random_nl(r);
    std::vector<Matrix> margins;
    for (const auto& nest : nl.nests) {
      Matrix m(Index(nest.products.size()), nl.K);
      for (Index j = 0; j < m.rows(); ++j) m.row(j) = nest.rho_shared.transpose();
      margins.push_back(m);
    }
    EXPECT_TRUE(a3_validate(margins).passes);
  }
}

// Original-space objective of one nest with per-product margins: shares from
// the nested logit formula, attribute sums allocated greedily by margin.
struct OriginalNest {
  double gamma;
  std::vector<ProductSpec> products;

  double best_margin(std::size_t j, double s) const {
    const auto& p = products[j];
    const Index K = p.phi.size();
    std::vector<Index> order(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) order[std::size_t(k)] = k;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return p.phi(a) > p.phi(b); });
    double rest = s - p.x_lower.sum(), value = p.phi.dot(p.x_lower) - p.psi;
    for (Index k : order) {
      const double add = std::min(std::max(rest, 0.0), p.x_upper(k) - p.x_lower(k));
      value += p.phi(k) * add;
      rest -= add;
    }
    return value;
  }

  double profit(const std::vector<double>& sums) const {
    double W = 0.0;
    for (double s : sums) W += std::exp(-s / gamma);
    const double nest = std::pow(W, gamma) / (1.0 + std::pow(W, gamma));
    double out = 0.0;
    for (std::size_t j = 0; j < sums.size(); ++j) out += best_margin(j, sums[j]) * nest * std::exp(-sums[j] / gamma) / W;
    return out;
  }
};

double original_space_optimum(const OriginalNest& nest) {
  const std::size_t n = nest.products.size();
  std::vector<double> lo(n), hi(n), best(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = nest.products[j].x_lower.sum();
    hi[j] = nest.products[j].x_upper.sum();
  }
  double best_value = -1e300;
  const int points = 401;
  for (int round = 0; round < 8; ++round) {
    std::vector<int> idx(n, 0);
    std::vector<double> s(n);
    for (;;) {
      for (std::size_t j = 0; j < n; ++j) s[j] = lo[j] + (hi[j] - lo[j]) * idx[j] / (points - 1);
      const double v = nest.profit(s);
      if (v > best_value) {
        best_value = v;
        best = s;
      }
      std::size_t j = 0;
      while (j < n && ++idx[j] == points) idx[j++] = 0;
      if (j == n) break;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double half = 4.0 * (hi[j] - lo[j]) / (points - 1);
      const double l0 = nest.products[j].x_lower.sum(), h0 = nest.products[j].x_upper.sum();
      lo[j] = std::max(l0, best[j] - half);
      hi[j] = std::min(h0, best[j] + half);
    }
  }
  return best_value;
}

TEST(SplitAttributes, SolvedSplitMatchesOriginalSpaceSearch) {
  Random r(14);
  for (int t = 0; t < 12; ++t) {
    const Index J = 1 + t % 2, K_raw = 1 + (t / 2) % 2;
    OriginalNest nest{testing::kGammas[t % 3], {}};
    const double shared = r.uniform(0.1, 2.0);
    for (Index j = 0; j < J; ++j) {
      ProductSpec p{r.uniform(0, 1), Vector(K_raw), Vector(K_raw), Vector(K_raw)};
      for (Index k = 0; k + 1 < K_raw; ++k) {
        p.phi(k) = r.uniform(0.1, 2.0);
        std::tie(p.x_lower(k), p.x_upper(k)) = r.box(0, 5);
      }
      p.phi(K_raw - 1) = shared;
      p.x_lower(K_raw - 1) = -10;
      p.x_upper(K_raw - 1) = 10;
      nest.products.push_back(p);
    }
    const NlInstance nl = split_attributes({NestSpec{nest.gamma, nest.products}}, K_raw - 1);
    const auto result = run_pipeline(nl);
    ASSERT_TRUE(result.recovered) << "instance " << t;
    EXPECT_NEAR(result.recovered->objective, original_space_optimum(nest), 1e-6) << "instance " << t;
  }
}

}  // namespace
}  // namespace choiceopt
