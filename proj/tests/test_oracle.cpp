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

using testing::Random;

MnlInstance box_mnl(Index K, double lo, double hi) {
  return {Matrix::Ones(1, K), Vector::Zero(1), Matrix::Constant(1, K, lo), Matrix::Constant(1, K, hi)};
}

double one_product_profit(double x) { return x * std::exp(-x) / (1.0 + std::exp(-x)); }

TEST(GridSearch, SingletonBox) {
  const auto res = grid_search(box_mnl(1, 1, 1), GridSpec{});
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(res.best_x(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(res.best_objective, one_product_profit(1.0));
}

TEST(GridSearch, EqualMarginsFillLowerAttributeFirst) {
  const auto res = grid_search(box_mnl(2, 0, 5), GridSpec{});
  ASSERT_TRUE(res.feasible);
  const double s = res.best_x.sum();
  EXPECT_GT(s, 1.0);
  EXPECT_LT(s, 5.0);
  EXPECT_EQ(res.best_x(0, 1), 0.0);
}

TEST(GridSearch, FineGridMatchesGoldenSection) {
  const auto res = grid_search(box_mnl(1, 0, 5), GridSpec{5001, 3});
  const double best = testing::golden_section_max(one_product_profit, 0.0, 5.0);
  EXPECT_NEAR(res.best_objective, best, 1e-9);
  EXPECT_LE(res.best_objective, best + 1e-15);
}

TEST(GridSearch, RejectsTooManyDimensions) {
  Random r(60);
  try {
    grid_search(testing::random_mnl(r, 7, 1), GridSpec{});
    FAIL() << "expected TooManyDims";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyDims);
  }
  try {
    grid_search(testing::random_mnl(r, 5, 1), GridSpec{201, 3});
    FAIL() << "expected TooManyDims";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyDims);
  }
}

TEST(GridSearch, RejectsInvalidGrid) {
  EXPECT_THROW(grid_search(box_mnl(1, 0, 5), GridSpec{1, 3}), Error);
  EXPECT_THROW(grid_search(box_mnl(1, 0, 5), GridSpec{11, -1}), Error);
}

TEST(GridSearch, FittedGridRespectsBudget) {
  for (Index dims = 1; dims <= kOracleMaxDims; ++dims) {
    const GridSpec g = GridSpec::fitted(dims, 2e6);
    EXPECT_LE(std::pow(double(g.points_per_dim), double(dims)), 2e6 * (1 + 1e-12));
    EXPECT_GE(g.points_per_dim, 2);
  }
}

TEST(GridSearch, ResourceRowsFilterLattice) {
  const ResourceConstraints rc{Matrix::Ones(1, 1), Vector::Constant(1, 0.99)};
  EXPECT_FALSE(grid_search(box_mnl(1, 1, 5), GridSpec{}, rc).feasible);
  const ResourceConstraints floor{Matrix::Ones(1, 1), Vector::Constant(1, 0.2)};
  const auto res = grid_search(box_mnl(1, 0, 5), GridSpec{}, floor);
  ASSERT_TRUE(res.feasible);
  EXPECT_GE(shares(ChoiceInstance{box_mnl(1, 0, 5)}, res.best_x).d(0), 0.2);
}

TEST(Compare, ResourceInfeasibleOnBothSides) {
  const ResourceConstraints rc{Matrix::Ones(1, 1), Vector::Constant(1, 0.99)};
  const auto rep = compare(box_mnl(1, 1, 5), recovery_config(), GridSpec{}, rc);
  EXPECT_TRUE(rep.solver_infeasible);
  EXPECT_TRUE(rep.oracle_infeasible);
  EXPECT_TRUE(rep.passes);
}

TEST(Compare, TwoProductMnl) {
  Random r(61);
  for (int t = 0; t < 10; ++t) {
    const auto rep = compare(testing::random_mnl(r, 2, 1), recovery_config(), GridSpec{});
    EXPECT_TRUE(rep.passes) << rep.objective_difference;
    EXPECT_LE(std::abs(rep.objective_difference), 1e-3 * (1.0 + std::abs(rep.solver_objective)));
  }
}

// The lattice never beats the global optimum, and the solver is within the
// Lipschitz slack of the final lattice spacing.
TEST(OracleProperties, BracketsSolver) {
  Random r(62);
  for (int model = 0; model < 3; ++model) {
    for (int t = 0; t < 10; ++t) {
      ChoiceInstance inst;
      if (model == 0) inst = testing::random_mnl(r, r.integer(1, 3), r.integer(1, 2));
      else if (model == 1) inst = testing::random_mc(r, r.integer(1, 3), r.integer(1, 2));
      else inst = testing::random_nl(r);
      const Index dims = product_view(inst).phi.rows();
      const auto rep = compare(inst, recovery_config(), GridSpec::fitted(dims, 2e6));
      ASSERT_FALSE(rep.solver_infeasible || rep.oracle_infeasible);
      EXPECT_LE(rep.oracle_objective, rep.solver_objective + 1e-6);
      EXPECT_LE(rep.solver_objective, rep.oracle_objective + rep.lipschitz_slack);
      EXPECT_TRUE(rep.passes);
    }
  }
}

TEST(OracleProperties, LipschitzBoundDominatesGradient) {
  Random r(63);
  for (int t = 0; t < 20; ++t) {
    const ChoiceInstance inst = testing::random_mnl(r, r.integer(1, 3), 1);
    const double L = lipschitz_bound(inst);
    const Matrix x = testing::random_point(r, inst);
    const ProductView view = product_view(inst);
    for (Index j = 0; j < x.rows(); ++j) {
      Matrix xp = x, xm = x;
      const double h = 1e-6;
      xp(j, 0) += h;
      xm(j, 0) -= h;
      const double g = (expected_profit(inst, xp) - expected_profit(inst, xm)) / (2 * h);
      EXPECT_LE(std::abs(g), L * (1 + 1e-6)) << view.phi;
    }
  }
}

}  // namespace
}  // namespace choiceopt
