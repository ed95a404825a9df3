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

#include "support.hpp"

namespace choiceopt {
namespace {

using testing::Random;

MnlInstance unit_mnl(Index J, Index K) {
  return {Matrix::Ones(J, K), Vector::Zero(J), Matrix::Zero(J, K), Matrix::Constant(J, K, 5.0)};
}

double coefficient(const LinearExpr& e, Index var) {
  double out = 0.0;
  for (const auto& t : e.terms)
    if (t.var == var) out += t.coef;
  return out;
}

TEST(BuildMnl, CountsTwoProductsOneAttribute) {
  const auto prog = build_mnl(unit_mnl(2, 1));
  EXPECT_EQ(prog.n_vars, 5);
  EXPECT_EQ(prog.cones.size(), 4u);
  EXPECT_EQ(prog.equalities.size(), 1u);
  EXPECT_EQ(prog.inequalities.size(), 4u);
}

TEST(BuildMnl, CountsOneProductThreeAttributes) {
  const auto prog = build_mnl(unit_mnl(1, 3));
  EXPECT_EQ(prog.n_vars, 5);
  EXPECT_EQ(prog.cones.size(), 2u);
  EXPECT_EQ(prog.inequalities.size(), 6u);
}

TEST(BuildMnl, AttributeVariableCarriesMargin) {
  MnlInstance m = unit_mnl(2, 2);
  m.phi(0, 0) = 1.7;
  const auto prog = build_mnl(m);
  EXPECT_EQ(prog.objective(prog.variables["u"][0]), 1.7);
}

McInstance unit_mc(Index J, Index K) {
  return {Matrix::Ones(J, K), Vector::Zero(J), Matrix::Zero(J, K), Matrix::Constant(J, K, 5.0),
          Vector::Constant(J, 0.5), Matrix::Zero(J, J)};
}

TEST(BuildMc, CountsSingleProduct) {
  const auto prog = build_mc(unit_mc(1, 1));
  EXPECT_EQ(prog.n_vars, 3);
  EXPECT_EQ(prog.equalities.size(), 1u);
  EXPECT_EQ(prog.cones.size(), 2u);
  EXPECT_EQ(prog.inequalities.size(), 2u);
}

TEST(BuildMc, NoTransitionsGiveArrivalRows) {
  const auto prog = build_mc(unit_mc(2, 1));
  for (Index j = 0; j < 2; ++j) {
    const auto& row = prog.equalities[std::size_t(j)];
    ASSERT_EQ(row.lhs.terms.size(), 1u);
    EXPECT_EQ(row.lhs.terms[0].var, prog.variables["v"][std::size_t(j)]);
    EXPECT_EQ(row.lhs.terms[0].coef, 1.0);
    EXPECT_EQ(row.rhs, 0.5);
  }
}

TEST(BuildMc, CountsTwoProductsTwoAttributes) {
  const auto prog = build_mc(unit_mc(2, 2));
  EXPECT_EQ(prog.n_vars, 8);
  EXPECT_EQ(prog.equalities.size(), 2u);
  EXPECT_EQ(prog.cones.size(), 4u);
  EXPECT_EQ(prog.inequalities.size(), 8u);
}

TEST(BuildMc, RejectsDegenerateBaseSystem) {
  McInstance m = unit_mc(2, 1);
  m.rho << 0, 1, 1, 0;
  m.lambda.setZero();
  try {
    build_mc(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::McBaseSystemDegenerate);
  }
}

NlInstance nests_of(std::vector<Index> sizes, Index K, double gamma) {
  NlInstance nl;
  nl.K = K;
  for (Index size : sizes) {
    Nest nest;
    nest.gamma = gamma;
    nest.rho_shared = Vector::Ones(K);
    for (Index j = 0; j < size; ++j) nest.products.push_back({0.1, Vector::Zero(K), Vector::Constant(K, 3.0)});
    nl.nests.push_back(nest);
  }
  return nl;
}

TEST(BuildNl, CountsOneNestTwoProducts) {
  EXPECT_EQ(build_nl(nests_of({2}, 1, 0.5)).n_vars, 11);
  EXPECT_EQ(build_nl(nests_of({2}, 1, 1.0)).n_vars, 11);
}

TEST(BuildNl, UnitDissimilarityDropsNestTerm) {
  const auto prog = build_nl(nests_of({1, 1}, 1, 1.0));
  for (const auto& row : prog.equalities) {
    if (row.role != "w") continue;
    const Index i = row.index;
    EXPECT_EQ(coefficient(row.lhs, prog.variables["e"][std::size_t(i)]), 1.0);
    EXPECT_EQ(coefficient(row.lhs, prog.variables["g"][std::size_t(i)]), 0.0);
    EXPECT_EQ(coefficient(row.lhs, prog.variables["v"][std::size_t(i)]), -1.0);
  }
}

TEST(BuildNl, ConeCountsForSingletonNests) {
  EXPECT_EQ(build_nl(nests_of({1, 1}, 1, 0.5)).cones.size(), 8u);
  EXPECT_EQ(build_nl(nests_of({1, 1}, 1, 1.0)).cones.size(), 4u);
}

TEST(WithResources, EmptyRowsLeaveProgramUnchanged) {
  const auto prog = build_mnl(unit_mnl(2, 1));
  const auto same = with_resources(prog, {});
  EXPECT_EQ(same.inequalities.size(), prog.inequalities.size());
  EXPECT_EQ(same.n_vars, prog.n_vars);
}

TEST(WithResources, AppendsOneRow) {
  const auto prog = build_mnl(unit_mnl(2, 1));
  const ResourceConstraints rc{Matrix::Ones(1, 2), Vector::Constant(1, 0.5)};
  const auto out = with_resources(prog, rc);
  ASSERT_EQ(out.inequalities.size(), prog.inequalities.size() + 1);
  EXPECT_EQ(out.inequalities.back().rhs, -0.5);
  EXPECT_EQ(out.cones.size(), prog.cones.size());
}

TEST(WithResources, RejectsWrongColumnCount) {
  try {
    with_resources(build_mnl(unit_mnl(2, 1)), {Matrix::Ones(1, 3), Vector::Ones(1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(WithResources, ShareAboveOneIsInfeasible) {
  const auto prog = with_resources(build_mnl(unit_mnl(1, 1)), {Matrix::Ones(1, 1), Vector::Constant(1, 2.0)});
  EXPECT_EQ(solve(prog).status, SolveStatus::Infeasible);
}

void expect_lift_feasible(const ChoiceInstance& inst, Random& r) {
  const auto prog = build(inst);
  for (int t = 0; t < 100; ++t) {
    const Matrix x = testing::random_point(r, inst);
    const Vector w = lift(inst, prog, x);
    const auto res = residuals(prog, w);
    EXPECT_LE(res.equality, 1e-9);
    EXPECT_LE(res.inequality, 1e-9);
    EXPECT_LE(res.cone, 1e-9);
    EXPECT_NEAR(prog.objective.dot(w), expected_profit(inst, x), 1e-10);
  }
}

TEST(ReformProperties, FeasiblePointsMapIntoMnlProgram) {
  Random r(20);
  for (int t = 0; t < 5; ++t) expect_lift_feasible(testing::random_mnl(r, r.integer(1, 3), r.integer(1, 2)), r);
}

TEST(ReformProperties, FeasiblePointsMapIntoMcProgram) {
  Random r(21);
  for (int t = 0; t < 5; ++t) expect_lift_feasible(testing::random_mc(r, r.integer(1, 3), r.integer(1, 2)), r);
}

TEST(ReformProperties, FeasiblePointsMapIntoNlProgram) {
  Random r(22);
  for (int t = 0; t < 5; ++t) expect_lift_feasible(testing::random_nl(r), r);
}

TEST(ReformProperties, SingletonNestsMatchMnlOptimum) {
  Random r(23);
  for (int t = 0; t < 5; ++t) {
    const MnlInstance m = testing::random_mnl(r, r.integer(1, 3), r.integer(1, 2));
    const auto a = solve(build(m), recovery_config());
    const auto b = solve(build(testing::as_singleton_nests(m)), recovery_config());
    ASSERT_EQ(a.status, SolveStatus::Optimal);
    ASSERT_EQ(b.status, SolveStatus::Optimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-6);
  }
}

TEST(ReformProperties, VariableOrderIsDeterministic) {
  Random r(24);
  const NlInstance nl = testing::random_nl(r);
  const auto a = build(nl), b = build(nl);
  EXPECT_EQ(a.variables.roles(), b.variables.roles());
  EXPECT_EQ(a.objective, b.objective);
  a.validate();
}

}  // namespace
}  // namespace choiceopt
