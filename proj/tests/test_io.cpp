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
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

namespace choiceopt {
namespace {

using io::Json;
using testing::Random;

std::string sample(const std::string& name) {
  std::ifstream in(std::string(CHOICEOPT_SAMPLES_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json minimal_mnl() {
  return Json::parse(R"({"schema_version": 1, "model": "mnl", "form": "adjusted",
                         "phi": [[1.0]], "psi": [0.0], "x_lower": [[0.0]], "x_upper": [[5.0]]})");
}

ErrorCode parse_error(const Json& doc, std::string* message = nullptr) {
  try {
    io::parse_instance(doc);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "parse succeeded";
  return ErrorCode::SchemaError;
}

TEST(ParseInstance, MinimalMnl) {
  const auto parsed = io::parse_instance(minimal_mnl());
  ASSERT_TRUE(std::holds_alternative<MnlInstance>(parsed.instance));
  const auto& m = std::get<MnlInstance>(parsed.instance);
  EXPECT_EQ(m.products(), 1);
  EXPECT_EQ(m.attributes(), 1);
  EXPECT_EQ(m.x_upper(0, 0), 5.0);
  EXPECT_EQ(parsed.resources.rows(), 0);
}

TEST(ParseInstance, NegativeMarginNamesField) {
  Json doc = minimal_mnl();
  doc["phi"][0][0] = -1.0;
  std::string msg;
  EXPECT_EQ(parse_error(doc, &msg), ErrorCode::InvariantError);
  EXPECT_NE(msg.find("phi[0][0]"), std::string::npos) << msg;
}

TEST(ParseInstance, MarkovChainNegativeLowerBound) {
  Json doc = minimal_mnl();
  doc["model"] = "mc";
  doc["lambda"] = {1.0};
  doc["rho"] = {{0.0}};
  doc["x_lower"][0][0] = -0.5;
  std::string msg;
  EXPECT_EQ(parse_error(doc, &msg), ErrorCode::InvariantError);
  EXPECT_NE(msg.find("x_lower"), std::string::npos) << msg;
}

TEST(ParseInstance, UnknownFieldReportsPath) {
  Json doc = minimal_mnl();
  doc["extra"] = 1;
  std::string msg;
  EXPECT_EQ(parse_error(doc, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("$.extra"), std::string::npos) << msg;
}

TEST(ParseInstance, WrongShapeReportsPath) {
  Json doc = minimal_mnl();
  doc["x_upper"] = {{5.0, 6.0}};
  std::string msg;
  EXPECT_EQ(parse_error(doc, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("$.x_upper"), std::string::npos) << msg;
  doc = minimal_mnl();
  doc["psi"] = "zero";
  EXPECT_EQ(parse_error(doc, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("$.psi"), std::string::npos) << msg;
}

TEST(ParseInstance, RejectsOtherSchemaVersions) {
  Json doc = minimal_mnl();
  doc["schema_version"] = 2;
  EXPECT_EQ(parse_error(doc), ErrorCode::SchemaError);
  EXPECT_THROW(io::parse_instance(std::string("{not json")), Error);
}

TEST(ParseInstance, RawFormIsAdjusted) {
  const auto parsed = io::parse_instance(sample("mnl_raw.json"));
  ASSERT_TRUE(parsed.raw);
  const auto& m = std::get<MnlInstance>(parsed.instance);
  const auto expected = adjust(*parsed.raw).instance;
  EXPECT_EQ(m.phi, expected.phi);
  EXPECT_EQ(m.psi, expected.psi);
  EXPECT_EQ(m.x_lower, expected.x_lower);
}

TEST(ParseInstance, SharedAttributeIsSplit) {
  const auto parsed = io::parse_instance(sample("nl_shared_attribute.json"));
  const auto& nl = std::get<NlInstance>(parsed.instance);
  ASSERT_EQ(nl.nests.size(), 2u);
  EXPECT_EQ(nl.K, 3);  // two products with one private attribute each, plus the shared one
  EXPECT_EQ(parsed.shared_attribute, 1);
  const Matrix phi = product_view(nl).phi;
  EXPECT_EQ(phi(0, 2), phi(1, 2));
  EXPECT_EQ(phi(0, 2), 0.8);
  EXPECT_EQ(phi(2, 2), 1.2);
}

TEST(ParseInstance, ResourcesAreRead) {
  const auto parsed = io::parse_instance(sample("mnl_resource_infeasible.json"));
  ASSERT_EQ(parsed.resources.rows(), 1);
  EXPECT_EQ(parsed.resources.gamma_rhs(0), 0.99);
}

TEST(Canonical, SortedKeysAndFullPrecision) {
  const Json doc{{"b", 0.1}, {"a", 3.0}, {"c", std::nan("")}};
  EXPECT_EQ(io::dump_canonical(doc), "{\"a\":3.0,\"b\":0.10000000000000001,\"c\":null}\n");
}

TEST(Canonical, SolutionFilesRoundTrip) {
  Random r(70);
  for (int model = 0; model < 3; ++model) {
    for (int t = 0; t < 10; ++t) {
      io::ParsedInstance parsed;
      parsed.form = "adjusted";
      if (model == 0) parsed.model = "mnl", parsed.instance = testing::random_mnl(r, r.integer(1, 3), r.integer(1, 2));
      else if (model == 1) parsed.model = "mc", parsed.instance = testing::random_mc(r, r.integer(1, 3), r.integer(1, 2));
      else parsed.model = "nl", parsed.instance = testing::random_nl(r);

      const std::string instance_text = io::dump_canonical(io::adjusted_instance_json(parsed));
      const auto reread = io::parse_instance(instance_text);
      EXPECT_EQ(io::dump_canonical(io::adjusted_instance_json(reread)), instance_text);

      const auto cfg = recovery_config();
      const auto result = run_pipeline(reread.instance, reread.resources, cfg);
      const std::string text = io::dump_canonical(io::to_json(io::make_solution(reread, result, cfg)));
      const auto sol = io::parse_solution(text);
      EXPECT_EQ(io::dump_canonical(io::to_json(sol)), text);
      ASSERT_TRUE(sol.recovered);
      EXPECT_EQ(sol.recovered->x, result.recovered->x);
      EXPECT_TRUE(io::verify_solution(reread, sol).passes());
    }
  }
}

TEST(Verify, DetectsTamperedAttributes) {
  const auto parsed = io::parse_instance(minimal_mnl());
  const auto cfg = recovery_config();
  auto sol = io::make_solution(parsed, run_pipeline(parsed.instance, parsed.resources, cfg), cfg);
  ASSERT_TRUE(io::verify_solution(parsed, sol).passes());
  sol.recovered->x(0, 0) += 0.1;
  const auto report = io::verify_solution(parsed, sol);
  EXPECT_FALSE(report.passes());
  EXPECT_GT(report.share_residual, 1e-3);
}

TEST(Verify, RejectsMismatchedModel) {
  const auto parsed = io::parse_instance(minimal_mnl());
  const auto cfg = recovery_config();
  auto sol = io::make_solution(parsed, run_pipeline(parsed.instance, parsed.resources, cfg), cfg);
  sol.model = "mc";
  EXPECT_THROW(io::verify_solution(parsed, sol), Error);
}

}  // namespace
}  // namespace choiceopt
