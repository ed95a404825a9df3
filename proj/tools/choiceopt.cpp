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

// choiceopt: solve, verify, oracle, adjust, dual.
//
// Exit codes: 0 success, 1 verification or oracle mismatch, 2 infeasible,
// 3 unbounded, 4 input error, 5 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "choiceopt/choiceopt.hpp"

namespace {

using choiceopt::Error;
using choiceopt::ErrorCode;
using choiceopt::SolveStatus;
namespace io = choiceopt::io;

enum Exit { kOk = 0, kMismatch = 1, kInfeasible = 2, kUnbounded = 3, kInputError = 4, kNumerical = 5 };

struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFailure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const io::Json& doc, const std::string& out_path) {
  const std::string text = io::dump_canonical(doc);
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputFailure("cannot write " + out_path);
  out << text;
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    case SolveStatus::Unbounded: return kUnbounded;
    default: return kNumerical;
  }
}

int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NumericalFailure:
    case ErrorCode::NotOptimal:
    case ErrorCode::DegenerateShare:
    case ErrorCode::S3Infeasible:
    case ErrorCode::ConstructionFailed: return kNumerical;
    default: return kInputError;
  }
}

choiceopt::SolverConfig solver_config(double tol, int max_iter) {
  auto cfg = choiceopt::recovery_config();
  if (tol > 0) cfg.tol_gap = cfg.tol_feas = tol;
  if (max_iter > 0) cfg.max_iter = max_iter;
  cfg.validate();
  return cfg;
}

int run_solve(const std::string& instance_path, double tol, int max_iter, const std::string& out_path) {
  const auto parsed = io::parse_instance(read_file(instance_path));
  const auto cfg = solver_config(tol, max_iter);
  const auto result = choiceopt::run_pipeline(parsed.instance, parsed.resources, cfg);
  emit(io::to_json(io::make_solution(parsed, result, cfg)), out_path);
  std::cerr << "status " << choiceopt::to_string(result.solution.status) << ", iterations "
            << result.solution.iterations << "\n";
  return exit_for(result.solution.status);
}

int run_verify(const std::string& instance_path, const std::string& solution_path) {
  const auto parsed = io::parse_instance(read_file(instance_path));
  const auto sol = io::parse_solution(read_file(solution_path));
  if (sol.status != SolveStatus::Optimal) {
    std::cerr << "solution status is " << choiceopt::to_string(sol.status) << "; nothing to verify\n";
    return sol.status == SolveStatus::Optimal ? kOk : exit_for(sol.status);
  }
  const auto report = io::verify_solution(parsed, sol);
  std::cout << io::dump_canonical(io::to_json(report));
  if (!report.passes()) {
    std::cerr << "verification failed: share residual " << report.share_residual << ", tightness residual "
              << report.tightness_residual << ", box violation " << report.box_violation
              << ", objective mismatch " << report.objective_mismatch << "\n";
    return kMismatch;
  }
  return kOk;
}

int run_oracle(const std::string& instance_path, int points, int refine, double tol) {
  const auto parsed = io::parse_instance(read_file(instance_path));
  const auto cfg = solver_config(tol, 0);
  const choiceopt::GridSpec grid{points, refine};
  const auto rep = choiceopt::compare(parsed.instance, cfg, grid, parsed.resources);
  io::Json doc{{"solver_status", choiceopt::to_string(rep.solver_status)},
               {"solver_infeasible", rep.solver_infeasible},
               {"oracle_infeasible", rep.oracle_infeasible},
               {"solver_objective", rep.solver_objective},
               {"oracle_objective", rep.oracle_objective},
               {"objective_difference", rep.objective_difference},
               {"x_difference", rep.x_difference},
               {"tolerance", rep.tolerance},
               {"lipschitz_slack", rep.lipschitz_slack},
               {"passes", rep.passes}};
  if (rep.solver_x.size()) doc["solver_x"] = io::to_json(rep.solver_x);
  if (rep.oracle_x.size()) doc["oracle_x"] = io::to_json(rep.oracle_x);
  std::cout << io::dump_canonical(doc);
  return rep.passes ? kOk : kMismatch;
}

int run_adjust(const std::string& instance_path, const std::string& out_path) {
  const auto parsed = io::parse_instance(read_file(instance_path));
  emit(io::adjusted_instance_json(parsed), out_path);
  return kOk;
}

int run_dual(const std::string& instance_path) {
  const auto parsed = io::parse_instance(read_file(instance_path));
  const auto dual = choiceopt::dualize(parsed.instance, parsed.resources);
  const auto point = choiceopt::strict_dual_point(parsed.instance, parsed.resources);
  io::Json roles = io::Json::object();
  for (const auto& [role, vars] : dual.variables.roles()) roles[role] = vars.size();
  io::Json doc{{"variables", dual.n_vars},
               {"equality_multipliers", dual.n_eq},
               {"inequality_multipliers", dual.n_in},
               {"cones", dual.n_cone},
               {"stationarity_rows", dual.equalities.size()},
               {"roles", roles},
               {"strict_point",
                {{"interior_margin", point.interior_margin},
                 {"row_residual", point.row_residual},
                 {"parameter", point.parameter},
                 {"dual_objective", choiceopt::dual_value(dual, point.values)}}}};
  std::cout << io::dump_canonical(doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute optimization under MNL, Markov chain and nested logit choice models"};
  app.require_subcommand(1);

  std::string instance, solution, out;
  double tol = 0;
  int max_iter = 0, points = 201, refine = 3;

  auto* solve = app.add_subcommand("solve", "Solve an instance and write a solution file");
  solve->add_option("instance", instance, "Instance JSON")->required();
  solve->add_option("--tol", tol, "Gap and feasibility tolerance (default 1e-10)")->check(CLI::PositiveNumber);
  solve->add_option("--max-iter", max_iter, "Iteration limit (default 200)")->check(CLI::PositiveNumber);
  solve->add_option("--out", out, "Solution file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Re-check a solution file against its instance");
  verify->add_option("instance", instance, "Instance JSON")->required();
  verify->add_option("solution", solution, "Solution JSON")->required();

  auto* oracle = app.add_subcommand("oracle", "Compare the solver with a lattice search");
  oracle->add_option("instance", instance, "Instance JSON")->required();
  oracle->add_option("--grid", points, "Points per dimension")->check(CLI::Range(2, 100000000));
  oracle->add_option("--refine", refine, "Refinement rounds")->check(CLI::NonNegativeNumber);
  oracle->add_option("--tol", tol, "Solver tolerance (default 1e-10)")->check(CLI::PositiveNumber);

  auto* adjust = app.add_subcommand("adjust", "Write the adjusted form of an instance");
  adjust->add_option("instance", instance, "Instance JSON")->required();
  adjust->add_option("--out", out, "Output file (default stdout)");

  auto* dual = app.add_subcommand("dual", "Summarize the dual program and its strict interior point");
  dual->add_option("instance", instance, "Instance JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return run_solve(instance, tol, max_iter, out);
    if (*verify) return run_verify(instance, solution);
    if (*oracle) return run_oracle(instance, points, refine, tol);
    if (*adjust) return run_adjust(instance, out);
    if (*dual) return run_dual(instance);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const InputFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
