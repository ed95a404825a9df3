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

// JSON instance and solution files (schema_version 1).
//
// Instance file:
//   schema_version: 1
//   model: "mnl" | "mc" | "nl"
//   form: "adjusted" | "raw"
//   mnl/mc adjusted: phi[J][K], psi[J], x_lower[J][K], x_upper[J][K]
//   mnl/mc raw:      alpha[J], beta[J][K], margin_raw[J][K], cost_raw[J], y_lower[J][K], y_upper[J][K]
//   mc:              lambda[J], rho[J][J]
//   nl:              K, nests[{gamma, rho_shared[K]?, products[...]}], shared_attribute?
//     product (adjusted): psi, x_lower[K], x_upper[K], phi[K]?
//     product (raw):      alpha, beta[K], margin_raw[K], cost_raw, y_lower[K], y_upper[K]
//     Products carry their own phi when the nest has no rho_shared; with
//     shared_attribute set such nests are split into per-product columns.
//   resources (optional): Gamma[L][J], gamma_rhs[L]
//
// Unknown keys are rejected. Output is canonical: keys sorted, floats with
// 17 significant digits, non-finite values as null.

#ifndef CHOICEOPT_IO_HPP
#define CHOICEOPT_IO_HPP

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "choiceopt/error.hpp"
#include "choiceopt/feasibility.hpp"
#include "choiceopt/model.hpp"
#include "choiceopt/program.hpp"
#include "choiceopt/recover.hpp"
#include "choiceopt/solver.hpp"

namespace choiceopt::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Canonical writer.

namespace detail {

inline void write_canonical(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        write_canonical(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_canonical(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_canonical(const Json& j) {
  std::string out;
  detail::write_canonical(j, out);
  out += '\n';
  return out;
}

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

// ---------------------------------------------------------------------------
// Schema reader.

/// Typed access to a JSON value that reports failures as SchemaError with
/// the JSONPath of the offending field.
class Node {
 public:
  Node(const Json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& raw() const { return value_; }

  [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::SchemaError, path_ + ": " + what); }

  void require_object(std::initializer_list<const char*> required, std::initializer_list<const char*> optional) const {
    if (!value_.is_object()) fail("expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
      known.insert(k);
      if (!value_.contains(k)) Node(value_, path_ + "." + k).fail("required field missing");
    }
    for (const char* k : optional) known.insert(k);
    for (auto it = value_.begin(); it != value_.end(); ++it)
      if (!known.count(it.key())) Node(it.value(), path_ + "." + it.key()).fail("unknown field");
  }

  bool has(const char* key) const { return value_.contains(key); }
  Node operator[](const char* key) const { return {value_.at(key), path_ + "." + key}; }
  Node operator[](std::size_t i) const { return {value_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }

  Index integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<Index>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  std::string choice(std::initializer_list<const char*> options) const {
    const std::string s = string();
    for (const char* o : options)
      if (s == o) return s;
    std::string list;
    for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
    fail("expected one of " + list);
  }

  Vector vector(Index expected = -1) const {
    const auto n = static_cast<Index>(array_size());
    if (expected >= 0 && n != expected) fail("expected " + std::to_string(expected) + " entries, got " + std::to_string(n));
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = (*this)[std::size_t(i)].number();
    return v;
  }

  Matrix matrix(Index rows = -1, Index cols = -1) const {
    const auto r = static_cast<Index>(array_size());
    if (rows >= 0 && r != rows) fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
    if (r == 0) return Matrix(0, std::max<Index>(cols, 0));
    const Index c = cols >= 0 ? cols : static_cast<Index>((*this)[std::size_t(0)].array_size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) m.row(i) = (*this)[std::size_t(i)].vector(c).transpose();
    return m;
  }

 private:
  const Json& value_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Instances.

struct ParsedInstance {
  std::string model;  // "mnl" | "mc" | "nl"
  std::string form;   // "adjusted" | "raw"
  ChoiceInstance instance;
  ResourceConstraints resources;
  std::optional<RawAttributeModel> raw;    // mnl/mc raw form
  std::vector<RawAttributeModel> raw_nl;   // nl raw form, one J=1 model per product
  std::vector<NestSpec> nl_specs;          // nl per-product margins (adjusted)
  std::optional<Index> shared_attribute;   // nl split
  Index raw_attributes = 0;                // K before splitting
};

namespace detail {

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("$: invalid JSON: ") + e.what());
  }
}

inline void check_version(const Node& root) {
  if (root.raw().is_object() && root.has("schema_version") && root["schema_version"].integer() != kSchemaVersion)
    root["schema_version"].fail("unsupported schema version (expected 1)");
}

inline RawAttributeModel read_raw(const Node& n) {
  RawAttributeModel raw;
  raw.alpha = n["alpha"].vector();
  const Index J = raw.alpha.size();
  raw.beta = n["beta"].matrix(J);
  const Index K = raw.beta.cols();
  raw.margin_raw = n["margin_raw"].matrix(J, K);
  raw.cost_raw = n["cost_raw"].vector(J);
  raw.y_lower = n["y_lower"].matrix(J, K);
  raw.y_upper = n["y_upper"].matrix(J, K);
  return raw;
}

inline RawAttributeModel read_raw_product(const Node& n, Index K) {
  RawAttributeModel raw;
  raw.alpha = Vector::Constant(1, n["alpha"].number());
  raw.beta = n["beta"].vector(K).transpose();
  raw.margin_raw = n["margin_raw"].vector(K).transpose();
  raw.cost_raw = Vector::Constant(1, n["cost_raw"].number());
  raw.y_lower = n["y_lower"].vector(K).transpose();
  raw.y_upper = n["y_upper"].vector(K).transpose();
  return raw;
}

inline void parse_linear(const Node& root, ParsedInstance& out) {
  const bool mc = out.model == "mc";
  if (out.form == "raw") {
    if (mc)
      root.require_object({"schema_version", "model", "form", "alpha", "beta", "margin_raw", "cost_raw", "y_lower",
                           "y_upper", "lambda", "rho"},
                          {"resources"});
    else
      root.require_object({"schema_version", "model", "form", "alpha", "beta", "margin_raw", "cost_raw", "y_lower",
                           "y_upper"},
                          {"resources"});
  } else if (mc) {
    root.require_object({"schema_version", "model", "form", "phi", "psi", "x_lower", "x_upper", "lambda", "rho"},
                        {"resources"});
  } else {
    root.require_object({"schema_version", "model", "form", "phi", "psi", "x_lower", "x_upper"}, {"resources"});
  }

  MnlInstance base;
  if (out.form == "raw") {
    out.raw = read_raw(root);
    base = adjust(*out.raw).instance;
  } else {
    base.phi = root["phi"].matrix();
    const Index J = base.phi.rows(), K = base.phi.cols();
    base.psi = root["psi"].vector(J);
    base.x_lower = root["x_lower"].matrix(J, K);
    base.x_upper = root["x_upper"].matrix(J, K);
  }
  if (mc) {
    const Index J = base.phi.rows();
    McInstance inst{base.phi, base.psi, base.x_lower, base.x_upper, root["lambda"].vector(J), root["rho"].matrix(J, J)};
    out.instance = inst;
  } else {
    out.instance = base;
  }
}

inline void parse_nl(const Node& root, ParsedInstance& out) {
  root.require_object({"schema_version", "model", "form", "K", "nests"}, {"shared_attribute", "resources"});
  const Index K = root["K"].integer();
  if (K < 1) root["K"].fail("must be >= 1");
  out.raw_attributes = K;
  if (root.has("shared_attribute")) {
    out.shared_attribute = root["shared_attribute"].integer();
    if (*out.shared_attribute < 0 || *out.shared_attribute >= K) root["shared_attribute"].fail("out of range");
  }
  const bool raw = out.form == "raw";
  const Node nests = root["nests"];
  if (nests.array_size() == 0) nests.fail("at least one nest is required");

  bool per_product = raw;
  std::vector<NestSpec> specs;
  NlInstance shared_form;
  shared_form.K = K;
  for (std::size_t i = 0; i < nests.array_size(); ++i) {
    const Node nest = nests[i];
    nest.require_object({"gamma", "products"}, {"rho_shared"});
    NestSpec spec;
    spec.gamma = nest["gamma"].number();
    const bool has_shared = nest.has("rho_shared");
    if (raw && has_shared) nest["rho_shared"].fail("raw nests carry margins per product");
    if (i == 0) per_product = raw || !has_shared;
    else if (per_product == has_shared) nest.fail("all nests must use the same margin layout");
    Nest direct;
    direct.gamma = spec.gamma;
    if (has_shared) direct.rho_shared = nest["rho_shared"].vector(K);
    const Node products = nest["products"];
    for (std::size_t j = 0; j < products.array_size(); ++j) {
      const Node p = products[j];
      if (raw) {
        p.require_object({"alpha", "beta", "margin_raw", "cost_raw", "y_lower", "y_upper"}, {});
        out.raw_nl.push_back(read_raw_product(p, K));
        const MnlInstance adj = adjust(out.raw_nl.back()).instance;
        spec.products.push_back({adj.psi(0), adj.phi.row(0).transpose(), adj.x_lower.row(0).transpose(),
                                 adj.x_upper.row(0).transpose()});
        continue;
      }
      if (has_shared) p.require_object({"psi", "x_lower", "x_upper"}, {});
      else p.require_object({"psi", "phi", "x_lower", "x_upper"}, {});
      ProductSpec ps;
      ps.psi = p["psi"].number();
      ps.phi = has_shared ? direct.rho_shared : p["phi"].vector(K);
      ps.x_lower = p["x_lower"].vector(K);
      ps.x_upper = p["x_upper"].vector(K);
      direct.products.push_back({ps.psi, ps.x_lower, ps.x_upper});
      spec.products.push_back(ps);
    }
    specs.push_back(spec);
    shared_form.nests.push_back(std::move(direct));
  }
  if (!per_product && out.shared_attribute) root["shared_attribute"].fail("only valid with per-product margins");
  out.nl_specs = specs;
  if (!per_product) out.instance = shared_form;
  else if (out.shared_attribute) out.instance = split_attributes(specs, *out.shared_attribute);
  else out.instance = nl_from_specs(specs);
}

inline void parse_resources(const Node& root, ParsedInstance& out, Index J) {
  if (!root.has("resources")) return;
  const Node r = root["resources"];
  r.require_object({"Gamma", "gamma_rhs"}, {});
  out.resources.Gamma = r["Gamma"].matrix(-1, J);
  out.resources.gamma_rhs = r["gamma_rhs"].vector(out.resources.Gamma.rows());
}

}  // namespace detail

inline ParsedInstance parse_instance(const Json& doc) {
  const Node root(doc, "$");
  if (!doc.is_object()) root.fail("expected an object");
  detail::check_version(root);
  ParsedInstance out;
  for (const char* key : {"schema_version", "model", "form"})
    if (!doc.contains(key)) Node(doc, std::string("$.") + key).fail("required field missing");
  out.model = root["model"].choice({"mnl", "mc", "nl"});
  out.form = root["form"].choice({"adjusted", "raw"});
  if (out.model == "nl") detail::parse_nl(root, out);
  else detail::parse_linear(root, out);
  validate(out.instance);
  const Index J = std::visit([](const auto& m) { return Index(m.products()); }, out.instance);
  detail::parse_resources(root, out, J);
  return out;
}

inline ParsedInstance parse_instance(const std::string& text) { return parse_instance(detail::parse_text(text)); }

/// The adjusted-form instance file equivalent to `parsed`.
inline Json adjusted_instance_json(const ParsedInstance& parsed) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = parsed.model;
  out["form"] = "adjusted";
  if (const auto* nl = std::get_if<NlInstance>(&parsed.instance)) {
    const bool per_product = !parsed.nl_specs.empty() && parsed.shared_attribute;
    out["K"] = per_product ? parsed.raw_attributes : nl->K;
    out["nests"] = Json::array();
    if (per_product) {
      out["shared_attribute"] = *parsed.shared_attribute;
      for (const auto& spec : parsed.nl_specs) {
        Json nest{{"gamma", spec.gamma}, {"products", Json::array()}};
        for (const auto& p : spec.products)
          nest["products"].push_back(
              {{"psi", p.psi}, {"phi", to_json(p.phi)}, {"x_lower", to_json(p.x_lower)}, {"x_upper", to_json(p.x_upper)}});
        out["nests"].push_back(nest);
      }
    } else {
      for (const auto& nest : nl->nests) {
        Json n{{"gamma", nest.gamma}, {"rho_shared", to_json(nest.rho_shared)}, {"products", Json::array()}};
        for (const auto& p : nest.products)
          n["products"].push_back({{"psi", p.psi}, {"x_lower", to_json(p.x_lower)}, {"x_upper", to_json(p.x_upper)}});
        out["nests"].push_back(n);
      }
    }
  } else {
    const ProductView view = product_view(parsed.instance);
    out["phi"] = to_json(view.phi);
    out["psi"] = to_json(view.psi);
    out["x_lower"] = to_json(view.x_lower);
    out["x_upper"] = to_json(view.x_upper);
    if (const auto* mc = std::get_if<McInstance>(&parsed.instance)) {
      out["lambda"] = to_json(mc->lambda);
      out["rho"] = to_json(mc->rho);
    }
  }
  if (parsed.resources.rows() > 0)
    out["resources"] = {{"Gamma", to_json(parsed.resources.Gamma)}, {"gamma_rhs", to_json(parsed.resources.gamma_rhs)}};
  return out;
}

// ---------------------------------------------------------------------------
// Solutions.

struct SolverStats {
  int iterations = 0;
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double certificate_residual = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0;
  bool relaxed = false;
  int clamped = 0;
  double box_violation = 0;
};

struct SolutionFile {
  std::string model;
  SolveStatus status = SolveStatus::NumericalFailure;
  std::optional<RecoveredSolution> recovered;
  std::optional<Matrix> x_original;  // per-product attributes before splitting
  std::optional<Matrix> y;           // raw units
  SolverStats stats;
  Json provenance = Json::object();
};

inline SolveStatus status_from_string(const Node& n) {
  const std::string s = n.choice({"optimal", "infeasible", "unbounded", "max_iterations", "numerical_failure"});
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded,
                         SolveStatus::MaxIterations, SolveStatus::NumericalFailure})
    if (s == to_string(st)) return st;
  n.fail("unknown status");
}

/// Raw-unit attributes of a recovered solution, when the instance came in
/// raw form.
inline std::optional<Matrix> raw_attributes(const ParsedInstance& parsed, const Matrix& x) {
  if (parsed.raw) return unadjust(x, *parsed.raw);
  if (parsed.raw_nl.empty()) return std::nullopt;
  const Matrix merged = parsed.shared_attribute
                            ? merge_split_attributes(std::get<NlInstance>(parsed.instance), x, parsed.raw_attributes,
                                                     *parsed.shared_attribute)
                            : x;
  Matrix y(merged.rows(), merged.cols());
  for (Index r = 0; r < merged.rows(); ++r) y.row(r) = unadjust(merged.row(r), parsed.raw_nl[std::size_t(r)]);
  return y;
}

inline SolutionFile make_solution(const ParsedInstance& parsed, const PipelineResult& result, const SolverConfig& cfg) {
  SolutionFile out;
  out.model = parsed.model;
  out.status = result.solution.status;
  out.recovered = result.recovered;
  if (out.recovered) {
    if (parsed.shared_attribute)
      out.x_original = merge_split_attributes(std::get<NlInstance>(parsed.instance), out.recovered->x,
                                              parsed.raw_attributes, *parsed.shared_attribute);
    out.y = raw_attributes(parsed, out.recovered->x);
    out.stats.clamped = out.recovered->clamped;
    out.stats.box_violation = out.recovered->box_violation;
  }
  out.stats.iterations = result.solution.iterations;
  out.stats.primal_residual = result.solution.primal_residual;
  out.stats.dual_residual = result.solution.dual_residual;
  out.stats.gap = result.solution.gap;
  out.stats.certificate_residual = result.solution.certificate_residual;
  out.stats.tolerance = result.tolerance;
  out.stats.relaxed = result.relaxed;
  out.provenance = {{"tool", "choiceopt"},
                    {"version", kToolVersion},
                    {"config", {{"tol_gap", cfg.tol_gap}, {"tol_feas", cfg.tol_feas}, {"max_iter", cfg.max_iter}}}};
  return out;
}

inline Json to_json(const SolutionFile& s) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["model"] = s.model;
  out["status"] = to_string(s.status);
  out["solver"] = {{"iterations", s.stats.iterations},
                   {"primal_residual", s.stats.primal_residual},
                   {"dual_residual", s.stats.dual_residual},
                   {"gap", s.stats.gap},
                   {"certificate_residual", s.stats.certificate_residual},
                   {"tolerance", s.stats.tolerance},
                   {"relaxed", s.stats.relaxed},
                   {"clamped", s.stats.clamped},
                   {"box_violation", s.stats.box_violation}};
  out["provenance"] = s.provenance;
  if (!s.recovered) return out;
  const auto& r = *s.recovered;
  out["objective"] = r.objective;
  out["program_objective"] = r.program_objective;
  out["x"] = to_json(r.x);
  out["u"] = to_json(r.u);
  out["tightness"] = to_json(r.tightness);
  Json shares{{"d", to_json(r.shares.d)}};
  if (r.shares.outside) shares["outside"] = *r.shares.outside;
  if (r.shares.visits.size()) shares["visits"] = to_json(r.shares.visits);
  if (r.shares.nest_shares.size()) shares["nest_shares"] = to_json(r.shares.nest_shares);
  out["shares"] = shares;
  if (s.x_original) out["x_original"] = to_json(*s.x_original);
  if (s.y) out["y"] = to_json(*s.y);
  return out;
}

inline double nullable_number(const Node& n) {
  return n.raw().is_null() ? std::numeric_limits<double>::quiet_NaN() : n.number();
}

inline SolutionFile parse_solution(const Json& doc) {
  const Node root(doc, "$");
  if (!doc.is_object()) root.fail("expected an object");
  detail::check_version(root);
  SolutionFile out;
  out.status = doc.contains("status") ? status_from_string(root["status"]) : SolveStatus::NumericalFailure;
  const bool optimal = out.status == SolveStatus::Optimal;
  if (optimal)
    root.require_object({"schema_version", "model", "status", "solver", "provenance", "objective", "program_objective",
                         "x", "u", "tightness", "shares"},
                        {"x_original", "y"});
  else
    root.require_object({"schema_version", "model", "status", "solver", "provenance"}, {});
  out.model = root["model"].choice({"mnl", "mc", "nl"});

  const Node solver = root["solver"];
  solver.require_object({"iterations", "primal_residual", "dual_residual", "gap", "certificate_residual", "tolerance",
                         "relaxed", "clamped", "box_violation"},
                        {});
  out.stats.iterations = int(solver["iterations"].integer());
  out.stats.primal_residual = nullable_number(solver["primal_residual"]);
  out.stats.dual_residual = nullable_number(solver["dual_residual"]);
  out.stats.gap = nullable_number(solver["gap"]);
  out.stats.certificate_residual = nullable_number(solver["certificate_residual"]);
  out.stats.tolerance = solver["tolerance"].number();
  if (!solver["relaxed"].raw().is_boolean()) solver["relaxed"].fail("expected a boolean");
  out.stats.relaxed = solver["relaxed"].raw().get<bool>();
  out.stats.clamped = int(solver["clamped"].integer());
  out.stats.box_violation = solver["box_violation"].number();
  if (!root["provenance"].raw().is_object()) root["provenance"].fail("expected an object");
  out.provenance = doc.at("provenance");
  if (!optimal) return out;

  RecoveredSolution r;
  r.objective = root["objective"].number();
  r.program_objective = root["program_objective"].number();
  r.x = root["x"].matrix();
  r.u = root["u"].matrix(r.x.rows(), r.x.cols());
  r.tightness = root["tightness"].vector();
  r.box_violation = out.stats.box_violation;
  r.clamped = out.stats.clamped;
  const Node shares = root["shares"];
  shares.require_object({"d"}, {"outside", "visits", "nest_shares"});
  r.shares.d = shares["d"].vector(r.x.rows());
  if (shares.has("outside")) r.shares.outside = shares["outside"].number();
  if (shares.has("visits")) r.shares.visits = shares["visits"].vector(r.x.rows());
  if (shares.has("nest_shares")) r.shares.nest_shares = shares["nest_shares"].vector();
  out.recovered = r;
  if (root.has("x_original")) out.x_original = root["x_original"].matrix(r.x.rows());
  if (root.has("y")) out.y = root["y"].matrix(r.x.rows());
  return out;
}

inline SolutionFile parse_solution(const std::string& text) { return parse_solution(detail::parse_text(text)); }

/// Checks a stored optimal solution against its instance without re-solving.
inline RoundtripReport verify_solution(const ParsedInstance& parsed, const SolutionFile& sol) {
  if (sol.model != parsed.model)
    throw Error(ErrorCode::DimensionMismatch, "solution model " + sol.model + " differs from instance model " + parsed.model);
  if (!sol.recovered) throw Error(ErrorCode::NotOptimal, std::string("solution status is ") + to_string(sol.status));
  const ProductView view = product_view(parsed.instance);
  const auto& r = *sol.recovered;
  if (r.x.rows() != view.phi.rows() || r.x.cols() != view.phi.cols())
    throw Error(ErrorCode::DimensionMismatch, "solution x has shape " + std::to_string(r.x.rows()) + "x" +
                                                  std::to_string(r.x.cols()) + ", instance expects " +
                                                  std::to_string(view.phi.rows()) + "x" + std::to_string(view.phi.cols()));
  RoundtripReport report = roundtrip_check(parsed.instance, r);
  report.objective_mismatch = std::max(report.objective_mismatch, std::abs(expected_profit(parsed.instance, r.x) - r.objective));
  return report;
}

inline Json to_json(const RoundtripReport& r) {
  return {{"share_residual", r.share_residual},
          {"tightness_residual", r.tightness_residual},
          {"box_violation", r.box_violation},
          {"objective_mismatch", r.objective_mismatch},
          {"passes", r.passes()}};
}

}  // namespace choiceopt::io

#endif  // CHOICEOPT_IO_HPP
