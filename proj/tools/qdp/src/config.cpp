// Copyright 2026 The qdp Authors
//
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

#include "qdp_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace qdp::cli {

namespace {

using nlohmann::json;

// Reads an object field by field and rejects whatever was not consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) { return j_.at(key); }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + ": must be finite");
    return x;
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where(key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }
  std::string text(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    if (!at(key).is_string()) throw ConfigError(where(key) + ": expected a string");
    return at(key).get<std::string>();
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
    return at(key).get<bool>();
  }
  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    return to_vec3(at(key), where(key));
  }
  std::array<bool, 3> axes(const std::string& key, std::array<bool, 3> fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 3) throw ConfigError(where(key) + ": expected 3 booleans");
    std::array<bool, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!v[i].is_boolean()) throw ConfigError(where(key) + ": expected 3 booleans");
      out[i] = v[i].get<bool>();
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw ConfigError(where(key) + ": expected finite numbers");
      }
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError(where(key) + ": expected strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  static Vec3 to_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
    Vec3 out;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        throw ConfigError(where + ": expected 3 finite numbers");
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ChannelSpec parse_channel(const json& j, const std::string& path) {
  Reader r(j, path);
  const Vec3 n = r.vec3("direction", Vec3::UnitZ());
  const double s = r.number("strength", 1.0);
  const bool observed = r.flag("observed", false);
  if (n.norm() == 0.0) throw ConfigError(path + ".direction: must be nonzero");
  if (s < 0.0) throw ConfigError(path + ".strength: must be >= 0");
  return observed ? ChannelSpec::observed(n.normalized(), s)
                  : ChannelSpec::unobserved(n.normalized(), s);
}

void parse_system(const json& j, SystemBlock& b) {
  Reader r(j, "system");
  b.strength = r.number("strength", b.strength);
  if (b.strength < 0.0) throw ConfigError("system.strength: must be >= 0");
  b.subspace = r.axes("subspace", b.subspace);
  if (r.has("background")) {
    const json& arr = r.at("background");
    if (!arr.is_array()) throw ConfigError("system.background: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      b.background.push_back(parse_channel(arr[i], "system.background[" + std::to_string(i) + "]"));
    }
  }
}

void parse_simulation(const json& j, SimulationBlock& b) {
  Reader r(j, "simulation");
  b.r0 = r.vec3("r0", b.r0);
  if (b.r0.norm() > 1.0 + kBallTolerance) throw ConfigError("simulation.r0: outside the Bloch ball");
  b.t0 = r.number("t0", b.t0);
  b.T = r.number("T", b.T);
  b.dt = r.number("dt", b.dt);
  b.n_traj = r.count("n_traj", b.n_traj);
  if (b.n_traj == 0) throw ConfigError("simulation.n_traj: must be >= 1");
  if (r.has("master_seed")) {
    if (!r.at("master_seed").is_number_unsigned()) {
      throw ConfigError("simulation.master_seed: expected an unsigned integer");
    }
    b.master_seed = r.at("master_seed").get<std::uint64_t>();
  }
  try {
    b.scheme = scheme_from_string(r.text("scheme", to_string(b.scheme)));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("simulation.scheme: ") + e.what());
  }
  b.sample_every = r.count("sample_every", b.sample_every);
  if (b.sample_every == 0) throw ConfigError("simulation.sample_every: must be >= 1");
  b.functionals = r.texts("functionals", b.functionals);
  for (const auto& f : b.functionals) make_functional(f);
  b.trajectory = r.count("trajectory", b.trajectory);
  try {
    TimeGrid{b.t0, b.T, b.dt}.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("simulation: ") + e.what());
  }
}

void parse_policy(const json& j, PolicyBlock& b) {
  Reader r(j, "policy");
  try {
    b.kind = policy_kind_from_string(r.text("kind", to_string(b.kind)));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("policy.kind: ") + e.what());
  }
  if (b.kind == PolicyKind::grid_policy || b.kind == PolicyKind::switching) {
    throw ConfigError("policy.kind: '" + to_string(b.kind) +
                      "' is only available programmatically or through purify-benchmark");
  }
  b.axis = r.vec3("axis", b.axis);
  if (b.axis.norm() == 0.0) throw ConfigError("policy.axis: must be nonzero");
  b.axis.normalize();
  if (r.has("strength")) {
    b.strength = r.number("strength", 1.0);
    if (*b.strength < 0.0) throw ConfigError("policy.strength: must be >= 0");
  }
  b.field_radius = r.number("field_radius", b.field_radius);
}

void parse_cost(const json& j, CostBlock& b) {
  Reader r(j, "cost");
  b.bequest = r.text("bequest", b.bequest);
  static const std::set<std::string> known{"purity_deficit", "target_error", "concave_projection",
                                           "constant"};
  if (!known.count(b.bequest)) throw ConfigError("cost.bequest: unknown bequest '" + b.bequest + "'");
  b.target = r.vec3("target", b.target);
  if (b.target.norm() == 0.0) throw ConfigError("cost.target: must be nonzero");
  b.target.normalize();
  b.radius = r.number("radius", b.radius);
  if (b.radius < 0.0) throw ConfigError("cost.radius: must be >= 0");
  b.subspace = r.axes("subspace", b.subspace);
  b.constant = r.number("constant", b.constant);
}

void parse_residual(const json& j, ResidualGridSpec& b) {
  Reader r(j, "hjb.residual");
  b.n_t = r.count("n_t", b.n_t);
  b.n_r = r.count("n_r", b.n_r);
  b.h = r.number("h", b.h);
}

void parse_hjb(const json& j, HjbBlock& b) {
  Reader r(j, "hjb");
  b.solver = r.text("solver", b.solver);
  if (b.solver != "measurement" && b.solver != "deterministic") {
    throw ConfigError("hjb.solver: expected 'measurement' or 'deterministic'");
  }
  const std::string mode = r.text("mode", b.solver == "deterministic" ? "ball" : "radial");
  if (mode != "radial" && mode != "ball") throw ConfigError("hjb.mode: expected 'radial' or 'ball'");
  b.grid.mode = mode == "radial" ? GridMode::radial : GridMode::ball;
  b.grid.t0 = r.number("t0", b.grid.t0);
  b.grid.T = r.number("T", b.grid.T);
  b.grid.dx = r.number("dx", b.grid.dx);
  if (r.has("dt")) b.grid.dt = r.number("dt", 0.0);
  b.grid.cfl_safety = r.number("cfl_safety", b.grid.cfl_safety);
  b.grid.max_stored_slices = r.count("max_stored_slices", b.grid.max_stored_slices);
  const std::string interp = r.text("interpolation", "quadratic");
  if (interp != "quadratic" && interp != "multilinear") {
    throw ConfigError("hjb.interpolation: expected 'quadratic' or 'multilinear'");
  }
  b.grid.interpolation =
      interp == "quadratic" ? Interpolation::quadratic : Interpolation::multilinear;
  b.alphas = r.numbers("alphas", b.alphas);
  if (r.has("directions")) {
    const json& arr = r.at("directions");
    if (!arr.is_array()) throw ConfigError("hjb.directions: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Vec3 d = Reader::to_vec3(arr[i], "hjb.directions[" + std::to_string(i) + "]");
      if (d.norm() == 0.0) throw ConfigError("hjb.directions: entries must be nonzero");
      b.directions.push_back(d.normalized());
    }
  }
  b.field_radius = r.number("field_radius", b.field_radius);
  b.csv_slices = r.text("csv_slices", b.csv_slices);
  if (b.csv_slices != "endpoints" && b.csv_slices != "all") {
    throw ConfigError("hjb.csv_slices: expected 'endpoints' or 'all'");
  }
  if (r.has("r0")) b.r0 = r.vec3("r0", Vec3::Zero());
  b.reach_tolerance = r.number("reach_tolerance", b.reach_tolerance);
  b.value_tolerance = r.number("value_tolerance", b.value_tolerance);
  if (r.has("residual")) parse_residual(r.at("residual"), b.residual);
}

void parse_generator_check(const json& j, GeneratorCheckBlock& b) {
  Reader r(j, "generator_check");
  b.points = r.count("points", b.points);
  if (b.points < 2) throw ConfigError("generator_check.points: must be >= 2");
  b.extent = r.number("extent", b.extent);
  if (!(b.extent > 0.0) || b.extent * std::sqrt(3.0) >= 1.0) {
    throw ConfigError("generator_check.extent: the state cube must lie inside the ball");
  }
  b.n_traj = r.count("n_traj", b.n_traj);
  if (b.n_traj < 2) throw ConfigError("generator_check.n_traj: must be >= 2");
  b.h = r.number("h", b.h);
  if (!(b.h > 0.0)) throw ConfigError("generator_check.h: must be positive");
  b.closed_tolerance = r.number("closed_tolerance", b.closed_tolerance);
  b.mc_slack = r.number("mc_slack", b.mc_slack);
}

void parse_benchmark(const json& j, BenchmarkBlock& b) {
  Reader r(j, "benchmark");
  b.r0 = r.numbers("r0", b.r0);
  for (double x : b.r0) {
    if (x < 0.0 || x > 1.0) throw ConfigError("benchmark.r0: radii must lie in [0, 1]");
  }
  b.T = r.number("T", b.T);
  b.dt = r.number("dt", b.dt);
  b.n_traj = r.count("n_traj", b.n_traj);
  if (b.n_traj < 2) throw ConfigError("benchmark.n_traj: must be >= 2");
  b.policies = r.texts("policies", b.policies);
  static const std::set<std::string> known{"orthogonal_adaptive", "fixed_z", "fixed_x",
                                           "no_measurement", "grid_policy"};
  for (const auto& p : b.policies) {
    if (!known.count(p)) throw ConfigError("benchmark.policies: unknown policy '" + p + "'");
  }
  if (b.policies.empty() || b.policies.front() != "orthogonal_adaptive") {
    throw ConfigError("benchmark.policies: must start with 'orthogonal_adaptive'");
  }
  b.grid_dx = r.number("grid_dx", b.grid_dx);
  b.analytic_tolerance = r.number("analytic_tolerance", b.analytic_tolerance);
  b.grid_tolerance = r.number("grid_tolerance", b.grid_tolerance);
  try {
    TimeGrid{0.0, b.T, b.dt}.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("benchmark: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig c;
  Reader r(j, "config");
  if (r.has("system")) parse_system(r.at("system"), c.system);
  if (r.has("simulation")) parse_simulation(r.at("simulation"), c.simulation);
  if (r.has("policy")) parse_policy(r.at("policy"), c.policy);
  if (r.has("cost")) parse_cost(r.at("cost"), c.cost);
  if (r.has("hjb")) parse_hjb(r.at("hjb"), c.hjb);
  if (r.has("generator_check")) parse_generator_check(r.at("generator_check"), c.generator_check);
  if (r.has("benchmark")) parse_benchmark(r.at("benchmark"), c.benchmark);
  if (r.has("output")) {
    Reader o(r.at("output"), "output");
    c.out_dir = o.text("dir", c.out_dir);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

StateFunctional make_functional(const std::string& name) {
  if (name == "purity_deficit") return functional::purity_deficit();
  if (name == "x") return functional::coordinate(0);
  if (name == "y") return functional::coordinate(1);
  if (name == "z") return functional::coordinate(2);
  if (name == "r2") {
    RadialProfile p{[](double r) { return r * r; }, [](double r) { return 2.0 * r; },
                    [](double) { return 2.0; }};
    return functional::radial("r2", p);
  }
  throw ConfigError("unknown functional '" + name + "'");
}

CostSpec make_costs(const CostBlock& b) {
  if (b.bequest == "purity_deficit") return CostSpec::purification();
  if (b.bequest == "target_error") return CostSpec::target_error(b.target);
  if (b.bequest == "concave_projection") {
    return CostSpec::concave_projection(b.radius, ControlSubspace(b.subspace));
  }
  CostSpec c;
  c.bequest = functional::constant(b.constant);
  return c;
}

Policy make_policy_from(const RunConfig& c) {
  PolicySpec spec;
  spec.axis = c.policy.axis;
  spec.strength = c.policy.strength.value_or(c.system.strength);
  spec.subspace = ControlSubspace(c.system.subspace);
  spec.field_radius = c.policy.field_radius;
  if (c.policy.kind == PolicyKind::bang_bang_field) {
    // Greedy costate: the gradient of the bequest, p = grad_r S_T.
    const CostSpec costs = make_costs(c.cost);
    spec.costate = [costs](double, const Vec3& r) {
      StateFunctional f;
      f.eval = [&costs](const Vec3& x) { return costs.terminal(x).value(); };
      return grad_fd(f, r);
    };
  }
  return make_policy(c.policy.kind, std::move(spec));
}

}  // namespace qdp::cli
