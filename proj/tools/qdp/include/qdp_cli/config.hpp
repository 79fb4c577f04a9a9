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

#pragma once

// Run configuration for the qdp tool. JSON in, strictly validated: unknown
// keys and non-finite physical parameters are rejected.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdp/hjb.hpp"

namespace qdp::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemBlock {
  double strength = 1.0;  // |lambda|^2 of the probe channel
  std::vector<ChannelSpec> background;
  std::array<bool, 3> subspace{true, true, true};
};

struct SimulationBlock {
  Vec3 r0 = Vec3::Zero();
  double t0 = 0.0;
  double T = 2.0;
  double dt = 1e-4;
  std::size_t n_traj = 1;
  std::optional<std::uint64_t> master_seed;
  Scheme scheme = Scheme::milstein;
  std::size_t sample_every = 1;
  std::vector<std::string> functionals{"purity_deficit", "x", "y", "z"};
  std::size_t trajectory = 0;
};

struct PolicyBlock {
  PolicyKind kind = PolicyKind::no_measurement;
  Vec3 axis = Vec3::UnitZ();
  std::optional<double> strength;  // defaults to the system strength
  double field_radius = 1.0;
};

struct CostBlock {
  std::string bequest = "purity_deficit";  // purity_deficit | target_error | concave_projection | constant
  Vec3 target = Vec3::UnitZ();
  double radius = 1.0;
  std::array<bool, 3> subspace{true, true, true};
  double constant = 0.0;
};

struct HjbBlock {
  std::string solver = "measurement";  // measurement | deterministic
  HjbGridSpec grid;
  std::vector<double> alphas{0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0};
  std::vector<Vec3> directions;
  double field_radius = 1.0;
  std::string csv_slices = "endpoints";  // endpoints | all
  std::optional<Vec3> r0;                // deterministic: open-loop check start
  double reach_tolerance = 0.05;
  double value_tolerance = 5e-3;
  ResidualGridSpec residual;
};

struct GeneratorCheckBlock {
  std::size_t points = 9;
  double extent = 0.5;
  std::size_t n_traj = 20000;
  double h = 1e-3;
  double closed_tolerance = 1e-10;
  double mc_slack = 10.0;  // allowed bias C h
};

struct BenchmarkBlock {
  std::vector<double> r0{0.0, 0.3, 0.6, 0.9};
  double T = 1.0;
  double dt = 1e-4;
  std::size_t n_traj = 5000;
  std::vector<std::string> policies{"orthogonal_adaptive", "fixed_z", "fixed_x", "no_measurement",
                                    "grid_policy"};
  double grid_dx = 0.01;
  double analytic_tolerance = 1e-3;
  double grid_tolerance = 5e-3;
};

struct RunConfig {
  SystemBlock system;
  SimulationBlock simulation;
  PolicyBlock policy;
  CostBlock cost;
  HjbBlock hjb;
  GeneratorCheckBlock generator_check;
  BenchmarkBlock benchmark;
  std::string out_dir = ".";
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Objects assembled from the configuration.
StateFunctional make_functional(const std::string& name);
CostSpec make_costs(const CostBlock& block);
Policy make_policy_from(const RunConfig& config);

}  // namespace qdp::cli
