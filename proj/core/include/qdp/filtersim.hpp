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

// Deterministic master-equation trajectories and closed-loop filtering
// trajectories with reproducible ensemble statistics.

#include <cstdint>
#include <stdexcept>
#include <functional>
#include <string>
#include <vector>

#include "qdp/noise.hpp"
#include "qdp/policy.hpp"

namespace qdp {

struct TimeGrid {
  double t0 = 0.0;
  double T = 2.0;
  double dt = 1e-4;

  /// Number of steps; throws InvalidArgument when the invariants fail.
  std::size_t steps() const;
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  void validate() const;
};

enum class Scheme {
  euler_maruyama,
  milstein,  // adds the Ito-Milstein correction of the feedback-driven noise
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec3> states;
  std::vector<Control> controls;
  // Per channel slot, cumulative over [t0, t]: output y, innovation w and
  // the predicted signal integral of lambda (n.r) dt.
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> signal;

  std::size_t size() const { return times.size(); }
};

using OpenLoopControl = std::function<void(double, ControlAction&)>;

/// Classical RK4 with the control held over each step. Throws StabilityError
/// when |r| exceeds 1.01.
TrajectoryRecord integrate_me(const BlochState& r0, const OpenLoopControl& control,
                              const TimeGrid& grid);
TrajectoryRecord integrate_me(const BlochState& r0, const ControlAction& control,
                              const TimeGrid& grid);
/// Same integrator with a state-feedback policy sampled at step starts.
TrajectoryRecord integrate_me(const BlochState& r0, const Policy& policy, const TimeGrid& grid,
                              std::span<const ChannelSpec> background = {});

Vec3 project_physical(const Vec3& r);

/// One filtering step. `dW` holds one increment per channel of `action`
/// (unobserved channels ignore theirs). Euler-Maruyama by default.
Vec3 step_sme(const Vec3& r, const ControlAction& action, double dt, std::span<const double> dW,
              Scheme scheme = Scheme::euler_maruyama);

struct SimulationConfig {
  Vec3 r0 = Vec3::Zero();
  Policy policy;
  TimeGrid grid;
  std::vector<ChannelSpec> background;  // always-on channels after the policy slots
  std::size_t n_traj = 1;
  std::uint64_t master_seed = 0;
  Scheme scheme = Scheme::milstein;
  std::vector<StateFunctional> functionals;
  std::size_t sample_every = 1;  // record every k-th step (the last step is always kept)
  std::size_t workers = 0;       // 0: default_worker_count()
  bool keep_terminal = false;    // keep per-trajectory terminal functional values
};

struct Violation {
  std::size_t trajectory = 0;
  std::size_t step = 0;
  std::string message;
};

class TrajectoryAborted : public std::runtime_error {
 public:
  TrajectoryAborted(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Throws TrajectoryAborted when the policy emits an inadmissible control.
TrajectoryRecord simulate_trajectory(const SimulationConfig& config, std::uint64_t trajectory);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> mean;      // [functional][time]
  std::vector<std::vector<double>> variance;  // unbiased; 0 for a single sample
  std::vector<std::vector<double>> terminal;  // [functional][trajectory] when kept
  std::size_t n_traj = 0;                     // completed trajectories
  std::uint64_t master_seed = 0;
  std::vector<Violation> violations;

  double standard_error(std::size_t f, std::size_t k) const;
};

EnsembleStats simulate_ensemble(const SimulationConfig& config);

}  // namespace qdp
