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

// Backward dynamic programming for the deterministic and the measurement
// control problems, and residual checks of closed-form value candidates.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdp/control.hpp"

namespace qdp {

enum class Interpolation { multilinear, quadratic };

struct HjbGridSpec {
  GridMode mode = GridMode::radial;
  double t0 = 0.0;
  double T = 1.0;
  double dx = 0.01;
  std::optional<double> dt;   // default: largest stable step dividing T - t0
  double cfl_safety = 0.9;    // fraction of the stability bound used by default
  std::size_t max_stored_slices = 1001;
  Interpolation interpolation = Interpolation::quadratic;
  std::size_t workers = 0;  // 0: default_worker_count()
};

struct DeterministicProblem {
  CostSpec costs;
  ControlConstraint constraint = ControlConstraint::ball(1.0);
  ControlSubspace subspace;
  std::vector<ChannelSpec> channels;  // fixed dissipation, never observed
  std::vector<Vec3> fields;           // optional dictionary override
};

/// Semi-Lagrangian sweep S(t, r) = min_u {C dt + S(t + dt, foot_u(r))} over
/// the cube lattice. Throws StabilityError when dt exceeds 0.5 dx / speed.
ValueGrid solve_deterministic_hjb(const DeterministicProblem& problem, const HjbGridSpec& spec);

struct MeasurementProblem {
  CostSpec costs;
  double strength = 1.0;
  /// Radial mode: alpha = n . r_hat of each candidate probe.
  std::vector<double> alphas{0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0};
  /// Ball mode: fixed probe directions.
  std::vector<Vec3> directions;
};

/// Ball-mode default dictionary: the 13 lattice directions up to sign.
std::vector<Vec3> lattice_directions();

/// Explicit sweep S(t) = S(t + dt) + dt min(C_off, min_j (C_j + D_j S)).
/// Throws StabilityError when dt exceeds 0.25 dx^2 / max |l|^2.
ValueGrid solve_measurement_hjb(const MeasurementProblem& problem, const HjbGridSpec& spec);

enum class ReducedEquation {
  paper_reduced,       // -S_t + (r/2) S_r
  generator_backward,  // -S_t + (r/2) S_r - S_r / (2r)
};

std::string to_string(ReducedEquation equation);

struct ResidualGridSpec {
  double t0 = 0.0;
  double T = 1.0;
  std::size_t n_t = 200;
  std::size_t n_r = 200;  // interior radii j / (n_r + 1)
  double h = 1e-4;        // central-difference step
};

struct PdeResidualReport {
  std::string candidate;
  ReducedEquation equation = ReducedEquation::paper_reduced;
  std::vector<double> t;
  std::vector<double> r;
  std::vector<double> residual;  // row-major [t][r]
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

using ValueCandidate = std::function<double(double, double)>;

PdeResidualReport verify_closed_form(const std::string& name, const ValueCandidate& candidate,
                                     ReducedEquation equation, const ResidualGridSpec& spec = {});

/// Feedback policy reading the stored controls of a solved grid.
Policy extract_policy(std::shared_ptr<const ValueGrid> grid);

}  // namespace qdp
