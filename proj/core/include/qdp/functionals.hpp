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

// Generator D F of smooth state functionals under the filtered dynamics.

#include <cstdint>
#include <span>
#include <vector>

#include "qdp/dynamics.hpp"

namespace qdp {

struct GeneratorBreakdown {
  double drift_term = 0.0;
  double ito_term = 0.0;
  double total = 0.0;
};

/// Matrix form: drift . grad f + 1/2 sum_j l_j^T Hess f l_j over the observed
/// channels.
GeneratorBreakdown generator(const StateFunctional& f, const BlochState& r,
                             const HamiltonianSpec& hamiltonian,
                             std::span<const ChannelSpec> channels);

/// Closed form for radial f and a single observed channel of strength
/// lambda^2. Throws InvalidArgument at r = 0 or for non-radial f.
GeneratorBreakdown generator_general_direction(const StateFunctional& f, const BlochState& r,
                                               const Vec3& n, double lambda);

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// (E F[r_h] - F[r]) / h from single Euler-Maruyama windows, sampled in
/// antithetic pairs (dW, -dW); each pair counts as one sample.
McEstimate mc_generator_estimate(const StateFunctional& f, const BlochState& r,
                                 const HamiltonianSpec& hamiltonian,
                                 std::span<const ChannelSpec> channels, double h,
                                 std::size_t n_traj, std::uint64_t seed);

/// Unit vector orthogonal to r obtained by rotating r_hat toward the
/// Cartesian axis of smallest |r_i| (lowest index on ties). e_z at r = 0.
Vec3 orthogonal_direction(const Vec3& r);
/// d n / d r of orthogonal_direction; zero at r = 0.
Mat3 orthogonal_direction_jacobian(const Vec3& r);

struct DirectionChoice {
  Vec3 direction = Vec3::UnitZ();
  double generator = 0.0;
  bool hypotheses_hold = false;  // f' <= 0 and f'' < 0 at |r|
  bool orthogonal = true;        // false when the aligned direction wins
};

/// Direction minimizing the generator of a radial f at r for a unit-strength
/// probe.
DirectionChoice local_optimal_direction(const StateFunctional& f, const BlochState& r);

std::vector<Vec3> fibonacci_sphere(std::size_t n);

struct ScanResult {
  Vec3 direction = Vec3::UnitZ();
  double value = 0.0;
};

/// Brute-force minimum of the matrix-form generator over a Fibonacci sample
/// followed by a shrinking pattern search.
ScanResult scan_directions(const StateFunctional& f, const BlochState& r, double lambda,
                           std::size_t samples = 10000);

}  // namespace qdp
