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

// Counter-based Gaussian noise. Every increment is a pure function of
// (master seed, trajectory, step, channel), so ensembles are reproducible
// regardless of how trajectories are scheduled across workers.

#include <array>
#include <cstdint>

namespace qdp {

/// Philox4x32-10 block cipher (Salmon et al. 2011 constants).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

struct NoiseKey {
  std::uint64_t master_seed = 0;
  std::uint64_t trajectory = 0;
};

/// Standard normal variate for (key, step, channel) via the Box-Muller pair
/// transform; the cosine branch is used.
double standard_normal(const NoiseKey& key, std::uint64_t step, std::uint32_t channel);

/// Uniform variate in (0, 1) for (key, step, channel).
double uniform_open(const NoiseKey& key, std::uint64_t step, std::uint32_t channel);

}  // namespace qdp
