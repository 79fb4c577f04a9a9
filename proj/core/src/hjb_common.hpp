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

// Shared time-axis planning for the backward solvers.

#include <algorithm>
#include <cmath>
#include <string>

#include "qdp/error.hpp"
#include "qdp/hjb.hpp"

namespace qdp::detail {

struct TimePlan {
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t store_every = 1;
};

/// Picks dt (or checks a requested one) against the stability bound
/// `dt_max`; `what` names the bound in diagnostics.
inline TimePlan plan_time(const HjbGridSpec& spec, double dt_max, const std::string& what) {
  if (!(spec.T >= spec.t0)) throw InvalidArgument("HJB horizon requires T >= t0");
  if (spec.max_stored_slices < 2) throw InvalidArgument("max_stored_slices must be >= 2");
  TimePlan plan;
  const double horizon = spec.T - spec.t0;
  if (horizon == 0.0) return plan;
  if (spec.dt) {
    const double dt = *spec.dt;
    if (!(dt > 0.0)) throw InvalidArgument("HJB time step must be positive");
    if (dt > dt_max * (1.0 + 1e-12)) {
      throw StabilityError("HJB time step " + std::to_string(dt) + " violates " + what +
                           " (max " + std::to_string(dt_max) + ")");
    }
    const double n = horizon / dt;
    if (std::abs(n - std::round(n)) > 1e-9) {
      throw InvalidArgument("HJB time step must divide the horizon");
    }
    plan.steps = static_cast<std::size_t>(std::llround(n));
  } else {
    const double target = std::isfinite(dt_max) ? spec.cfl_safety * dt_max : horizon;
    plan.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / target - 1e-12)));
  }
  plan.dt = horizon / static_cast<double>(plan.steps);
  plan.store_every = (plan.steps + spec.max_stored_slices - 1) / (spec.max_stored_slices - 1);
  plan.store_every = std::max<std::size_t>(1, plan.store_every);
  return plan;
}

}  // namespace qdp::detail
