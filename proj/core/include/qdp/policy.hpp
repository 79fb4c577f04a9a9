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

// Step-wise feedback controllers. A policy maps (t, r) to the Hamiltonian
// field and the probe channels applied over the next step.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "qdp/constraints.hpp"
#include "qdp/value_grid.hpp"

namespace qdp {

enum class PolicyKind {
  no_measurement,
  fixed_axis,
  orthogonal_adaptive,
  bang_bang_field,
  grid_policy,
  switching,
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Costate p(t, r) = grad_r S, i.e. minus the gradient in q = -r.
using CostateField = std::function<Vec3(double, const Vec3&)>;

struct PolicySpec {
  Vec3 axis = Vec3::UnitZ();  // fixed_axis
  double strength = 1.0;      // probe strength |lambda|^2

  CostateField costate;  // bang_bang_field
  ControlSubspace subspace;
  double field_radius = 1.0;

  std::shared_ptr<const ValueGrid> grid;  // grid_policy

  ChannelSpec channel;             // switching
  std::optional<StateFunctional> value;  // switching surrogate S

  std::optional<ControlConstraint> constraint;  // defaults per kind
};

class Policy {
 public:
  Policy();  // no_measurement
  Policy(PolicyKind kind, PolicySpec spec);

  PolicyKind kind() const { return kind_; }
  const PolicySpec& spec() const { return spec_; }
  const ControlConstraint& constraint() const { return constraint_; }
  std::string name() const { return to_string(kind_); }

  /// Number of probe channel slots emitted on every call; inactive probes
  /// are reported with zero strength so records keep a fixed layout.
  std::size_t slot_count() const;

  /// Fills `out` (reusing its storage) with the control for [t, t + dt).
  void act(double t, const Vec3& r, ControlAction& out) const;
  ControlAction act(double t, const Vec3& r) const;

 private:
  void act_grid(double t, const Vec3& r, ControlAction& out) const;

  PolicyKind kind_;
  PolicySpec spec_;
  ControlConstraint constraint_;
};

Policy make_policy(PolicyKind kind, PolicySpec params = {});

}  // namespace qdp
