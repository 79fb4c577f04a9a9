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

#include <string>
#include <vector>

#include "qdp/dynamics.hpp"

namespace qdp {

/// Control vector: Hamiltonian field followed by per-slot channel strengths.
struct Control {
  Vec3 field = Vec3::Zero();
  std::vector<double> strengths;

  static Control from(const ControlAction& action);
};

enum class ConstraintKind { ball, simplex, binary, pair_sum };

/// Admissible control set U. Ball constrains the field; the other kinds
/// constrain the strengths. Pair-sum strengths are laid out as
/// (u_{1+}, u_{1-}, u_{2+}, u_{2-}, ...).
struct ControlConstraint {
  ConstraintKind kind = ConstraintKind::simplex;
  double bound = 1.0;  // ball radius or simplex budget

  static ControlConstraint ball(double radius = 1.0) { return {ConstraintKind::ball, radius}; }
  static ControlConstraint simplex(double budget = 1.0) { return {ConstraintKind::simplex, budget}; }
  static ControlConstraint binary() { return {ConstraintKind::binary, 1.0}; }
  static ControlConstraint pair_sum() { return {ConstraintKind::pair_sum, 1.0}; }

  bool contains(const Control& u, double tol = 1e-12) const;
  std::string describe() const;
};

}  // namespace qdp
