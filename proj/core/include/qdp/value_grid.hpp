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

// Discretized value function S(t, r) with the control chosen at every node.

#include <cstddef>
#include <span>
#include <vector>

#include "qdp/dynamics.hpp"

namespace qdp {

enum class GridMode { radial, ball };

enum class ControlFamily {
  measurement_alpha,      // unit-strength probe with n.r_hat = alpha
  measurement_direction,  // probe along a fixed Bloch direction
  field,                  // Hamiltonian field vector
};

struct GridDictionary {
  ControlFamily family = ControlFamily::measurement_alpha;
  std::vector<double> alphas;
  std::vector<Vec3> vectors;
  double strength = 1.0;
  ControlSubspace subspace;

  std::size_t size() const;
};

/// Policy code for "no measurement" / "no field".
inline constexpr int kPolicyOff = -1;

class ValueGrid {
 public:
  /// Radial mode: nodes r_i = i dx on [0, 1]. Ball mode: the lattice
  /// {-1 + i dx}^3 with dx dividing 1; nodes with |r| <= 1 are admissible.
  ValueGrid(GridMode mode, double t0, double dt, std::size_t steps, double dx,
            GridDictionary dictionary, std::size_t store_every);

  GridMode mode() const { return mode_; }
  double t0() const { return t0_; }
  double horizon() const { return t0_ + static_cast<double>(steps_) * dt_; }
  double dt() const { return dt_; }
  std::size_t steps() const { return steps_; }
  double dx() const { return dx_; }
  std::size_t axis_nodes() const { return axis_nodes_; }
  std::size_t node_count() const;
  const GridDictionary& dictionary() const { return dictionary_; }

  Vec3 node_position(std::size_t node) const;
  bool admissible(std::size_t node) const;
  std::size_t node_index(std::size_t i, std::size_t j, std::size_t k) const;

  /// Time steps k (time t0 + k dt) whose slices are stored, ascending;
  /// always contains 0 and steps().
  const std::vector<std::size_t>& stored_steps() const { return stored_steps_; }
  std::size_t slice_count() const { return stored_steps_.size(); }
  double slice_time(std::size_t slice) const;
  /// Stored slice for time step k, or npos-like slice_count() when absent.
  std::size_t slice_of_step(std::size_t step) const;
  /// Latest stored slice whose time is <= t (clamped to the grid).
  std::size_t slice_at_time(double t) const;

  std::span<const double> values(std::size_t slice) const;
  std::span<double> values(std::size_t slice);
  std::span<const int> policy(std::size_t slice) const;
  std::span<int> policy(std::size_t slice);

  /// Value at an arbitrary state: linear (radial) or trilinear (ball)
  /// interpolation over admissible corners, states clamped into the ball.
  double value_at(double t, const Vec3& r) const;
  double value_at_slice(std::size_t slice, const Vec3& r) const;
  /// Stored code of the admissible node nearest to r.
  int nearest_policy(double t, const Vec3& r) const;
  /// Interpolation weights over admissible corners (ball) or the two
  /// bracketing nodes (radial). Weights sum to one.
  void corner_weights(const Vec3& r, std::vector<std::pair<std::size_t, double>>& out) const;

  /// Feet of characteristics that left the ball and were clamped back.
  std::size_t clamped_feet() const { return clamped_feet_; }
  void add_clamped_feet(std::size_t n) { clamped_feet_ += n; }

 private:
  GridMode mode_;
  double t0_;
  double dt_;
  std::size_t steps_;
  double dx_;
  std::size_t axis_nodes_;
  GridDictionary dictionary_;
  std::vector<std::size_t> stored_steps_;
  std::vector<double> values_;
  std::vector<int> policy_;
  std::vector<unsigned char> admissible_;
  std::size_t clamped_feet_ = 0;
};

}  // namespace qdp
