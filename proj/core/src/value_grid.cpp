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

#include "qdp/value_grid.hpp"

#include <algorithm>
#include <cmath>

#include "qdp/error.hpp"

namespace qdp {

namespace {

std::size_t unit_divisions(double dx) {
  if (!(dx > 0.0) || dx > 1.0) throw InvalidArgument("grid spacing must lie in (0, 1]");
  const double n = 1.0 / dx;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
    throw InvalidArgument("grid spacing must divide 1");
  }
  return static_cast<std::size_t>(rounded);
}

Vec3 clamp_to_ball(const Vec3& r) {
  const double n = r.norm();
  return n > 1.0 ? Vec3(r / n) : r;
}

}  // namespace

std::size_t GridDictionary::size() const {
  return family == ControlFamily::measurement_alpha ? alphas.size() : vectors.size();
}

ValueGrid::ValueGrid(GridMode mode, double t0, double dt, std::size_t steps, double dx,
                     GridDictionary dictionary, std::size_t store_every)
    : mode_(mode), t0_(t0), dt_(dt), steps_(steps), dictionary_(std::move(dictionary)) {
  const std::size_t n = unit_divisions(dx);
  dx_ = 1.0 / static_cast<double>(n);
  axis_nodes_ = mode == GridMode::radial ? n + 1 : 2 * n + 1;
  if (steps > 0 && !(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (store_every == 0) throw InvalidArgument("store_every must be positive");

  for (std::size_t k = 0; k <= steps; k += store_every) stored_steps_.push_back(k);
  if (stored_steps_.back() != steps) stored_steps_.push_back(steps);

  const std::size_t nodes = node_count();
  values_.assign(nodes * stored_steps_.size(), 0.0);
  policy_.assign(nodes * stored_steps_.size(), kPolicyOff);
  admissible_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    admissible_[i] = mode == GridMode::radial || node_position(i).squaredNorm() <= 1.0 + 1e-12;
  }
}

std::size_t ValueGrid::node_count() const {
  return mode_ == GridMode::radial ? axis_nodes_ : axis_nodes_ * axis_nodes_ * axis_nodes_;
}

std::size_t ValueGrid::node_index(std::size_t i, std::size_t j, std::size_t k) const {
  return (i * axis_nodes_ + j) * axis_nodes_ + k;
}

Vec3 ValueGrid::node_position(std::size_t node) const {
  const double n = std::round(1.0 / dx_);
  if (mode_ == GridMode::radial) return Vec3(static_cast<double>(node) / n, 0.0, 0.0);
  const std::size_t k = node % axis_nodes_;
  const std::size_t j = (node / axis_nodes_) % axis_nodes_;
  const std::size_t i = node / (axis_nodes_ * axis_nodes_);
  auto coord = [n](std::size_t idx) { return (static_cast<double>(idx) - n) / n; };
  return Vec3(coord(i), coord(j), coord(k));
}

bool ValueGrid::admissible(std::size_t node) const { return admissible_[node] != 0; }

double ValueGrid::slice_time(std::size_t slice) const {
  return t0_ + static_cast<double>(stored_steps_.at(slice)) * dt_;
}

std::size_t ValueGrid::slice_of_step(std::size_t step) const {
  auto it = std::lower_bound(stored_steps_.begin(), stored_steps_.end(), step);
  if (it == stored_steps_.end() || *it != step) return stored_steps_.size();
  return static_cast<std::size_t>(it - stored_steps_.begin());
}

std::size_t ValueGrid::slice_at_time(double t) const {
  std::size_t k = 0;
  if (steps_ > 0) {
    const double pos = std::floor((t - t0_) / dt_ + 1e-9);
    k = pos <= 0.0 ? 0 : std::min(steps_, static_cast<std::size_t>(pos));
  }
  auto it = std::upper_bound(stored_steps_.begin(), stored_steps_.end(), k);
  return static_cast<std::size_t>(it - stored_steps_.begin()) - 1;
}

std::span<const double> ValueGrid::values(std::size_t slice) const {
  return {values_.data() + slice * node_count(), node_count()};
}
std::span<double> ValueGrid::values(std::size_t slice) {
  return {values_.data() + slice * node_count(), node_count()};
}
std::span<const int> ValueGrid::policy(std::size_t slice) const {
  return {policy_.data() + slice * node_count(), node_count()};
}
std::span<int> ValueGrid::policy(std::size_t slice) {
  return {policy_.data() + slice * node_count(), node_count()};
}

void ValueGrid::corner_weights(const Vec3& r_in,
                               std::vector<std::pair<std::size_t, double>>& out) const {
  out.clear();
  const Vec3 r = clamp_to_ball(r_in);
  const double n = std::round(1.0 / dx_);
  if (mode_ == GridMode::radial) {
    const double pos = r.norm() * n;
    const auto i0 = std::min(static_cast<std::size_t>(pos), axis_nodes_ - 2);
    const double f = pos - static_cast<double>(i0);
    out.emplace_back(i0, 1.0 - f);
    out.emplace_back(i0 + 1, f);
    return;
  }
  std::size_t base[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double pos = (r[a] + 1.0) * n;
    const auto i0 = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), axis_nodes_ - 2);
    base[a] = i0;
    frac[a] = pos - static_cast<double>(i0);
  }
  double total = 0.0;
  for (int c = 0; c < 8; ++c) {
    const std::size_t i = base[0] + ((c >> 2) & 1);
    const std::size_t j = base[1] + ((c >> 1) & 1);
    const std::size_t k = base[2] + (c & 1);
    const std::size_t node = node_index(i, j, k);
    if (!admissible(node)) continue;
    const double w = (((c >> 2) & 1) ? frac[0] : 1.0 - frac[0]) *
                     (((c >> 1) & 1) ? frac[1] : 1.0 - frac[1]) *
                     ((c & 1) ? frac[2] : 1.0 - frac[2]);
    out.emplace_back(node, w);
    total += w;
  }
  if (total <= 0.0) {
    // Point sits exactly on admissible lattice faces with zero weights
    // elsewhere; fall back to the admissible corner closest to the origin.
    std::size_t best = out.empty() ? node_index(base[0], base[1], base[2]) : out.front().first;
    out.assign(1, {best, 1.0});
    return;
  }
  for (auto& [node, w] : out) w /= total;
}

double ValueGrid::value_at_slice(std::size_t slice, const Vec3& r) const {
  thread_local std::vector<std::pair<std::size_t, double>> weights;
  corner_weights(r, weights);
  const auto v = values(slice);
  double s = 0.0;
  for (const auto& [node, w] : weights) s += w * v[node];
  return s;
}

double ValueGrid::value_at(double t, const Vec3& r) const {
  return value_at_slice(slice_at_time(t), r);
}

int ValueGrid::nearest_policy(double t, const Vec3& r) const {
  thread_local std::vector<std::pair<std::size_t, double>> weights;
  corner_weights(r, weights);
  std::size_t best = weights.front().first;
  double best_w = -1.0;
  for (const auto& [node, w] : weights) {
    if (w > best_w) {
      best_w = w;
      best = node;
    }
  }
  return policy(slice_at_time(t))[best];
}

}  // namespace qdp
