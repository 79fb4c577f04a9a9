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

// Costs with hard constraints, Pontryagin and Bellman Hamiltonians, and the
// switching rules derived from them.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qdp/filtersim.hpp"

namespace qdp {

/// Extended real in (-inf, +inf]. +inf saturates: it survives addition and
/// scaling by non-negative factors, and loses every min.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr Cost(double v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr Cost infinite() { return Cost(std::numeric_limits<double>::infinity()); }

  constexpr bool is_infinite() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_infinite(); }
  constexpr double value() const { return v_; }

  friend constexpr Cost operator+(Cost a, Cost b) {
    return (a.is_infinite() || b.is_infinite()) ? infinite() : Cost(a.v_ + b.v_);
  }
  Cost& operator+=(Cost b) { return *this = *this + b; }
  /// Scales by s >= 0; 0 * inf stays inf (an inadmissible control is never
  /// excused by a zero-length interval).
  friend constexpr Cost operator*(double s, Cost a) {
    return a.is_infinite() ? infinite() : Cost(s * a.v_);
  }
  friend constexpr bool operator<(Cost a, Cost b) { return a.v_ < b.v_; }
  friend constexpr bool operator==(Cost a, Cost b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

inline Cost min(Cost a, Cost b) { return b < a ? b : a; }

/// Indicator of a constraint set: 0 inside, +inf outside.
Cost indicator(const ControlConstraint& constraint, const Control& u);

/// Controls over which the terminal bequest is minimized.
struct TerminalControlSet {
  enum class Kind { none, finite, ball };
  Kind kind = Kind::none;
  std::vector<Control> controls;  // finite
  double radius = 1.0;            // ball of fields in `subspace`
  ControlSubspace subspace;
  std::size_t samples = 10000;

  static TerminalControlSet none() { return {}; }
  static TerminalControlSet finite(std::vector<Control> controls);
  static TerminalControlSet ball(double radius, ControlSubspace subspace = {},
                                 std::size_t samples = 10000);
};

struct CostSpec {
  std::function<Observable(const Control&)> cost_observable;     // C(u); empty = 0
  std::function<Cost(const Control&)> cost_scalar;                // c(u); empty = 0
  std::function<Observable(const Control&)> bequest_observable;  // G(u); empty = 0
  std::function<Cost(const Control&)> bequest_scalar;             // g(u); empty = 0
  std::optional<StateFunctional> bequest;                         // extra state-only term
  TerminalControlSet terminal_set;

  bool has_running_cost() const { return cost_observable || cost_scalar; }

  /// c(u) + <rho, C(u)>.
  Cost running(const Control& u, const Vec3& r) const;
  /// Bequest at u: g(u) + <rho, G(u)> + bequest(r).
  Cost terminal_at(const Control& u, const Vec3& r) const;
  /// Bequest minimized over the terminal control set.
  Cost terminal(const Vec3& r) const;
  /// The minimizing terminal control (zero control when the set is empty).
  Control terminal_minimizer(const Vec3& r) const;

  /// Bequest 1 - r^2 with no running cost.
  static CostSpec purification();
  /// Bequest <rho, I - P_T> for the pure target state with Bloch vector n.
  static CostSpec target_error(const Vec3& target);
  /// g(u) = indicator of the ball, G(u) = sigma_u: the concave bequest -|q_U|.
  static CostSpec concave_projection(double radius, ControlSubspace subspace = {},
                                     std::size_t samples = 10000);
};

/// Left-endpoint quadrature of the running cost plus the terminal bequest.
/// +inf when any recorded control leaves `constraint` (when given).
Cost evaluate_cost_functional(const TrajectoryRecord& trajectory, const CostSpec& costs,
                              const std::optional<ControlConstraint>& constraint = std::nullopt);

struct Costate {
  Vec3 vec = Vec3::Zero();  // trace-free part
  double scalar = 0.0;      // multiple of the identity; never affects results
};

struct PontryaginResult {
  double value = 0.0;
  Vec3 control = Vec3::Zero();
};

/// Field-controlled qubit with an e_z dissipator of strength lambda^2 and
/// an indicator cost on the ball: u = R proj(q x p)/|proj|, zero when the
/// projection vanishes.
PontryaginResult pontryagin_hamiltonian(const Vec3& q, const Costate& p, const CostSpec& costs,
                                        const ControlConstraint& constraint, double lambda,
                                        const ControlSubspace& subspace = {});

/// Generic route: sup over the constraint ball of Tr(upsilon(u) P) - C(u),
/// with the drift taken in operator form and P = scalar I + sigma_p.
/// Uses a Fibonacci scan plus pattern-search refinement.
PontryaginResult pontryagin_hamiltonian_numeric(const Vec3& q, const Costate& p,
                                                const CostSpec& costs,
                                                const ControlConstraint& constraint,
                                                std::span<const ChannelSpec> channels,
                                                const ControlSubspace& subspace = {});

/// Score of one unit-strength probe: -(drift . grad S + 1/2 l^T Hess l).
double measurement_score(const Vec3& r, const Vec3& grad, const Mat3& hess,
                         const ChannelSpec& channel);

struct BellmanResult {
  double value = 0.0;
  std::vector<double> strengths;
  std::vector<double> scores;
  int selected = kPolicyOff;
};

/// Reduction of per-channel scores on the simplex: the argmax (lowest index
/// on ties) when positive beyond 1e-12, otherwise measurement off.
BellmanResult reduce_scores(std::vector<double> scores, double budget = 1.0);

BellmanResult bellman_measurement_hamiltonian(const Vec3& r, const Vec3& grad, const Mat3& hess,
                                              std::span<const ChannelSpec> channels,
                                              const ControlConstraint& constraint =
                                                  ControlConstraint::simplex());

int switching_rule(const Vec3& r, const Vec3& grad, const Mat3& hess, const ChannelSpec& channel);

/// argmin_j l_j^T Hess l_j, lowest index on ties.
std::size_t min_hessian_rule(const Vec3& r, const Mat3& hess,
                             std::span<const ChannelSpec> channels);

/// Zero field followed by the distinct projections of the 26 lattice
/// directions onto `subspace`, scaled to the ball radius.
std::vector<Vec3> field_dictionary(const ControlConstraint& constraint,
                                   const ControlSubspace& subspace);

/// Fibonacci points on the unit sphere of `subspace` (circle in 2-D, +-e in
/// 1-D).
std::vector<Vec3> subspace_sphere(const ControlSubspace& subspace, std::size_t n);

}  // namespace qdp
