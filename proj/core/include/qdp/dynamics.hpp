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

// Drift and fluctuation coefficients of the controlled master equation and
// of the diffusive filtering equation.
//
// Every drift returned here is a rate d(rho)/dt (or d(r)/dt), i.e. the
// negative of the generator upsilon(u, rho). Channels couple through
// L = lambda e^{i phase} R with R = sigma_n / 2 and strength = |lambda|^2.

#include <array>
#include <span>
#include <vector>

#include "qdp/qstate.hpp"

namespace qdp {

enum class ChannelKind { observed, unobserved };

struct ChannelSpec {
  Vec3 direction = Vec3::UnitZ();
  double strength = 1.0;  // |lambda|^2
  double phase = 0.0;     // arg lambda
  ChannelKind kind = ChannelKind::observed;

  static ChannelSpec observed(const Vec3& n, double strength);
  static ChannelSpec unobserved(const Vec3& n, double strength);

  double lambda() const;
  bool is_observed() const { return kind == ChannelKind::observed; }
  /// R = sigma_n / 2
  CMatrix2 coupling() const;
  /// L = lambda e^{i phase} R
  CMatrix2 lindblad_operator() const;
  /// Throws InvalidArgument on negative strength or |n| != 1 (1e-12).
  void validate() const;
};

/// Coupling through an arbitrary d x d operator R (generic-dimension path).
struct OperatorChannel {
  CMatrix coupling;
  double strength = 1.0;
  double phase = 0.0;
  ChannelKind kind = ChannelKind::observed;

  static OperatorChannel from(const ChannelSpec& channel);
  CMatrix lindblad_operator() const;
};

/// Axes of R^3 on which the Hamiltonian field acts.
class ControlSubspace {
 public:
  ControlSubspace() = default;
  explicit ControlSubspace(std::array<bool, 3> axes) : axes_(axes) {}
  static ControlSubspace full() { return ControlSubspace(); }

  Vec3 project(const Vec3& v) const;
  Mat3 projector() const;
  int dimension() const;
  const std::array<bool, 3>& axes() const { return axes_; }

 private:
  std::array<bool, 3> axes_{true, true, true};
};

/// Magnetic-field control H(u) = sigma_{Pu} / 2 (hbar = 1).
struct HamiltonianSpec {
  Vec3 field = Vec3::Zero();
  ControlSubspace subspace;

  Vec3 effective_field() const { return subspace.project(field); }
  Observable hamiltonian() const;
};

/// Bloch rate dr/dt: precession u x r plus, per channel, the transverse
/// damping -(strength/2)(r - (n.r) n).
Vec3 qubit_drift(const HamiltonianSpec& hamiltonian, std::span<const ChannelSpec> channels,
                 const Vec3& r);

/// Rate of a single channel, without validation; hot-loop helper.
inline Vec3 channel_drift(const ChannelSpec& c, const Vec3& r) {
  return -0.5 * c.strength * (r - c.direction.dot(r) * c.direction);
}

/// Bloch vector l of theta(rho) = sigma_l for an observed channel:
/// l = lambda (n - (n.r) r).
Vec3 qubit_fluctuation(const ChannelSpec& channel, const Vec3& r);

/// <rho, L + L^dagger> = lambda (n.r) for a real coupling.
double expected_signal_rate(const ChannelSpec& channel, const Vec3& r);

/// dw = dy - lambda (n.r) dt
double innovation_increment(const ChannelSpec& channel, const Vec3& r, double dy, double dt);

/// d(rho)/dt = -i[H, rho] + sum_j (L rho L^dag - {L^dag L, rho}/2).
CMatrix generic_drift(const Observable& hamiltonian, std::span<const OperatorChannel> channels,
                      const DensityMatrix& rho);

/// theta(rho) = L rho + rho L^dag - Tr(rho (L + L^dag)) rho.
CMatrix generic_fluctuation(const OperatorChannel& channel, const DensityMatrix& rho);

/// Everything a policy sets for one integration step.
struct ControlAction {
  Vec3 field = Vec3::Zero();
  ControlSubspace subspace;
  std::vector<ChannelSpec> channels;
  /// Either empty or one entry per channel: the Jacobian d(n_j)/d(r) of a
  /// state-feedback measurement direction. Used by the Milstein correction.
  std::vector<Mat3> direction_jacobians;

  HamiltonianSpec hamiltonian() const { return HamiltonianSpec{field, subspace}; }
  void clear() {
    field.setZero();
    subspace = ControlSubspace::full();
    channels.clear();
    direction_jacobians.clear();
  }
};

}  // namespace qdp
