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

#include "qdp/dynamics.hpp"

#include <cmath>

#include "qdp/error.hpp"

namespace qdp {

ChannelSpec ChannelSpec::observed(const Vec3& n, double strength) {
  ChannelSpec c;
  c.direction = n;
  c.strength = strength;
  c.kind = ChannelKind::observed;
  c.validate();
  return c;
}

ChannelSpec ChannelSpec::unobserved(const Vec3& n, double strength) {
  ChannelSpec c = observed(n, strength);
  c.kind = ChannelKind::unobserved;
  return c;
}

double ChannelSpec::lambda() const { return std::sqrt(strength); }

CMatrix2 ChannelSpec::coupling() const { return 0.5 * sigma_dot(direction); }

CMatrix2 ChannelSpec::lindblad_operator() const {
  return lambda() * std::polar(1.0, phase) * coupling();
}

void ChannelSpec::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw InvalidArgument("channel strength must be finite and non-negative");
  }
  if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("channel direction must be a unit vector");
  }
}

OperatorChannel OperatorChannel::from(const ChannelSpec& channel) {
  channel.validate();
  return OperatorChannel{channel.coupling(), channel.strength, channel.phase, channel.kind};
}

CMatrix OperatorChannel::lindblad_operator() const {
  return std::sqrt(strength) * std::polar(1.0, phase) * coupling;
}

Vec3 ControlSubspace::project(const Vec3& v) const {
  Vec3 out = v;
  for (int i = 0; i < 3; ++i) {
    if (!axes_[static_cast<std::size_t>(i)]) out[i] = 0.0;
  }
  return out;
}

Mat3 ControlSubspace::projector() const {
  Mat3 p = Mat3::Zero();
  for (int i = 0; i < 3; ++i) p(i, i) = axes_[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  return p;
}

int ControlSubspace::dimension() const {
  return static_cast<int>(axes_[0]) + static_cast<int>(axes_[1]) + static_cast<int>(axes_[2]);
}

Observable HamiltonianSpec::hamiltonian() const {
  return Observable::qubit(0.0, 0.5 * effective_field());
}

Vec3 qubit_drift(const HamiltonianSpec& hamiltonian, std::span<const ChannelSpec> channels,
                 const Vec3& r) {
  Vec3 rate = hamiltonian.effective_field().cross(r);
  for (const auto& c : channels) {
    c.validate();
    rate += channel_drift(c, r);
  }
  return rate;
}

Vec3 qubit_fluctuation(const ChannelSpec& channel, const Vec3& r) {
  if (!channel.is_observed()) {
    throw InvalidArgument("unobserved channels carry no innovation");
  }
  if (channel.phase != 0.0) {
    throw InvalidArgument("qubit fluctuation assumes a real coupling");
  }
  const Vec3& n = channel.direction;
  return channel.lambda() * (n - n.dot(r) * r);
}

double expected_signal_rate(const ChannelSpec& channel, const Vec3& r) {
  return channel.lambda() * channel.direction.dot(r);
}

double innovation_increment(const ChannelSpec& channel, const Vec3& r, double dy, double dt) {
  return dy - expected_signal_rate(channel, r) * dt;
}

CMatrix generic_drift(const Observable& hamiltonian, std::span<const OperatorChannel> channels,
                      const DensityMatrix& rho) {
  const CMatrix& p = rho.matrix();
  const CMatrix& h = hamiltonian.matrix();
  if (h.rows() != p.rows()) throw DimensionMismatch("Hamiltonian and state dimensions differ");
  const Complex i(0.0, 1.0);
  CMatrix rate = -i * (h * p - p * h);
  for (const auto& c : channels) {
    if (c.coupling.rows() != p.rows() || c.coupling.cols() != p.cols()) {
      throw DimensionMismatch("channel operator and state dimensions differ");
    }
    const CMatrix l = c.lindblad_operator();
    const CMatrix ldl = l.adjoint() * l;
    rate += l * p * l.adjoint() - 0.5 * (ldl * p + p * ldl);
  }
  return rate;
}

CMatrix generic_fluctuation(const OperatorChannel& channel, const DensityMatrix& rho) {
  const CMatrix& p = rho.matrix();
  if (channel.coupling.rows() != p.rows()) {
    throw DimensionMismatch("channel operator and state dimensions differ");
  }
  const CMatrix l = channel.lindblad_operator();
  const CMatrix lp = l * p;
  const Complex signal = (lp + p * l.adjoint()).trace();
  return lp + p * l.adjoint() - signal.real() * p;
}

}  // namespace qdp
