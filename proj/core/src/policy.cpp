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

#include "qdp/policy.hpp"

#include <cmath>

#include "qdp/control.hpp"
#include "qdp/error.hpp"
#include "qdp/functionals.hpp"

namespace qdp {

namespace {

ChannelSpec probe(const Vec3& n, double strength) {
  return ChannelSpec{n, strength, 0.0, ChannelKind::observed};
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::no_measurement: return "no_measurement";
    case PolicyKind::fixed_axis: return "fixed_axis";
    case PolicyKind::orthogonal_adaptive: return "orthogonal_adaptive";
    case PolicyKind::bang_bang_field: return "bang_bang_field";
    case PolicyKind::grid_policy: return "grid_policy";
    case PolicyKind::switching: return "switching";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  for (auto k : {PolicyKind::no_measurement, PolicyKind::fixed_axis,
                 PolicyKind::orthogonal_adaptive, PolicyKind::bang_bang_field,
                 PolicyKind::grid_policy, PolicyKind::switching}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown policy kind: " + name);
}

Policy::Policy() : Policy(PolicyKind::no_measurement, {}) {}

Policy::Policy(PolicyKind kind, PolicySpec spec) : kind_(kind), spec_(std::move(spec)) {
  if (!std::isfinite(spec_.strength) || spec_.strength < 0.0) {
    throw InvalidArgument("probe strength must be finite and non-negative");
  }
  ControlConstraint fallback = ControlConstraint::simplex(1.0);
  switch (kind_) {
    case PolicyKind::no_measurement:
    case PolicyKind::orthogonal_adaptive:
      break;
    case PolicyKind::fixed_axis:
      if (std::abs(spec_.axis.norm() - 1.0) > 1e-12) {
        throw InvalidArgument("fixed_axis direction must be a unit vector");
      }
      break;
    case PolicyKind::bang_bang_field:
      if (!spec_.costate) throw InvalidArgument("bang_bang_field requires a costate field");
      if (!(spec_.field_radius >= 0.0)) throw InvalidArgument("field radius must be >= 0");
      fallback = ControlConstraint::ball(spec_.field_radius);
      break;
    case PolicyKind::grid_policy:
      if (!spec_.grid) throw InvalidArgument("grid_policy requires a value grid");
      if (spec_.grid->dictionary().family == ControlFamily::field) {
        double radius = 0.0;
        for (const auto& v : spec_.grid->dictionary().vectors) radius = std::max(radius, v.norm());
        fallback = ControlConstraint::ball(radius);
      }
      break;
    case PolicyKind::switching:
      if (!spec_.value) throw InvalidArgument("switching requires a value surrogate");
      spec_.channel.validate();
      if (!spec_.channel.is_observed()) throw InvalidArgument("switching channel must be observed");
      break;
  }
  constraint_ = spec_.constraint.value_or(fallback);
}

std::size_t Policy::slot_count() const {
  switch (kind_) {
    case PolicyKind::no_measurement:
    case PolicyKind::bang_bang_field:
      return 0;
    case PolicyKind::grid_policy:
      return spec_.grid->dictionary().family == ControlFamily::field ? 0 : 1;
    default:
      return 1;
  }
}

void Policy::act(double t, const Vec3& r, ControlAction& out) const {
  out.clear();
  switch (kind_) {
    case PolicyKind::no_measurement:
      return;
    case PolicyKind::fixed_axis:
      out.channels.push_back(probe(spec_.axis, spec_.strength));
      return;
    case PolicyKind::orthogonal_adaptive:
      out.channels.push_back(probe(orthogonal_direction(r), spec_.strength));
      out.direction_jacobians.push_back(orthogonal_direction_jacobian(r));
      return;
    case PolicyKind::bang_bang_field: {
      const Vec3 q = -r;
      const Vec3 proj = spec_.subspace.project(q.cross(spec_.costate(t, r)));
      const double n = proj.norm();
      out.subspace = spec_.subspace;
      if (n > 0.0) out.field = spec_.field_radius * proj / n;
      return;
    }
    case PolicyKind::grid_policy:
      act_grid(t, r, out);
      return;
    case PolicyKind::switching: {
      const StateFunctional& s = *spec_.value;
      const int on = switching_rule(r, gradient_of(s, r), hessian_of(s, r), spec_.channel);
      ChannelSpec c = spec_.channel;
      if (!on) c.strength = 0.0;
      out.channels.push_back(c);
      return;
    }
  }
}

void Policy::act_grid(double t, const Vec3& r, ControlAction& out) const {
  const ValueGrid& grid = *spec_.grid;
  const GridDictionary& dict = grid.dictionary();
  switch (dict.family) {
    case ControlFamily::measurement_alpha: {
      const int code = grid.nearest_policy(t, r);
      const double rho = r.norm();
      const Vec3 m = orthogonal_direction(r);
      const Mat3 jm = orthogonal_direction_jacobian(r);
      if (code == kPolicyOff || rho < 1e-12) {
        out.channels.push_back(probe(m, code == kPolicyOff ? 0.0 : dict.strength));
        out.direction_jacobians.push_back(jm);
        return;
      }
      const double alpha = dict.alphas.at(static_cast<std::size_t>(code));
      const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
      const Vec3 rhat = r / rho;
      const Mat3 perp = Mat3::Identity() - rhat * rhat.transpose();
      out.channels.push_back(probe((alpha * rhat + beta * m).normalized(), dict.strength));
      out.direction_jacobians.push_back(alpha * perp / rho + beta * jm);
      return;
    }
    case ControlFamily::measurement_direction: {
      const int code = grid.nearest_policy(t, r);
      if (code == kPolicyOff) {
        out.channels.push_back(probe(Vec3::UnitZ(), 0.0));
      } else {
        out.channels.push_back(probe(dict.vectors.at(static_cast<std::size_t>(code)), dict.strength));
      }
      return;
    }
    case ControlFamily::field: {
      thread_local std::vector<std::pair<std::size_t, double>> weights;
      grid.corner_weights(r, weights);
      const auto codes = grid.policy(grid.slice_at_time(t));
      Vec3 u = Vec3::Zero();
      for (const auto& [node, w] : weights) {
        const int code = codes[node];
        if (code != kPolicyOff) u += w * dict.vectors.at(static_cast<std::size_t>(code));
      }
      out.field = u;
      out.subspace = dict.subspace;
      return;
    }
  }
}

ControlAction Policy::act(double t, const Vec3& r) const {
  ControlAction a;
  act(t, r, a);
  return a;
}

Policy make_policy(PolicyKind kind, PolicySpec params) { return Policy(kind, std::move(params)); }

}  // namespace qdp
