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

#include "qdp/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qdp/error.hpp"
#include "qdp/functionals.hpp"

namespace qdp {

// ---- constraints ----------------------------------------------------------

Control Control::from(const ControlAction& action) {
  Control u;
  u.field = action.field;
  u.strengths.reserve(action.channels.size());
  for (const auto& c : action.channels) u.strengths.push_back(c.strength);
  return u;
}

bool ControlConstraint::contains(const Control& u, double tol) const {
  switch (kind) {
    case ConstraintKind::ball:
      return u.field.allFinite() && u.field.norm() <= bound + tol;
    case ConstraintKind::simplex: {
      double sum = 0.0;
      for (double s : u.strengths) {
        if (!(s >= -tol)) return false;
        sum += s;
      }
      return sum <= bound + tol;
    }
    case ConstraintKind::binary:
      return std::all_of(u.strengths.begin(), u.strengths.end(), [tol](double s) {
        return std::abs(s) <= tol || std::abs(s - 1.0) <= tol;
      });
    case ConstraintKind::pair_sum: {
      if (u.strengths.size() % 2 != 0) return false;
      for (std::size_t j = 0; j < u.strengths.size(); j += 2) {
        const double a = u.strengths[j];
        const double b = u.strengths[j + 1];
        if (!(a >= -tol) || !(b >= -tol) || std::abs(a + b - 1.0) > tol) return false;
      }
      return true;
    }
  }
  return false;
}

std::string ControlConstraint::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ConstraintKind::ball: os << "ball(radius=" << bound << ")"; break;
    case ConstraintKind::simplex: os << "simplex(budget=" << bound << ")"; break;
    case ConstraintKind::binary: os << "binary"; break;
    case ConstraintKind::pair_sum: os << "pair_sum"; break;
  }
  return os.str();
}

Cost indicator(const ControlConstraint& constraint, const Control& u) {
  return constraint.contains(u) ? Cost(0.0) : Cost::infinite();
}

// ---- costs ----------------------------------------------------------------

namespace {

double qubit_pairing(const Observable& obs, const Vec3& r) {
  if (obs.dim() != 2) throw DimensionMismatch("cost observables must act on a qubit");
  return obs.qubit_scalar() + r.dot(obs.qubit_vector());
}

struct BallMinimum {
  Vec3 u = Vec3::Zero();
  double value = std::numeric_limits<double>::infinity();
};

// Minimum of a (possibly +inf-valued) objective over the ball of `radius`
// in `subspace`: concentric Fibonacci shells, then compass search with
// radial projection back into the ball.
template <class F>
BallMinimum minimize_over_ball(const F& objective, double radius, const ControlSubspace& subspace,
                               std::size_t samples) {
  BallMinimum best;
  auto consider = [&](const Vec3& u) {
    const double v = objective(u);
    if (v < best.value) {
      best.value = v;
      best.u = u;
      return true;
    }
    return false;
  };
  consider(Vec3::Zero());
  if (radius <= 0.0 || subspace.dimension() == 0) return best;
  constexpr int kShells = 4;
  const auto sphere = subspace_sphere(subspace, std::max<std::size_t>(1, samples / kShells));
  for (int s = 1; s <= kShells; ++s) {
    const double rad = radius * s / kShells;
    for (const Vec3& d : sphere) consider(rad * d);
  }
  std::size_t iterations = 0;
  for (double step = 0.05 * radius; step > 1e-11 * radius && iterations < 20000; ++iterations) {
    bool improved = false;
    for (int a = 0; a < 3 && !improved; ++a) {
      if (!subspace.axes()[a]) continue;
      for (double sign : {1.0, -1.0}) {
        Vec3 cand = best.u + sign * step * Vec3::Unit(a);
        const double n = cand.norm();
        if (n > radius) cand *= radius / n;
        if (consider(cand)) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

TerminalControlSet TerminalControlSet::finite(std::vector<Control> controls) {
  if (controls.empty()) throw InvalidArgument("finite terminal control set is empty");
  TerminalControlSet s;
  s.kind = Kind::finite;
  s.controls = std::move(controls);
  return s;
}

TerminalControlSet TerminalControlSet::ball(double radius, ControlSubspace subspace,
                                            std::size_t samples) {
  if (!(radius >= 0.0)) throw InvalidArgument("terminal ball radius must be >= 0");
  TerminalControlSet s;
  s.kind = Kind::ball;
  s.radius = radius;
  s.subspace = subspace;
  s.samples = samples;
  return s;
}

Cost CostSpec::running(const Control& u, const Vec3& r) const {
  Cost c = cost_scalar ? cost_scalar(u) : Cost(0.0);
  if (c.is_infinite()) return c;
  if (cost_observable) c += qubit_pairing(cost_observable(u), r);
  return c;
}

Cost CostSpec::terminal_at(const Control& u, const Vec3& r) const {
  Cost c = bequest_scalar ? bequest_scalar(u) : Cost(0.0);
  if (c.is_infinite()) return c;
  if (bequest_observable) c += qubit_pairing(bequest_observable(u), r);
  if (bequest) c += (*bequest)(r);
  return c;
}

Control CostSpec::terminal_minimizer(const Vec3& r) const {
  switch (terminal_set.kind) {
    case TerminalControlSet::Kind::none:
      return Control{};
    case TerminalControlSet::Kind::finite: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < terminal_set.controls.size(); ++i) {
        if (terminal_at(terminal_set.controls[i], r) < terminal_at(terminal_set.controls[best], r)) best = i;
      }
      return terminal_set.controls[best];
    }
    case TerminalControlSet::Kind::ball: {
      const auto m = minimize_over_ball(
          [&](const Vec3& u) { return terminal_at(Control{u, {}}, r).value(); }, terminal_set.radius,
          terminal_set.subspace, terminal_set.samples);
      return Control{m.u, {}};
    }
  }
  return Control{};
}

Cost CostSpec::terminal(const Vec3& r) const {
  return terminal_at(terminal_minimizer(r), r);
}

CostSpec CostSpec::purification() {
  CostSpec c;
  c.bequest = functional::purity_deficit();
  return c;
}

CostSpec CostSpec::target_error(const Vec3& target) {
  if (std::abs(target.norm() - 1.0) > 1e-12) throw InvalidArgument("target must be a pure state");
  CostSpec c;
  const Observable g = Observable::qubit(0.5, -0.5 * target);
  c.bequest_observable = [g](const Control&) { return g; };
  return c;
}

CostSpec CostSpec::concave_projection(double radius, ControlSubspace subspace,
                                      std::size_t samples) {
  CostSpec c;
  const ControlConstraint ball = ControlConstraint::ball(radius);
  c.bequest_scalar = [ball](const Control& u) { return indicator(ball, u); };
  c.bequest_observable = [](const Control& u) { return Observable::qubit(0.0, u.field); };
  c.terminal_set = TerminalControlSet::ball(radius, subspace, samples);
  return c;
}

Cost evaluate_cost_functional(const TrajectoryRecord& trajectory, const CostSpec& costs,
                              const std::optional<ControlConstraint>& constraint) {
  const std::size_t n = trajectory.size();
  if (n == 0) throw InvalidArgument("empty trajectory");
  if (trajectory.states.size() != n || trajectory.controls.size() != n) {
    throw DimensionMismatch("trajectory sequences have different lengths");
  }
  if (constraint) {
    for (const auto& u : trajectory.controls) {
      if (!constraint->contains(u)) return Cost::infinite();
    }
  }
  Cost total(0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = trajectory.times[k + 1] - trajectory.times[k];
    total += h * costs.running(trajectory.controls[k], trajectory.states[k]);
  }
  return total + costs.terminal(trajectory.states.back());
}

// ---- Hamiltonians ---------------------------------------------------------

PontryaginResult pontryagin_hamiltonian(const Vec3& q, const Costate& p, const CostSpec& costs,
                                        const ControlConstraint& constraint, double lambda,
                                        const ControlSubspace& subspace) {
  if (constraint.kind != ConstraintKind::ball) {
    throw InvalidArgument("the field Hamiltonian needs a ball constraint");
  }
  if (constraint.bound < 0.0) throw InvalidArgument("empty admissible set");
  if (costs.has_running_cost()) {
    const ChannelSpec c = ChannelSpec::unobserved(Vec3::UnitZ(), lambda * lambda);
    return pontryagin_hamiltonian_numeric(q, p, costs, constraint,
                                          std::span<const ChannelSpec>(&c, 1), subspace);
  }
  PontryaginResult out;
  const Vec3 proj = subspace.project(q.cross(p.vec));
  const double n = proj.norm();
  if (n > 0.0) out.control = constraint.bound * proj / n;
  out.value = constraint.bound * n - 0.5 * lambda * lambda * (q.x() * p.vec.x() + q.y() * p.vec.y());
  return out;
}

PontryaginResult pontryagin_hamiltonian_numeric(const Vec3& q, const Costate& p,
                                                const CostSpec& costs,
                                                const ControlConstraint& constraint,
                                                std::span<const ChannelSpec> channels,
                                                const ControlSubspace& subspace) {
  if (constraint.kind != ConstraintKind::ball) {
    throw InvalidArgument("the field Hamiltonian needs a ball constraint");
  }
  if (constraint.bound < 0.0) throw InvalidArgument("empty admissible set");
  const Vec3 r = -q;
  const DensityMatrix rho = bloch_to_density(r);
  std::vector<OperatorChannel> ops;
  for (const auto& c : channels) ops.push_back(OperatorChannel::from(c));
  CMatrix P = p.scalar * CMatrix::Identity(2, 2) + CMatrix(sigma_dot(p.vec));

  auto neg = [&](const Vec3& u) {
    const Cost c = costs.running(Control{u, {}}, r);
    if (c.is_infinite()) return std::numeric_limits<double>::infinity();
    const Observable h = HamiltonianSpec{u, subspace}.hamiltonian();
    const CMatrix upsilon = -generic_drift(h, ops, rho);
    return -((upsilon * P).trace().real() - c.value());
  };
  const auto m = minimize_over_ball(neg, constraint.bound, subspace, 2000);
  return {-m.value, subspace.project(m.u)};
}

double measurement_score(const Vec3& r, const Vec3& grad, const Mat3& hess,
                         const ChannelSpec& c) {
  const double lam = std::sqrt(c.strength);
  const Vec3 l = lam * (c.direction - c.direction.dot(r) * r);
  return -(channel_drift(c, r).dot(grad) + 0.5 * l.dot(hess * l));
}

BellmanResult reduce_scores(std::vector<double> scores, double budget) {
  BellmanResult out;
  out.strengths.assign(scores.size(), 0.0);
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  if (!scores.empty() && scores[best] > 1e-12) {
    out.selected = static_cast<int>(best);
    out.strengths[best] = budget;
    out.value = budget * scores[best];
  }
  out.scores = std::move(scores);
  return out;
}

BellmanResult bellman_measurement_hamiltonian(const Vec3& r, const Vec3& grad, const Mat3& hess,
                                              std::span<const ChannelSpec> channels,
                                              const ControlConstraint& constraint) {
  if (constraint.kind != ConstraintKind::simplex) {
    throw InvalidArgument("measurement strengths must be constrained to a simplex");
  }
  std::vector<double> scores;
  scores.reserve(channels.size());
  for (const auto& c : channels) scores.push_back(measurement_score(r, grad, hess, c));
  return reduce_scores(std::move(scores), constraint.bound);
}

int switching_rule(const Vec3& r, const Vec3& grad, const Mat3& hess, const ChannelSpec& channel) {
  return measurement_score(r, grad, hess, channel) > 1e-12 ? 1 : 0;
}

std::size_t min_hessian_rule(const Vec3& r, const Mat3& hess,
                             std::span<const ChannelSpec> channels) {
  if (channels.empty()) throw InvalidArgument("min_hessian_rule needs at least one channel");
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < channels.size(); ++j) {
    const auto& c = channels[j];
    const Vec3 l = std::sqrt(c.strength) * (c.direction - c.direction.dot(r) * r);
    const double v = l.dot(hess * l);
    if (v < best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

std::vector<Vec3> field_dictionary(const ControlConstraint& constraint,
                                   const ControlSubspace& subspace) {
  if (constraint.kind != ConstraintKind::ball) {
    throw InvalidArgument("field dictionaries need a ball constraint");
  }
  std::vector<Vec3> out{Vec3::Zero()};
  if (constraint.bound <= 0.0) return out;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        const Vec3 v = subspace.project(Vec3(a, b, c));
        const double n = v.norm();
        if (n == 0.0) continue;
        const Vec3 u = constraint.bound * v / n;
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const Vec3& w) { return (w - u).norm() < 1e-12; });
        if (!seen) out.push_back(u);
      }
    }
  }
  return out;
}

std::vector<Vec3> subspace_sphere(const ControlSubspace& subspace, std::size_t n) {
  std::vector<int> axes;
  for (int a = 0; a < 3; ++a) {
    if (subspace.axes()[a]) axes.push_back(a);
  }
  switch (axes.size()) {
    case 3:
      return fibonacci_sphere(n);
    case 2: {
      std::vector<Vec3> out;
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        Vec3 v = Vec3::Zero();
        v[axes[0]] = std::cos(phi);
        v[axes[1]] = std::sin(phi);
        out.push_back(v);
      }
      return out;
    }
    case 1:
      return {Vec3::Unit(axes[0]), -Vec3::Unit(axes[0])};
    default:
      return {};
  }
}

}  // namespace qdp
