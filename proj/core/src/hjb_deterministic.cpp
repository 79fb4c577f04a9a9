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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "hjb_common.hpp"
#include "qdp/hjb.hpp"
#include "qdp/parallel.hpp"

namespace qdp {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::size_t kBlock = 1024;

// Linear drift r' = A r of the field-controlled qubit with fixed dissipators.
Mat3 drift_matrix(const Vec3& u, std::span<const ChannelSpec> channels) {
  Mat3 a;
  a << 0.0, -u.z(), u.y(), u.z(), 0.0, -u.x(), -u.y(), u.x(), 0.0;
  for (const auto& c : channels) {
    a -= 0.5 * c.strength * (Mat3::Identity() - c.direction * c.direction.transpose());
  }
  return a;
}

// One classical RK4 step of the linear flow, as a matrix.
Mat3 rk4_propagator(const Mat3& a, double dt) {
  const Mat3 m = a * dt;
  const Mat3 m2 = m * m;
  return Mat3::Identity() + m + m2 / 2.0 + m2 * m / 6.0 + m2 * m2 / 24.0;
}

class Interpolator {
 public:
  Interpolator(const ValueGrid& grid, Interpolation kind)
      : na_(grid.axis_nodes()), n_(std::round(1.0 / grid.dx())), kind_(kind) {}

  double operator()(const std::vector<double>& v, const Vec3& x) const {
    double pos[3];
    std::size_t cell[3];
    for (int a = 0; a < 3; ++a) {
      pos[a] = (std::clamp(x[a], -1.0, 1.0) + 1.0) * n_;
      cell[a] = std::min(static_cast<std::size_t>(pos[a]), na_ - 2);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double lin = 0.0;
    for (int c = 0; c < 8; ++c) {
      double w = 1.0;
      std::size_t idx[3];
      for (int a = 0; a < 3; ++a) {
        const int bit = (c >> (2 - a)) & 1;
        idx[a] = cell[a] + bit;
        const double f = pos[a] - static_cast<double>(cell[a]);
        w *= bit ? f : 1.0 - f;
      }
      const double val = v[(idx[0] * na_ + idx[1]) * na_ + idx[2]];
      lin += w * val;
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    if (kind_ == Interpolation::multilinear) return lin;

    // Tensor 3-point Lagrange around the nearest node, limited to the
    // range of the enclosing cell so the update stays monotone.
    std::size_t mid[3];
    double w[3][3];
    for (int a = 0; a < 3; ++a) {
      const double c = std::clamp(std::round(pos[a]), 1.0, static_cast<double>(na_ - 2));
      mid[a] = static_cast<std::size_t>(c);
      const double s = pos[a] - c;
      w[a][0] = 0.5 * s * (s - 1.0);
      w[a][1] = 1.0 - s * s;
      w[a][2] = 0.5 * s * (s + 1.0);
    }
    double q = 0.0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t bi = (mid[0] + i - 1) * na_;
      for (int j = 0; j < 3; ++j) {
        const std::size_t bj = (bi + mid[1] + j - 1) * na_;
        const double wij = w[0][i] * w[1][j];
        for (int k = 0; k < 3; ++k) q += wij * w[2][k] * v[bj + mid[2] + k - 1];
      }
    }
    return std::clamp(q, lo, hi);
  }

 private:
  std::size_t na_;
  double n_;
  Interpolation kind_;
};

}  // namespace

ValueGrid solve_deterministic_hjb(const DeterministicProblem& p, const HjbGridSpec& spec) {
  if (spec.mode != GridMode::ball) {
    throw InvalidArgument("the deterministic HJB is solved on the ball lattice");
  }
  for (const auto& c : p.channels) c.validate();
  std::vector<Vec3> fields = p.fields.empty() ? field_dictionary(p.constraint, p.subspace) : p.fields;
  for (Vec3& u : fields) {
    u = p.subspace.project(u);
    if (!p.constraint.contains(Control{u, {}})) {
      throw InvalidArgument("field dictionary entry violates the control constraint");
    }
  }

  GridDictionary dict;
  dict.family = ControlFamily::field;
  dict.vectors = fields;
  dict.subspace = p.subspace;
  // Probe grid to learn node positions before the time plan is known.
  const ValueGrid probe(GridMode::ball, spec.t0, 1.0, 0, spec.dx, dict, 1);
  const std::size_t nn = probe.node_count();

  std::vector<Mat3> drifts;
  double speed = 0.0;
  for (const Vec3& u : fields) {
    drifts.push_back(drift_matrix(u, p.channels));
    for (std::size_t i = 0; i < nn; ++i) {
      if (probe.admissible(i)) speed = std::max(speed, (drifts.back() * probe.node_position(i)).norm());
    }
  }
  const double dt_max = speed > 0.0 ? 0.5 * probe.dx() / speed
                                    : std::numeric_limits<double>::infinity();
  const detail::TimePlan plan = detail::plan_time(spec, dt_max, "the CFL bound 0.5 dx / speed");

  ValueGrid grid(GridMode::ball, spec.t0, plan.dt, plan.steps, spec.dx, dict, plan.store_every);
  std::vector<Mat3> props;
  for (const Mat3& a : drifts) props.push_back(rk4_propagator(a, plan.dt));

  std::vector<double> cur(nn), next(nn);
  std::vector<int> codes(nn, kPolicyOff);
  std::vector<Vec3> pos(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    pos[i] = grid.node_position(i);
    const Cost c = p.costs.terminal(pos[i]);
    if (c.is_infinite()) throw InvalidArgument("bequest must be finite on grid nodes");
    cur[i] = c.value();
  }
  {
    const std::size_t last = grid.slice_of_step(plan.steps);
    std::copy(cur.begin(), cur.end(), grid.values(last).begin());
    std::copy(codes.begin(), codes.end(), grid.policy(last).begin());
  }

  // Running costs are time independent; tabulate them once per node/control.
  const bool running = p.costs.has_running_cost();
  std::vector<double> cost_table;
  if (running) {
    cost_table.resize(nn * fields.size());
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t m = 0; m < fields.size(); ++m) {
        const Cost c = p.costs.running(Control{fields[m], {}}, pos[i]);
        cost_table[i * fields.size() + m] =
            c.is_infinite() ? std::numeric_limits<double>::infinity() : c.value();
      }
    }
  }

  const Interpolator interp(grid, spec.interpolation);
  const std::size_t workers = spec.workers ? spec.workers : default_worker_count();
  const std::size_t blocks = (nn + kBlock - 1) / kBlock;
  std::vector<std::size_t> clamped(blocks, 0);

  for (std::size_t k = plan.steps; k-- > 0;) {
    parallel_for(blocks, workers, [&](std::size_t b) {
      const std::size_t end = std::min(nn, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) {
        const bool inside = grid.admissible(i);
        double best = std::numeric_limits<double>::infinity();
        int code = 0;
        for (std::size_t m = 0; m < props.size(); ++m) {
          Vec3 foot = props[m] * pos[i];
          if (inside) {
            const double n = foot.norm();
            if (n > 1.0 + 1e-9) {
              foot /= n;
              ++clamped[b];
            }
          }
          double v = interp(cur, foot);
          if (running) v += plan.dt * cost_table[i * props.size() + m];
          if (v < best - kTieTolerance) {
            best = v;
            code = static_cast<int>(m);
          }
        }
        if (!std::isfinite(best)) {
          throw StabilityError("no admissible control at a grid node");
        }
        next[i] = best;
        codes[i] = code;
      }
    });
    cur.swap(next);
    const std::size_t slice = grid.slice_of_step(k);
    if (slice != grid.slice_count()) {
      std::copy(cur.begin(), cur.end(), grid.values(slice).begin());
      std::copy(codes.begin(), codes.end(), grid.policy(slice).begin());
    }
  }
  std::size_t total = 0;
  for (std::size_t c : clamped) total += c;
  grid.add_clamped_feet(total);
  return grid;
}

}  // namespace qdp
