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
#include <cmath>
#include <limits>

#include "hjb_common.hpp"
#include "qdp/hjb.hpp"
#include "qdp/parallel.hpp"

namespace qdp {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::size_t kBlock = 2048;

double finite_or_inf(Cost c) {
  return c.is_infinite() ? std::numeric_limits<double>::infinity() : c.value();
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw StabilityError("non-finite value in the measurement HJB sweep");
}

// Best option at one node: "off" first, then dictionary entries, each
// replacing the incumbent only when strictly better beyond the tolerance.
template <class ScoreFn>
std::pair<double, int> select(double c_off, double c_on, std::size_t entries, ScoreFn score) {
  double best = c_off;
  int code = kPolicyOff;
  if (std::isinf(c_on)) return {best, code};
  for (std::size_t j = 0; j < entries; ++j) {
    const double v = c_on - score(j);
    if (v < best - kTieTolerance) {
      best = v;
      code = static_cast<int>(j);
    }
  }
  return {best, code};
}

void store(ValueGrid& grid, std::size_t step, const std::vector<double>& s,
           const std::vector<int>& codes) {
  const std::size_t slice = grid.slice_of_step(step);
  if (slice == grid.slice_count()) return;
  std::copy(s.begin(), s.end(), grid.values(slice).begin());
  std::copy(codes.begin(), codes.end(), grid.policy(slice).begin());
}

ValueGrid solve_radial(const MeasurementProblem& p, const HjbGridSpec& spec) {
  for (double a : p.alphas) {
    if (!(std::abs(a) <= 1.0)) throw InvalidArgument("alpha values must lie in [-1, 1]");
  }
  const double s = p.strength;
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("probe strength must be >= 0");
  const double dt_max = s > 0.0 ? 0.25 * spec.dx * spec.dx / s
                                : std::numeric_limits<double>::infinity();
  const detail::TimePlan plan = detail::plan_time(spec, dt_max, "the parabolic CFL bound");

  GridDictionary dict;
  dict.family = ControlFamily::measurement_alpha;
  dict.alphas = p.alphas;
  dict.strength = s;
  ValueGrid grid(GridMode::radial, spec.t0, plan.dt, plan.steps, spec.dx, dict, plan.store_every);
  const std::size_t nn = grid.node_count();
  const std::size_t last = nn - 1;
  const double dx = grid.dx();

  // Probe directions in the frame r_hat = e_x.
  std::vector<ChannelSpec> probes;
  for (double a : p.alphas) {
    probes.push_back(ChannelSpec{Vec3(a, std::sqrt(std::max(0.0, 1.0 - a * a)), 0.0), s, 0.0,
                                 ChannelKind::observed});
  }

  std::vector<double> cur(nn), next(nn), c_off(nn), c_on(nn);
  std::vector<int> codes(nn, kPolicyOff);
  for (std::size_t i = 0; i < nn; ++i) {
    const Vec3 r = grid.node_position(i);
    cur[i] = finite_or_inf(p.costs.terminal(r));
    if (!std::isfinite(cur[i])) throw InvalidArgument("bequest must be finite on grid nodes");
    c_off[i] = finite_or_inf(p.costs.running(Control{Vec3::Zero(), {0.0}}, r));
    c_on[i] = finite_or_inf(p.costs.running(Control{Vec3::Zero(), {s}}, r));
  }
  store(grid, plan.steps, cur, codes);

  for (std::size_t k = plan.steps; k-- > 0;) {
    for (std::size_t i = 0; i < nn; ++i) {
      const double r = static_cast<double>(i) * dx;
      Vec3 grad = Vec3::Zero();
      Mat3 hess = Mat3::Zero();
      if (i == 0) {
        // Radial symmetry: S'(0) = 0 and S''(0) from the even extension.
        hess = Mat3::Identity() * (2.0 * (cur[1] - cur[0]) / (dx * dx));
      } else {
        // Upwind slope in u = r^2, where the drift speed is bounded.
        const std::size_t up = i < last ? i + 1 : i;
        const std::size_t lo = i < last ? i : i - 1;
        const double du = (2.0 * static_cast<double>(lo) + 1.0) * dx * dx;
        const double su = (cur[up] - cur[lo]) / du;
        const double spp = i < last ? (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) / (dx * dx) : 0.0;
        grad.x() = 2.0 * r * su;
        hess.diagonal() << spp, 2.0 * su, 2.0 * su;
      }
      const Vec3 pos(r, 0.0, 0.0);
      const auto [best, code] = select(c_off[i], c_on[i], probes.size(), [&](std::size_t j) {
        return measurement_score(pos, grad, hess, probes[j]);
      });
      next[i] = cur[i] + plan.dt * best;
      codes[i] = code;
      check_finite(next[i]);
    }
    cur.swap(next);
    store(grid, k, cur, codes);
  }
  return grid;
}

struct AxisStencil {
  // Neighbor node indices (or npos) at -2, -1, +1, +2 along one axis.
  std::size_t m2, m1, p1, p2;
};

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

double first_derivative(const std::vector<double>& f, std::size_t i, const AxisStencil& a,
                        double dx) {
  if (a.m1 != npos && a.p1 != npos) return (f[a.p1] - f[a.m1]) / (2.0 * dx);
  if (a.m1 != npos && a.m2 != npos) return (3.0 * f[i] - 4.0 * f[a.m1] + f[a.m2]) / (2.0 * dx);
  if (a.p1 != npos && a.p2 != npos) return (-3.0 * f[i] + 4.0 * f[a.p1] - f[a.p2]) / (2.0 * dx);
  if (a.m1 != npos) return (f[i] - f[a.m1]) / dx;
  if (a.p1 != npos) return (f[a.p1] - f[i]) / dx;
  return 0.0;
}

double second_derivative(const std::vector<double>& f, std::size_t i, const AxisStencil& a,
                         double dx) {
  const double h2 = dx * dx;
  if (a.m1 != npos && a.p1 != npos) return (f[a.p1] - 2.0 * f[i] + f[a.m1]) / h2;
  if (a.m1 != npos && a.m2 != npos) return (f[i] - 2.0 * f[a.m1] + f[a.m2]) / h2;
  if (a.p1 != npos && a.p2 != npos) return (f[i] - 2.0 * f[a.p1] + f[a.p2]) / h2;
  return 0.0;
}

ValueGrid solve_ball(const MeasurementProblem& p, const HjbGridSpec& spec, std::size_t workers) {
  std::vector<Vec3> dirs = p.directions.empty() ? lattice_directions() : p.directions;
  for (const Vec3& d : dirs) {
    if (std::abs(d.norm() - 1.0) > 1e-12) throw InvalidArgument("probe directions must be unit");
  }
  const double s = p.strength;
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("probe strength must be >= 0");
  const double dt_max = s > 0.0 ? 0.25 * spec.dx * spec.dx / s
                                : std::numeric_limits<double>::infinity();
  const detail::TimePlan plan = detail::plan_time(spec, dt_max, "the parabolic CFL bound");

  GridDictionary dict;
  dict.family = ControlFamily::measurement_direction;
  dict.vectors = dirs;
  dict.strength = s;
  ValueGrid grid(GridMode::ball, spec.t0, plan.dt, plan.steps, spec.dx, dict, plan.store_every);
  const std::size_t nn = grid.node_count();
  const std::size_t na = grid.axis_nodes();
  const double dx = grid.dx();

  std::vector<ChannelSpec> probes;
  for (const Vec3& d : dirs) probes.push_back(ChannelSpec{d, s, 0.0, ChannelKind::observed});

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < nn; ++i) {
    if (grid.admissible(i)) active.push_back(i);
  }
  const std::size_t strides[3] = {na * na, na, 1};
  std::vector<std::array<AxisStencil, 3>> stencils(nn);
  for (std::size_t i : active) {
    for (int a = 0; a < 3; ++a) {
      const std::size_t idx = (i / strides[a]) % na;
      auto at = [&](long off) -> std::size_t {
        const long j = static_cast<long>(idx) + off;
        if (j < 0 || j >= static_cast<long>(na)) return npos;
        const std::size_t node = i + static_cast<std::size_t>(off * static_cast<long>(strides[a]));
        return grid.admissible(node) ? node : npos;
      };
      stencils[i][a] = {at(-2), at(-1), at(1), at(2)};
    }
  }

  std::vector<double> cur(nn, 0.0), next(nn, 0.0), c_off(nn, 0.0), c_on(nn, 0.0);
  std::vector<double> gx(nn, 0.0), gy(nn, 0.0), gz(nn, 0.0);
  std::vector<int> codes(nn, kPolicyOff);
  for (std::size_t i : active) {
    const Vec3 r = grid.node_position(i);
    cur[i] = finite_or_inf(p.costs.terminal(r));
    if (!std::isfinite(cur[i])) throw InvalidArgument("bequest must be finite on grid nodes");
    c_off[i] = finite_or_inf(p.costs.running(Control{Vec3::Zero(), {0.0}}, r));
    c_on[i] = finite_or_inf(p.costs.running(Control{Vec3::Zero(), {s}}, r));
  }
  next = cur;
  store(grid, plan.steps, cur, codes);

  const std::size_t blocks = (active.size() + kBlock - 1) / kBlock;
  auto for_active = [&](const auto& body) {
    parallel_for(blocks, workers, [&](std::size_t b) {
      const std::size_t end = std::min(active.size(), (b + 1) * kBlock);
      for (std::size_t q = b * kBlock; q < end; ++q) body(active[q]);
    });
  };

  for (std::size_t k = plan.steps; k-- > 0;) {
    for_active([&](std::size_t i) {
      gx[i] = first_derivative(cur, i, stencils[i][0], dx);
      gy[i] = first_derivative(cur, i, stencils[i][1], dx);
      gz[i] = first_derivative(cur, i, stencils[i][2], dx);
    });
    for_active([&](std::size_t i) {
      const auto& st = stencils[i];
      const Vec3 grad(gx[i], gy[i], gz[i]);
      Mat3 hess;
      hess(0, 0) = second_derivative(cur, i, st[0], dx);
      hess(1, 1) = second_derivative(cur, i, st[1], dx);
      hess(2, 2) = second_derivative(cur, i, st[2], dx);
      hess(0, 1) = hess(1, 0) =
          0.5 * (first_derivative(gx, i, st[1], dx) + first_derivative(gy, i, st[0], dx));
      hess(0, 2) = hess(2, 0) =
          0.5 * (first_derivative(gx, i, st[2], dx) + first_derivative(gz, i, st[0], dx));
      hess(1, 2) = hess(2, 1) =
          0.5 * (first_derivative(gy, i, st[2], dx) + first_derivative(gz, i, st[1], dx));
      const Vec3 pos = grid.node_position(i);
      const auto [best, code] = select(c_off[i], c_on[i], probes.size(), [&](std::size_t j) {
        return measurement_score(pos, grad, hess, probes[j]);
      });
      next[i] = cur[i] + plan.dt * best;
      codes[i] = code;
    });
    for (std::size_t i : active) check_finite(next[i]);
    cur.swap(next);
    store(grid, k, cur, codes);
  }
  return grid;
}

}  // namespace

std::vector<Vec3> lattice_directions() {
  std::vector<Vec3> out;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        const Vec3 v(a, b, c);
        if (v.isZero()) continue;
        // Keep one representative per +-pair: first nonzero component positive.
        const double lead = a != 0 ? a : (b != 0 ? b : c);
        if (lead > 0) out.push_back(v.normalized());
      }
    }
  }
  return out;
}

ValueGrid solve_measurement_hjb(const MeasurementProblem& problem, const HjbGridSpec& spec) {
  const std::size_t workers = spec.workers ? spec.workers : default_worker_count();
  return spec.mode == GridMode::radial ? solve_radial(problem, spec)
                                       : solve_ball(problem, spec, workers);
}

}  // namespace qdp
