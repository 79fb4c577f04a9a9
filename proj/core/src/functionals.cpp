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

#include "qdp/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdp/error.hpp"
#include "qdp/filtersim.hpp"
#include "qdp/noise.hpp"

namespace qdp {

GeneratorBreakdown generator(const StateFunctional& f, const BlochState& state,
                             const HamiltonianSpec& hamiltonian,
                             std::span<const ChannelSpec> channels) {
  const Vec3& r = state.vec();
  GeneratorBreakdown out;
  out.drift_term = qubit_drift(hamiltonian, channels, r).dot(gradient_of(f, r));
  bool observed = false;
  for (const auto& c : channels) observed = observed || (c.is_observed() && c.strength > 0.0);
  if (observed) {
    const Mat3 h = hessian_of(f, r);
    for (const auto& c : channels) {
      if (!c.is_observed() || c.strength == 0.0) continue;
      const Vec3 l = qubit_fluctuation(c, r);
      out.ito_term += 0.5 * l.dot(h * l);
    }
  }
  out.total = out.drift_term + out.ito_term;
  return out;
}

GeneratorBreakdown generator_general_direction(const StateFunctional& f, const BlochState& state,
                                               const Vec3& n, double lambda) {
  if (!f.is_radial()) throw InvalidArgument("closed-form generator needs a radial functional");
  const double rho = state.norm();
  if (rho == 0.0) throw InvalidArgument("closed-form generator is singular at r = 0");
  const double f1 = f.radial->first(rho);
  const double f2 = f.radial->second(rho);
  const double a = n.dot(state.vec());
  const double lam2 = lambda * lambda;
  const double one_m = 1.0 - rho * rho;

  GeneratorBreakdown out;
  out.total = lam2 / (2.0 * rho * rho) * one_m *
              (rho * f1 * (1.0 - a * a) + (f2 - f1 / rho) * a * a * one_m);
  // The drift is -(lambda^2/2)(r - (n.r) n), whose radial part pairs with f' r_hat.
  out.drift_term = -0.5 * lam2 * (rho * rho - a * a) / rho * f1;
  out.ito_term = out.total - out.drift_term;
  return out;
}

McEstimate mc_generator_estimate(const StateFunctional& f, const BlochState& state,
                                 const HamiltonianSpec& hamiltonian,
                                 std::span<const ChannelSpec> channels, double h,
                                 std::size_t n_traj, std::uint64_t seed) {
  if (!(h > 0.0)) throw InvalidArgument("window length must be positive");
  if (n_traj == 0) throw InvalidArgument("n_traj must be at least 1");
  ControlAction action;
  action.field = hamiltonian.field;
  action.subspace = hamiltonian.subspace;
  action.channels.assign(channels.begin(), channels.end());

  const Vec3& r = state.vec();
  const double f0 = f(r);
  const double sh = std::sqrt(h);
  std::vector<double> plus(channels.size()), minus(channels.size());
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_traj; ++i) {
    const NoiseKey key{seed, i};
    for (std::size_t j = 0; j < channels.size(); ++j) {
      plus[j] = sh * standard_normal(key, 0, static_cast<std::uint32_t>(j));
      minus[j] = -plus[j];
    }
    const double x = 0.5 * (f(step_sme(r, action, h, plus)) + f(step_sme(r, action, h, minus)));
    const double d = x - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x - mean);
  }
  McEstimate est;
  est.samples = n_traj;
  est.mean = (mean - f0) / h;
  const double var = n_traj > 1 ? m2 / static_cast<double>(n_traj - 1) : 0.0;
  est.standard_error = std::sqrt(var / static_cast<double>(n_traj)) / h;
  return est;
}

namespace {

struct OrthoParts {
  Vec3 rhat;
  Vec3 e;
  Vec3 eperp;
  double eperp_norm;
  double rho;
};

OrthoParts ortho_parts(const Vec3& r) {
  OrthoParts p;
  p.rho = r.norm();
  p.rhat = r / p.rho;
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(r[i]) < std::abs(r[k])) k = i;
  }
  p.e = Vec3::Unit(k);
  p.eperp = p.e - p.e.dot(p.rhat) * p.rhat;
  p.eperp_norm = p.eperp.norm();
  return p;
}

}  // namespace

Vec3 orthogonal_direction(const Vec3& r) {
  if (r.norm() < 1e-12) return Vec3::UnitZ();
  const OrthoParts p = ortho_parts(r);
  return p.eperp / p.eperp_norm;
}

Mat3 orthogonal_direction_jacobian(const Vec3& r) {
  if (r.norm() < 1e-12) return Mat3::Zero();
  const OrthoParts p = ortho_parts(r);
  const Vec3 n = p.eperp / p.eperp_norm;
  const Mat3 perp = Mat3::Identity() - p.rhat * p.rhat.transpose();
  const Mat3 nperp = Mat3::Identity() - n * n.transpose();
  return -(p.rhat * (p.e.transpose() * perp) + p.e.dot(p.rhat) * nperp * perp) /
         (p.rho * p.eperp_norm);
}

DirectionChoice local_optimal_direction(const StateFunctional& f, const BlochState& state) {
  if (!f.is_radial()) throw InvalidArgument("local_optimal_direction needs a radial functional");
  const Vec3& r = state.vec();
  const double rho = state.norm();
  DirectionChoice out;
  const HamiltonianSpec none;
  if (rho < 1e-12) {
    out.direction = Vec3::UnitZ();
    const ChannelSpec c = ChannelSpec::observed(out.direction, 1.0);
    out.generator = generator(f, state, none, std::span<const ChannelSpec>(&c, 1)).total;
    out.hypotheses_hold = f.radial->second(0.0) < 0.0;
    return out;
  }
  const double f1 = f.radial->first(rho);
  const double f2 = f.radial->second(rho);
  out.hypotheses_hold = f1 <= 0.0 && f2 < 0.0;
  // The generator is affine in (n.r)^2 with this slope (up to a positive factor).
  const double slope = (1.0 - rho * rho) * (f2 - f1 / rho) - rho * f1;
  out.orthogonal = slope >= 0.0;
  out.direction = out.orthogonal ? orthogonal_direction(r) : Vec3(r / rho);
  out.generator = generator_general_direction(f, state, out.direction, 1.0).total;
  return out;
}

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(s * std::cos(phi), s * std::sin(phi), z);
  }
  return pts;
}

ScanResult scan_directions(const StateFunctional& f, const BlochState& state, double lambda,
                           std::size_t samples) {
  const HamiltonianSpec none;
  auto objective = [&](const Vec3& n) {
    const ChannelSpec c{n, lambda * lambda, 0.0, ChannelKind::observed};
    return generator(f, state, none, std::span<const ChannelSpec>(&c, 1)).total;
  };
  ScanResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const Vec3& n : fibonacci_sphere(samples)) {
    const double v = objective(n);
    if (v < best.value) {
      best.value = v;
      best.direction = n;
    }
  }
  // Pattern search on the sphere in a tangent frame of the incumbent.
  std::size_t iterations = 0;
  for (double step = 0.05; step > 1e-12 && iterations < 20000; ++iterations) {
    const Vec3& n = best.direction;
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 t1 = n.cross(helper).normalized();
    const Vec3 t2 = n.cross(t1);
    bool improved = false;
    for (const Vec3& d : {t1, Vec3(-t1), t2, Vec3(-t2)}) {
      const Vec3 cand = (n + step * d).normalized();
      const double v = objective(cand);
      if (v < best.value) {
        best.value = v;
        best.direction = cand;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace qdp
