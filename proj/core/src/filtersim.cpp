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

#include "qdp/filtersim.hpp"

#include <algorithm>
#include <cmath>

#include "qdp/error.hpp"
#include "qdp/parallel.hpp"

namespace qdp {

namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr std::size_t kChunk = 64;

double signal_rate(const ChannelSpec& c, const Vec3& r) {
  return c.is_observed() ? std::sqrt(c.strength) * c.direction.dot(r) : 0.0;
}

Vec3 rk4_step(const ControlAction& a, const Vec3& r, double dt) {
  const HamiltonianSpec h = a.hamiltonian();
  const Vec3 k1 = qubit_drift(h, a.channels, r);
  const Vec3 k2 = qubit_drift(h, a.channels, r + 0.5 * dt * k1);
  const Vec3 k3 = qubit_drift(h, a.channels, r + 0.5 * dt * k2);
  const Vec3 k4 = qubit_drift(h, a.channels, r + dt * k3);
  return r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TrajectoryRecord run_me(const BlochState& r0, const TimeGrid& grid,
                        const std::function<void(double, const Vec3&, ControlAction&)>& control) {
  const std::size_t n = grid.steps();
  TrajectoryRecord rec;
  rec.times.reserve(n + 1);
  rec.states.reserve(n + 1);
  rec.controls.reserve(n + 1);
  ControlAction action;
  Vec3 r = r0.vec();
  for (std::size_t k = 0;; ++k) {
    const double t = grid.time(k);
    control(t, r, action);
    rec.times.push_back(t);
    rec.states.push_back(project_physical(r));
    rec.controls.push_back(Control::from(action));
    if (k == n) break;
    r = rk4_step(action, r, grid.dt);
    if (!r.allFinite() || r.norm() > 1.01) {
      throw StabilityError("master equation step " + std::to_string(k) + " left the Bloch ball (|r| = " +
                           std::to_string(r.norm()) + "); reduce dt");
    }
  }
  return rec;
}

// Derivative of the fluctuation lambda (n(r) - (n(r).r) r) along v, where
// J = dn/dr (zero for a direction held over the step).
Vec3 fluctuation_derivative(double lambda, const Vec3& n, const Mat3* J, const Vec3& r,
                            const Vec3& v) {
  Vec3 d = -(n.dot(v) * r + n.dot(r) * v);
  if (J) {
    const Vec3 jv = *J * v;
    d += jv - jv.dot(r) * r;
  }
  return lambda * d;
}

}  // namespace

std::size_t TimeGrid::steps() const {
  validate();
  return static_cast<std::size_t>(std::llround((T - t0) / dt));
}

void TimeGrid::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(T) || !std::isfinite(dt)) {
    throw InvalidArgument("time grid must be finite");
  }
  if (!(t0 < T)) throw InvalidArgument("time grid requires t0 < T");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double n = (T - t0) / dt;
  if (std::abs(n - std::round(n)) > 1e-9) {
    throw InvalidArgument("time step must divide the horizon");
  }
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::milstein ? "milstein" : "euler_maruyama";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "milstein") return Scheme::milstein;
  if (name == "euler_maruyama") return Scheme::euler_maruyama;
  throw InvalidArgument("unknown scheme: " + name);
}

TrajectoryRecord integrate_me(const BlochState& r0, const OpenLoopControl& control,
                              const TimeGrid& grid) {
  return run_me(r0, grid, [&](double t, const Vec3&, ControlAction& a) {
    a.clear();
    control(t, a);
  });
}

TrajectoryRecord integrate_me(const BlochState& r0, const ControlAction& control,
                              const TimeGrid& grid) {
  return run_me(r0, grid, [&](double, const Vec3&, ControlAction& a) { a = control; });
}

TrajectoryRecord integrate_me(const BlochState& r0, const Policy& policy, const TimeGrid& grid,
                              std::span<const ChannelSpec> background) {
  return run_me(r0, grid, [&](double t, const Vec3& r, ControlAction& a) {
    policy.act(t, r, a);
    a.channels.insert(a.channels.end(), background.begin(), background.end());
  });
}

Vec3 project_physical(const Vec3& r) {
  const double n = r.norm();
  return n > 1.0 ? Vec3(r / n) : r;
}

Vec3 step_sme(const Vec3& r, const ControlAction& action, double dt, std::span<const double> dW,
              Scheme scheme) {
  const auto& ch = action.channels;
  if (dW.size() != ch.size()) {
    throw DimensionMismatch("one Wiener increment per channel is required");
  }
  Vec3 next = r + qubit_drift(action.hamiltonian(), ch, r) * dt;

  // Fluctuation vectors of active observed channels (at most a handful).
  constexpr std::size_t kMax = 16;
  Vec3 b[kMax];
  double lam[kMax];
  std::size_t idx[kMax];
  std::size_t m = 0;
  for (std::size_t j = 0; j < ch.size(); ++j) {
    if (!ch[j].is_observed() || ch[j].strength == 0.0) continue;
    if (m == kMax) throw InvalidArgument("too many observed channels in one step");
    lam[m] = std::sqrt(ch[j].strength);
    b[m] = lam[m] * (ch[j].direction - ch[j].direction.dot(r) * r);
    idx[m] = j;
    next += b[m] * dW[j];
    ++m;
  }

  if (scheme == Scheme::milstein && m > 0) {
    // A feedback direction that turns faster than the step's noise amplitude
    // resolves (|J| lam sqrt(dt) > kSmooth, e.g. near the singular point of
    // an orthogonal probe) is treated as frozen for the correction; using its
    // Jacobian there biases the mean through O(dt^2 |J|^2) terms.
    constexpr double kSmooth = 0.1;
    const bool has_j = action.direction_jacobians.size() == ch.size();
    const Mat3* jac[kMax];
    for (std::size_t k = 0; k < m; ++k) {
      const Mat3* J = has_j ? &action.direction_jacobians[idx[k]] : nullptr;
      jac[k] = J && lam[k] * std::sqrt(dt) * J->norm() <= kSmooth ? J : nullptr;
    }
    auto deriv = [&](std::size_t k, const Vec3& v) {
      return fluctuation_derivative(lam[k], ch[idx[k]].direction, jac[k], r, v);
    };
    for (std::size_t a = 0; a < m; ++a) {
      const double wa = dW[idx[a]];
      next += 0.5 * (wa * wa - dt) * deriv(a, b[a]);
      for (std::size_t c = a + 1; c < m; ++c) {
        next += 0.5 * wa * dW[idx[c]] * (deriv(c, b[a]) + deriv(a, b[c]));
      }
    }
  }
  return project_physical(next);
}

namespace {

struct StepSink {
  virtual ~StepSink() = default;
  virtual void sample(std::size_t k, double t, const Vec3& r, const ControlAction& a,
                      std::span<const double> y, std::span<const double> w,
                      std::span<const double> signal) = 0;
};

void check_action(const Policy& policy, const ControlAction& a, std::size_t slots, std::size_t k,
                  Control& scratch) {
  if (a.channels.size() != slots) {
    throw TrajectoryAborted(k, "policy emitted " + std::to_string(a.channels.size()) +
                                   " channels, expected " + std::to_string(slots));
  }
  for (const auto& c : a.channels) {
    if (!c.direction.allFinite() || std::abs(c.direction.norm() - 1.0) > kUnitTolerance) {
      throw TrajectoryAborted(k, "policy emitted a non-unit probe direction");
    }
    if (!std::isfinite(c.strength)) throw TrajectoryAborted(k, "non-finite probe strength");
  }
  if (!a.field.allFinite()) throw TrajectoryAborted(k, "non-finite field");
  scratch.field = a.field;
  scratch.strengths.clear();
  for (const auto& c : a.channels) scratch.strengths.push_back(c.strength);
  if (!policy.constraint().contains(scratch)) {
    throw TrajectoryAborted(k, "control violates constraint " + policy.constraint().describe());
  }
}

void run_sde(const SimulationConfig& cfg, std::uint64_t traj, StepSink& sink) {
  const std::size_t n = cfg.grid.steps();
  const double dt = cfg.grid.dt;
  const double sdt = std::sqrt(dt);
  const std::size_t policy_slots = cfg.policy.slot_count();
  const std::size_t slots = policy_slots + cfg.background.size();
  const std::size_t every = std::max<std::size_t>(1, cfg.sample_every);
  const NoiseKey key{cfg.master_seed, traj};

  std::vector<double> dW(slots, 0.0), y(slots, 0.0), w(slots, 0.0), sig(slots, 0.0);
  ControlAction action;
  Control scratch;
  Vec3 r = project_physical(cfg.r0);

  for (std::size_t k = 0;; ++k) {
    const double t = cfg.grid.time(k);
    cfg.policy.act(t, r, action);
    check_action(cfg.policy, action, policy_slots, k, scratch);
    if (!cfg.background.empty()) {
      action.channels.insert(action.channels.end(), cfg.background.begin(), cfg.background.end());
      if (!action.direction_jacobians.empty()) {
        action.direction_jacobians.resize(slots, Mat3::Zero());
      }
    }
    if (k % every == 0 || k == n) sink.sample(k, t, r, action, y, w, sig);
    if (k == n) break;

    for (std::size_t j = 0; j < slots; ++j) {
      const ChannelSpec& c = action.channels[j];
      if (!c.is_observed() || c.strength == 0.0) {
        dW[j] = 0.0;
        continue;
      }
      dW[j] = sdt * standard_normal(key, k, static_cast<std::uint32_t>(j));
      const double predicted = signal_rate(c, r) * dt;
      const double dy = dW[j] + predicted;
      y[j] += dy;
      sig[j] += predicted;
      w[j] += dy - predicted;
    }
    r = step_sme(r, action, dt, dW, cfg.scheme);
  }
}

struct RecordSink final : StepSink {
  TrajectoryRecord rec;
  void sample(std::size_t, double t, const Vec3& r, const ControlAction& a,
              std::span<const double> y, std::span<const double> w,
              std::span<const double> signal) override {
    rec.times.push_back(t);
    rec.states.push_back(r);
    rec.controls.push_back(Control::from(a));
    if (rec.y.empty()) {
      rec.y.resize(y.size());
      rec.w.resize(y.size());
      rec.signal.resize(y.size());
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
      rec.y[j].push_back(y[j]);
      rec.w[j].push_back(w[j]);
      rec.signal[j].push_back(signal[j]);
    }
  }
};

struct FunctionalSink final : StepSink {
  const std::vector<StateFunctional>* fs = nullptr;
  std::vector<double> values;  // [f][sample]
  std::size_t n_samples = 0;
  std::size_t next = 0;
  void sample(std::size_t, double, const Vec3& r, const ControlAction&, std::span<const double>,
              std::span<const double>, std::span<const double>) override {
    for (std::size_t f = 0; f < fs->size(); ++f) values[f * n_samples + next] = (*fs)[f](r);
    ++next;
  }
};

struct Accumulator {
  double count = 0.0;
  std::vector<double> mean;  // [f][sample]
  std::vector<double> m2;

  void add(std::span<const double> x) {
    count += 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean[i];
      mean[i] += d / count;
      m2[i] += d * (x[i] - mean[i]);
    }
  }
  void merge(const Accumulator& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double n = count + o.count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = o.mean[i] - mean[i];
      mean[i] += d * o.count / n;
      m2[i] += o.m2[i] + d * d * count * o.count / n;
    }
    count = n;
  }
};

}  // namespace

TrajectoryRecord simulate_trajectory(const SimulationConfig& config, std::uint64_t trajectory) {
  RecordSink sink;
  run_sde(config, trajectory, sink);
  return std::move(sink.rec);
}

double EnsembleStats::standard_error(std::size_t f, std::size_t k) const {
  if (n_traj == 0) return 0.0;
  return std::sqrt(variance.at(f).at(k) / static_cast<double>(n_traj));
}

EnsembleStats simulate_ensemble(const SimulationConfig& config) {
  if (config.n_traj == 0) throw InvalidArgument("n_traj must be at least 1");
  const std::size_t n = config.grid.steps();
  const std::size_t every = std::max<std::size_t>(1, config.sample_every);

  EnsembleStats stats;
  stats.master_seed = config.master_seed;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k % every == 0 || k == n) stats.times.push_back(config.grid.time(k));
  }
  for (const auto& f : config.functionals) stats.names.push_back(f.name);
  const std::size_t ns = stats.times.size();
  const std::size_t nf = config.functionals.size();

  const std::size_t chunks = (config.n_traj + kChunk - 1) / kChunk;
  std::vector<Accumulator> acc(chunks);
  std::vector<std::vector<Violation>> violations(chunks);
  std::vector<double> terminal(config.keep_terminal ? nf * config.n_traj : 0,
                               std::numeric_limits<double>::quiet_NaN());

  const std::size_t workers = config.workers ? config.workers : default_worker_count();
  parallel_for(chunks, workers, [&](std::size_t c) {
    Accumulator& a = acc[c];
    a.mean.assign(nf * ns, 0.0);
    a.m2.assign(nf * ns, 0.0);
    FunctionalSink sink;
    sink.fs = &config.functionals;
    sink.n_samples = ns;
    sink.values.assign(nf * ns, 0.0);
    const std::size_t end = std::min(config.n_traj, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      sink.next = 0;
      try {
        run_sde(config, i, sink);
      } catch (const TrajectoryAborted& e) {
        violations[c].push_back({i, e.step(), e.what()});
        continue;
      }
      a.add(sink.values);
      if (config.keep_terminal) {
        for (std::size_t f = 0; f < nf; ++f) {
          terminal[f * config.n_traj + i] = sink.values[f * ns + ns - 1];
        }
      }
    }
  });

  Accumulator total;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.merge(acc[c]);
    stats.violations.insert(stats.violations.end(), violations[c].begin(), violations[c].end());
  }
  stats.n_traj = static_cast<std::size_t>(total.count);
  stats.mean.assign(nf, std::vector<double>(ns, 0.0));
  stats.variance.assign(nf, std::vector<double>(ns, 0.0));
  for (std::size_t f = 0; f < nf && total.count > 0.0; ++f) {
    for (std::size_t k = 0; k < ns; ++k) {
      stats.mean[f][k] = total.mean[f * ns + k];
      stats.variance[f][k] =
          total.count > 1.0 ? std::max(0.0, total.m2[f * ns + k] / (total.count - 1.0)) : 0.0;
    }
  }
  if (config.keep_terminal) {
    stats.terminal.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      stats.terminal[f].assign(terminal.begin() + static_cast<std::ptrdiff_t>(f * config.n_traj),
                               terminal.begin() + static_cast<std::ptrdiff_t>((f + 1) * config.n_traj));
    }
  }
  return stats;
}

}  // namespace qdp
