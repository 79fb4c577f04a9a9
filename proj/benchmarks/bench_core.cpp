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

#include <benchmark/benchmark.h>

#include "qdp/functionals.hpp"
#include "qdp/hjb.hpp"
#include "qdp/noise.hpp"

namespace {

using qdp::Vec3;

void BM_philox_normal(benchmark::State& state) {
  const qdp::NoiseKey key{1, 2};
  std::uint64_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qdp::standard_normal(key, step++, 0));
}
BENCHMARK(BM_philox_normal);

void BM_step_sme(benchmark::State& state) {
  const auto scheme = state.range(0) ? qdp::Scheme::milstein : qdp::Scheme::euler_maruyama;
  const qdp::Policy policy = qdp::make_policy(qdp::PolicyKind::orthogonal_adaptive);
  qdp::ControlAction action;
  Vec3 r(0.6, 0.1, -0.2);
  const double dW[1] = {0.003};
  for (auto _ : state) {
    policy.act(0.0, r, action);
    benchmark::DoNotOptimize(qdp::step_sme(r, action, 1e-4, dW, scheme));
  }
}
BENCHMARK(BM_step_sme)->Arg(0)->Arg(1);

void BM_trajectory(benchmark::State& state) {
  qdp::SimulationConfig cfg;
  cfg.r0 = Vec3(0.6, 0, 0);
  cfg.policy = state.range(0) ? qdp::make_policy(qdp::PolicyKind::orthogonal_adaptive)
                              : qdp::make_policy(qdp::PolicyKind::fixed_axis);
  cfg.grid = {0.0, 1.0, 1e-4};
  cfg.n_traj = 1;
  cfg.functionals = {qdp::functional::purity_deficit()};
  cfg.sample_every = 10000;
  cfg.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(qdp::simulate_ensemble(cfg));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_trajectory)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_generator(benchmark::State& state) {
  const auto f = qdp::functional::purity_deficit();
  const qdp::BlochState r(Vec3(0.3, 0.4, 0.2));
  const qdp::ChannelSpec c = qdp::ChannelSpec::observed(Vec3::UnitZ(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qdp::generator(f, r, {}, std::span<const qdp::ChannelSpec>(&c, 1)));
  }
}
BENCHMARK(BM_generator);

void BM_radial_hjb(benchmark::State& state) {
  qdp::MeasurementProblem p;
  p.costs = qdp::CostSpec::purification();
  qdp::HjbGridSpec spec;
  spec.dx = 1.0 / static_cast<double>(state.range(0));
  spec.T = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(qdp::solve_measurement_hjb(p, spec));
}
BENCHMARK(BM_radial_hjb)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_deterministic_hjb(benchmark::State& state) {
  qdp::DeterministicProblem p;
  p.costs = qdp::CostSpec::purification();
  qdp::HjbGridSpec spec;
  spec.mode = qdp::GridMode::ball;
  spec.dx = 0.1;
  spec.T = 0.2;
  spec.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(qdp::solve_deterministic_hjb(p, spec));
}
BENCHMARK(BM_deterministic_hjb)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
