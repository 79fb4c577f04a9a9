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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "qdp/error.hpp"
#include "qdp/filtersim.hpp"
#include "qdp/hjb.hpp"

namespace qdp {
namespace {

double sup_gap(const ValueGrid& g, double T) {
  double gap = 0.0;
  const auto v = g.values(0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double r = g.node_position(i).x();
    gap = std::max(gap, std::abs(v[i] - (1.0 - r * r) * std::exp(-T)));
  }
  return gap;
}

TEST(RadialHjb, PurificationPolicyAndValue) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 0.5;
  spec.dx = 0.05;
  const ValueGrid g = solve_measurement_hjb(p, spec);
  ASSERT_EQ(g.mode(), GridMode::radial);
  const std::size_t last = g.slice_count() - 1;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double r = g.node_position(i).x();
    EXPECT_EQ(g.values(last)[i], 1.0 - r * r);
  }
  for (std::size_t s = 0; s < last; ++s) {
    for (std::size_t i = 1; i + 1 < g.node_count(); ++i) EXPECT_EQ(g.policy(s)[i], 0);
  }
  EXPECT_LE(sup_gap(g, 0.5), 5e-3);
}

TEST(RadialHjb, RefinementConverges) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 0.3;
  spec.dx = 0.04;
  const double coarse = sup_gap(solve_measurement_hjb(p, spec), 0.3);
  spec.dx = 0.02;
  const double fine = sup_gap(solve_measurement_hjb(p, spec), 0.3);
  EXPECT_GE(coarse / fine, 1.8);
}

TEST(RadialHjb, ConstantBequestNeverMeasures) {
  MeasurementProblem p;
  p.costs.bequest = functional::constant(0.7);
  HjbGridSpec spec;
  spec.T = 0.2;
  spec.dx = 0.05;
  const ValueGrid g = solve_measurement_hjb(p, spec);
  for (std::size_t s = 0; s < g.slice_count(); ++s) {
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      EXPECT_EQ(g.values(s)[i], 0.7);
      EXPECT_EQ(g.policy(s)[i], kPolicyOff);
    }
  }
}

TEST(RadialHjb, UnstableStepIsRejected) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 0.1;
  spec.dx = 0.05;
  spec.dt = 0.01;
  EXPECT_THROW(solve_measurement_hjb(p, spec), StabilityError);
  spec.dx = 0.03;
  spec.dt.reset();
  EXPECT_THROW(solve_measurement_hjb(p, spec), InvalidArgument);
}

TEST(RadialHjb, ExtractedPolicyProbesOrthogonally) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 0.2;
  spec.dx = 0.05;
  auto g = std::make_shared<const ValueGrid>(solve_measurement_hjb(p, spec));
  const Policy pol = extract_policy(g);
  const Vec3 r(0.1, 0.3, -0.2);
  const ControlAction a = pol.act(0.05, r);
  ASSERT_EQ(a.channels.size(), 1u);
  EXPECT_NEAR(a.channels[0].direction.dot(r), 0.0, 1e-12);
  EXPECT_NEAR(a.channels[0].strength, 1.0, 1e-15);
}

TEST(BallHjb, MeasurementNeverIncreasesExpectedDeficit) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.mode = GridMode::ball;
  spec.T = 0.1;
  spec.dx = 0.25;
  const ValueGrid g = solve_measurement_hjb(p, spec);
  std::size_t active = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!g.admissible(i)) continue;
    const Vec3 r = g.node_position(i);
    EXPECT_LE(g.values(0)[i], 1.0 - r.squaredNorm() + 1e-12);
    active += g.policy(0)[i] != kPolicyOff;
  }
  EXPECT_GT(active, 0u);
}

TEST(DeterministicHjb, UnitaryControlCannotPurify) {
  DeterministicProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.mode = GridMode::ball;
  spec.T = 0.5;
  spec.dx = 0.1;
  const ValueGrid g = solve_deterministic_hjb(p, spec);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!g.admissible(i)) continue;
    EXPECT_NEAR(g.values(0)[i], 1.0 - g.node_position(i).squaredNorm(), 5e-3);
  }
}

TEST(DeterministicHjb, SteersToTarget) {
  DeterministicProblem p;
  p.costs = CostSpec::target_error(Vec3::UnitZ());
  HjbGridSpec spec;
  spec.mode = GridMode::ball;
  spec.T = M_PI;
  spec.dx = 0.05;
  auto g = std::make_shared<const ValueGrid>(solve_deterministic_hjb(p, spec));
  EXPECT_LE(g->value_at(0.0, Vec3::UnitX()), 0.02);
  const Policy pol = extract_policy(g);
  const auto rec = integrate_me(BlochState(Vec3::UnitX()), pol, TimeGrid{0.0, g->horizon(), g->dt() / 10});
  EXPECT_LE((rec.states.back() - Vec3::UnitZ()).norm(), 0.05);
}

TEST(ClosedForm, CandidateResiduals) {
  const double T = 1.0;
  const auto printed = [T](double t, double r) { return 1.0 - r * r * std::exp(-(T - t)); };
  const auto fk = [T](double t, double r) { return (1.0 - r * r) * std::exp(-(T - t)); };
  const auto a = verify_closed_form("printed", printed, ReducedEquation::paper_reduced);
  const auto b = verify_closed_form("fk", fk, ReducedEquation::generator_backward);
  EXPECT_EQ(a.t.size(), 200u);
  EXPECT_EQ(a.r.size(), 200u);
  EXPECT_LE(a.max_abs, 1e-6);
  EXPECT_LE(b.max_abs, 1e-6);
  // Crossing the pairs exposes the mismatch between the two equations.
  EXPECT_GT(verify_closed_form("x", printed, ReducedEquation::generator_backward).max_abs, 0.1);
  EXPECT_GT(verify_closed_form("y", fk, ReducedEquation::paper_reduced).max_abs, 0.1);
}

TEST(ValueGridTest, InterpolationReproducesNodes) {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 0.1;
  spec.dx = 0.1;
  const ValueGrid g = solve_measurement_hjb(p, spec);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    EXPECT_NEAR(g.value_at_slice(0, g.node_position(i)), g.values(0)[i], 1e-15);
  }
  EXPECT_EQ(g.slice_of_step(0), 0u);
  EXPECT_NEAR(g.slice_time(g.slice_count() - 1), 0.1, 1e-12);
}

TEST(LatticeDirections, ThirteenDistinctAxes) {
  const auto d = lattice_directions();
  ASSERT_EQ(d.size(), 13u);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_NEAR(d[i].norm(), 1.0, 1e-14);
    for (std::size_t j = 0; j < i; ++j) EXPECT_LT(std::abs(d[i].dot(d[j])), 1.0 - 1e-9);
  }
}

}  // namespace
}  // namespace qdp
