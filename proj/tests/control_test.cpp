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
#include <random>

#include "qdp/control.hpp"
#include "qdp/error.hpp"
#include "qdp/filtersim.hpp"

namespace qdp {
namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

TEST(Cost, InfinitySaturates) {
  const Cost inf = Cost::infinite();
  EXPECT_TRUE((inf + Cost(3.0)).is_infinite());
  EXPECT_TRUE((0.0 * inf).is_infinite());
  EXPECT_TRUE((-2.0 * inf).is_infinite());
  EXPECT_EQ(min(inf, Cost(1.0)).value(), 1.0);
  EXPECT_EQ((Cost(1.5) + Cost(2.0)).value(), 3.5);
}

TEST(Constraint, SimplexBallBinaryPairSum) {
  Control u;
  u.strengths = {0.25, 0.75};
  EXPECT_TRUE(ControlConstraint::simplex().contains(u));
  EXPECT_TRUE(ControlConstraint::pair_sum().contains(u));
  EXPECT_FALSE(ControlConstraint::binary().contains(u));
  u.strengths = {0.5, 0.75};
  EXPECT_FALSE(ControlConstraint::simplex().contains(u));
  u.strengths = {-0.1};
  EXPECT_FALSE(ControlConstraint::simplex().contains(u));
  u.strengths = {0.0, 1.0};
  EXPECT_TRUE(ControlConstraint::binary().contains(u));
  u.field = Vec3(0.6, 0.8, 0.0);
  EXPECT_TRUE(ControlConstraint::ball(1.0).contains(u));
  EXPECT_FALSE(ControlConstraint::ball(0.9).contains(u));
  EXPECT_TRUE(indicator(ControlConstraint::ball(0.9), u).is_infinite());
  EXPECT_EQ(indicator(ControlConstraint::ball(1.0), u).value(), 0.0);
}

TEST(CostSpec, Bequests) {
  const CostSpec pur = CostSpec::purification();
  EXPECT_NEAR(pur.terminal(Vec3(0.6, 0, 0)).value(), 0.64, 1e-15);
  const CostSpec target = CostSpec::target_error(Vec3::UnitZ());
  EXPECT_NEAR(target.terminal(Vec3::UnitZ()).value(), 0.0, 1e-15);
  EXPECT_NEAR(target.terminal(-Vec3::UnitZ()).value(), 1.0, 1e-15);
  EXPECT_NEAR(target.terminal(Vec3::Zero()).value(), 0.5, 1e-15);
}

TEST(CostSpec, ConcaveProjectionMinimizesOverBall) {
  const CostSpec c = CostSpec::concave_projection(1.0, ControlSubspace(), 4000);
  const Vec3 r(0.3, -0.4, 0.0);
  // min over |u| <= 1 of u . r is -|r|, attained at u = -r_hat.
  EXPECT_NEAR(c.terminal(r).value(), -0.5, 1e-4);
  const Control u = c.terminal_minimizer(r);
  EXPECT_NEAR(u.field.dot(r.normalized()), -1.0, 1e-3);
}

TEST(CostFunctional, LeftEndpointSumPlusBequest) {
  CostSpec costs = CostSpec::purification();
  costs.cost_scalar = [](const Control& u) { return Cost(u.field.squaredNorm()); };
  TrajectoryRecord traj;
  for (int k = 0; k <= 4; ++k) {
    traj.times.push_back(0.25 * k);
    traj.states.push_back(Vec3(0.5, 0, 0));
    traj.controls.push_back(Control{Vec3(k, 0, 0), {}});
  }
  // 0.25 * (0 + 1 + 4 + 9) + 0.75
  EXPECT_NEAR(evaluate_cost_functional(traj, costs).value(), 3.5 + 0.75, 1e-14);
  EXPECT_TRUE(evaluate_cost_functional(traj, costs, ControlConstraint::ball(2.0)).is_infinite());
}

TEST(Pontryagin, BangBangNormalization) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CostSpec none;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 q(u(rng), u(rng), u(rng));
    const Costate p{Vec3(u(rng), u(rng), u(rng)), u(rng)};
    const double radius = 0.5 + std::abs(u(rng));
    const PontryaginResult res =
        pontryagin_hamiltonian(q, p, none, ControlConstraint::ball(radius), 1.0);
    const Vec3 expected = radius * q.cross(p.vec).normalized();
    EXPECT_LT((res.control - expected).norm(), 1e-12);
  }
}

TEST(Pontryagin, SubspaceProjection) {
  const Vec3 q(0.2, 0.1, -0.3);
  const Costate p{Vec3(0.5, -0.2, 0.4), 0.0};
  const ControlSubspace xy({true, true, false});
  const PontryaginResult res =
      pontryagin_hamiltonian(q, p, CostSpec{}, ControlConstraint::ball(1.0), 1.0, xy);
  const Vec3 proj = xy.project(q.cross(p.vec));
  EXPECT_LT((res.control - proj.normalized()).norm(), 1e-12);
  EXPECT_EQ(res.control.z(), 0.0);
}

TEST(Pontryagin, ScalarCostateNeverMatters) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 q(0.3, -0.1, 0.2);
  const Vec3 pv(0.4, 0.5, -0.6);
  const std::vector<ChannelSpec> ch{ChannelSpec::unobserved(Vec3::UnitZ(), 1.0)};
  const auto base = pontryagin_hamiltonian_numeric(q, {pv, 0.0}, CostSpec{},
                                                   ControlConstraint::ball(1.0), ch);
  for (int i = 0; i < 20; ++i) {
    const double c = 10.0 * u(rng);
    EXPECT_EQ(pontryagin_hamiltonian(q, {pv, c}, CostSpec{}, ControlConstraint::ball(1.0), 1.0).value,
              pontryagin_hamiltonian(q, {pv, 0.0}, CostSpec{}, ControlConstraint::ball(1.0), 1.0).value);
    const auto shifted = pontryagin_hamiltonian_numeric(q, {pv, c}, CostSpec{},
                                                        ControlConstraint::ball(1.0), ch);
    EXPECT_NEAR(shifted.value, base.value, 1e-12);
  }
}

TEST(Pontryagin, NumericMatchesClosedForm) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 q = 0.9 * random_unit(rng) * std::abs(u(rng));
    const Costate p{Vec3(u(rng), u(rng), u(rng)), 0.0};
    const double lam = 0.5 + std::abs(u(rng));
    const ChannelSpec c = ChannelSpec::unobserved(Vec3::UnitZ(), lam * lam);
    const auto closed = pontryagin_hamiltonian(q, p, CostSpec{}, ControlConstraint::ball(1.0), lam);
    const auto numeric = pontryagin_hamiltonian_numeric(q, p, CostSpec{}, ControlConstraint::ball(1.0),
                                                        std::span<const ChannelSpec>(&c, 1));
    EXPECT_NEAR(numeric.value, closed.value, 1e-8);
  }
}

TEST(Pontryagin, RejectsNonBallConstraint) {
  EXPECT_THROW(pontryagin_hamiltonian(Vec3::UnitX(), {}, CostSpec{}, ControlConstraint::simplex(), 1.0),
               InvalidArgument);
}

TEST(Bellman, OrthogonalProbeScoresHighestForPurification) {
  const Vec3 r(0.0, 0.0, 0.6);
  const Vec3 grad = -2.0 * r;
  const Mat3 hess = -2.0 * Mat3::Identity();
  const std::vector<ChannelSpec> ch{ChannelSpec::observed(Vec3::UnitZ(), 1.0),
                                    ChannelSpec::observed(Vec3::UnitX(), 1.0),
                                    ChannelSpec::observed(Vec3(0, 1, 1).normalized(), 1.0)};
  EXPECT_NEAR(measurement_score(r, grad, hess, ch[1]), 1.0 - 0.36, 1e-15);
  const BellmanResult b = bellman_measurement_hamiltonian(r, grad, hess, ch);
  EXPECT_EQ(b.selected, 1);
  EXPECT_EQ(b.strengths, (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_NEAR(b.value, 0.64, 1e-15);
  EXPECT_EQ(switching_rule(r, grad, hess, ch[1]), 1);
  EXPECT_EQ(min_hessian_rule(r, hess, ch), 1u);
}

TEST(Bellman, NonPositiveScoresSwitchOff) {
  const BellmanResult b = reduce_scores({-0.1, 0.0, 1e-13});
  EXPECT_EQ(b.selected, kPolicyOff);
  EXPECT_EQ(b.value, 0.0);
  const Vec3 r(0.2, 0, 0);
  EXPECT_EQ(switching_rule(r, Vec3::Zero(), Mat3::Zero(), ChannelSpec::observed(Vec3::UnitZ(), 1.0)),
            0);
}

TEST(Bellman, RejectsNonSimplexConstraint) {
  EXPECT_THROW(bellman_measurement_hamiltonian(Vec3::Zero(), Vec3::Zero(), Mat3::Zero(), {},
                                               ControlConstraint::ball()),
               InvalidArgument);
}

TEST(FieldDictionary, ZeroFirstThenUnitDirections) {
  const auto full = field_dictionary(ControlConstraint::ball(2.0), ControlSubspace());
  ASSERT_EQ(full.size(), 27u);
  EXPECT_EQ(full.front(), Vec3::Zero());
  for (std::size_t i = 1; i < full.size(); ++i) EXPECT_NEAR(full[i].norm(), 2.0, 1e-14);
  const auto x = field_dictionary(ControlConstraint::ball(1.0), ControlSubspace({true, false, false}));
  EXPECT_EQ(x.size(), 3u);
}

}  // namespace
}  // namespace qdp
