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

#include <atomic>
#include <cmath>
#include <random>

#include "qdp/dynamics.hpp"
#include "qdp/error.hpp"
#include "qdp/noise.hpp"
#include "qdp/parallel.hpp"

namespace qdp {
namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

TEST(Drift, BlochFormMatchesMatrixForm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = u(rng) * random_unit(rng);
    HamiltonianSpec h;
    h.field = Vec3(u(rng), -u(rng), 2.0 * u(rng));
    std::vector<ChannelSpec> ch{ChannelSpec::observed(random_unit(rng), 2.0 * u(rng)),
                                ChannelSpec::unobserved(random_unit(rng), u(rng))};
    std::vector<OperatorChannel> op;
    for (const auto& c : ch) op.push_back(OperatorChannel::from(c));
    const Vec3 bloch = qubit_drift(h, ch, r);
    const CMatrix rate = generic_drift(h.hamiltonian(), op, bloch_to_density(r));
    EXPECT_LT((bloch_components(rate) - bloch).norm(), 1e-13);
    EXPECT_LT(std::abs(rate.trace()), 1e-14);
    EXPECT_LT((rate - rate.adjoint()).norm(), 1e-14);
  }
}

TEST(Drift, FieldRotatesAboutItself) {
  HamiltonianSpec h;
  h.field = Vec3(0, 0, 1);
  const Vec3 r(0.5, 0, 0);
  const Vec3 d = qubit_drift(h, {}, r);
  EXPECT_NEAR(d.dot(r), 0.0, 1e-15);
  EXPECT_NEAR(d.z(), 0.0, 1e-15);
  EXPECT_GT(d.norm(), 0.0);
}

TEST(Drift, SubspaceMasksField) {
  HamiltonianSpec h;
  h.field = Vec3(1, 1, 1);
  h.subspace = ControlSubspace({true, false, false});
  EXPECT_EQ(h.effective_field(), Vec3(1, 0, 0));
  EXPECT_EQ(h.subspace.dimension(), 1);
}

TEST(Fluctuation, BlochFormMatchesMatrixForm) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = u(rng) * random_unit(rng);
    const ChannelSpec c = ChannelSpec::observed(random_unit(rng), 3.0 * u(rng));
    const CMatrix m = generic_fluctuation(OperatorChannel::from(c), bloch_to_density(r));
    EXPECT_LT((bloch_components(m) - qubit_fluctuation(c, r)).norm(), 1e-13);
    EXPECT_LT(std::abs(m.trace()), 1e-14);
  }
}

TEST(Fluctuation, VanishesOnPureEigenstate) {
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitZ(), 1.0);
  EXPECT_LT(qubit_fluctuation(c, Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT(qubit_fluctuation(c, -Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_THROW(qubit_fluctuation(ChannelSpec::unobserved(Vec3::UnitZ(), 1.0), Vec3::Zero()),
               InvalidArgument);
}

TEST(Innovation, SubtractsExpectedSignal) {
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitX(), 4.0);
  const Vec3 r(0.25, 0.1, 0);
  EXPECT_DOUBLE_EQ(expected_signal_rate(c, r), 0.5);
  EXPECT_DOUBLE_EQ(innovation_increment(c, r, 0.01, 0.001), 0.01 - 0.5 * 0.001);
}

TEST(Channel, ValidationRejectsBadInputs) {
  EXPECT_THROW(ChannelSpec::observed(Vec3(1, 1, 0), 1.0).validate(), InvalidArgument);
  EXPECT_THROW(ChannelSpec::observed(Vec3::UnitZ(), -1.0).validate(), InvalidArgument);
  EXPECT_NO_THROW(ChannelSpec::observed(Vec3::UnitZ(), 0.0).validate());
}

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  EXPECT_EQ(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       A2{0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       A2{0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Noise, CounterBasedAndDeterministic) {
  const NoiseKey k{42, 7};
  EXPECT_EQ(standard_normal(k, 10, 0), standard_normal(k, 10, 0));
  EXPECT_NE(standard_normal(k, 10, 0), standard_normal(k, 10, 1));
  EXPECT_NE(standard_normal(k, 10, 0), standard_normal(k, 11, 0));
  EXPECT_NE(standard_normal(k, 10, 0), standard_normal(NoiseKey{42, 8}, 10, 0));
  EXPECT_NE(standard_normal(k, 10, 0), standard_normal(NoiseKey{43, 7}, 10, 0));
}

TEST(Noise, NormalMoments) {
  const NoiseKey k{5, 0};
  constexpr int n = 200000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = standard_normal(k, static_cast<std::uint64_t>(i), 0);
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s3 / n, 0.0, 5.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(Noise, UniformInOpenInterval) {
  const NoiseKey k{9, 1};
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = uniform_open(k, i, 3);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (std::size_t workers : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 2,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace qdp
