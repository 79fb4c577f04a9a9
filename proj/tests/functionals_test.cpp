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

#include "qdp/error.hpp"
#include "qdp/functionals.hpp"

namespace qdp {
namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

double purification_rate(const Vec3& r, double lam2) {
  return lam2 * (r.squaredNorm() - 1.0) * (1.0 - r.z() * r.z());
}

TEST(Generator, WorkedExample) {
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitZ(), 1.0);
  const auto d = generator(functional::purity_deficit(), BlochState(Vec3(0.6, 0, 0)), {},
                           std::span<const ChannelSpec>(&c, 1));
  EXPECT_NEAR(d.total, -0.64, 1e-15);
  EXPECT_NEAR(d.drift_term + d.ito_term, d.total, 1e-15);
}

TEST(Generator, ClosedFormOverGrid) {
  for (double lam2 : {0.5, 1.0, 2.0}) {
    const ChannelSpec c = ChannelSpec::observed(Vec3::UnitZ(), lam2);
    for (double x = -0.5; x <= 0.5; x += 0.25) {
      for (double y = -0.5; y <= 0.5; y += 0.25) {
        for (double z = -0.5; z <= 0.5; z += 0.25) {
          const Vec3 r(x, y, z);
          const double d = generator(functional::purity_deficit(), BlochState(r), {},
                                     std::span<const ChannelSpec>(&c, 1))
                               .total;
          EXPECT_NEAR(d, purification_rate(r, lam2), 1e-12);
        }
      }
    }
  }
}

TEST(Generator, AlignedProbeStillPurifies) {
  // Probe along r itself at |r| = 0.5.
  const Vec3 r(0.5, 0, 0);
  const auto d = generator_general_direction(functional::purity_deficit(), BlochState(r),
                                             Vec3::UnitX(), 1.0);
  EXPECT_NEAR(d.total, -0.5625, 1e-14);
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitX(), 1.0);
  EXPECT_NEAR(generator(functional::purity_deficit(), BlochState(r), {},
                        std::span<const ChannelSpec>(&c, 1))
                  .total,
              -0.5625, 1e-14);
}

TEST(Generator, RadialFormMatchesMatrixForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.99);
  const StateFunctional f = functional::radial(
      "cubic", {[](double r) { return 1.0 - r * r * r; }, [](double r) { return -3.0 * r * r; },
                [](double r) { return -6.0 * r; }});
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = u(rng) * random_unit(rng);
    const Vec3 n = random_unit(rng);
    const double lam = 0.3 + u(rng);
    const ChannelSpec c = ChannelSpec::observed(n, lam * lam);
    const double matrix =
        generator(f, BlochState(r), {}, std::span<const ChannelSpec>(&c, 1)).total;
    const double radial = generator_general_direction(f, BlochState(r), n, lam).total;
    EXPECT_NEAR(matrix, radial, 1e-8 * (1.0 + std::abs(matrix)));
  }
}

TEST(Generator, RadialFormRejectsDegenerateInputs) {
  EXPECT_THROW(generator_general_direction(functional::purity_deficit(), BlochState(), Vec3::UnitZ(),
                                           1.0),
               InvalidArgument);
  EXPECT_THROW(generator_general_direction(functional::coordinate(0), BlochState(Vec3(0.2, 0, 0)),
                                           Vec3::UnitZ(), 1.0),
               InvalidArgument);
}

TEST(Generator, CoordinatesAreMartingalesUnderPureMeasurement) {
  std::mt19937_64 rng(6);
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitZ(), 1.3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 r = 0.9 * random_unit(rng);
    EXPECT_NEAR(generator(functional::coordinate(2), BlochState(r), {},
                          std::span<const ChannelSpec>(&c, 1))
                    .total,
                0.0, 1e-12);
  }
}

TEST(Generator, MonteCarloAgreesWithClosedForm) {
  const ChannelSpec c = ChannelSpec::observed(Vec3::UnitZ(), 1.0);
  const Vec3 r(0.3, -0.2, 0.4);
  const double h = 1e-3;
  const McEstimate mc = mc_generator_estimate(functional::purity_deficit(), BlochState(r), {},
                                              std::span<const ChannelSpec>(&c, 1), h, 20000, 17);
  EXPECT_EQ(mc.samples, 20000u);
  EXPECT_NEAR(mc.mean, purification_rate(r, 1.0), 3.0 * mc.standard_error + 10.0 * h);
}

TEST(Direction, OrthogonalDirectionIsUnitAndOrthogonal) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = 0.8 * random_unit(rng);
    const Vec3 n = orthogonal_direction(r);
    EXPECT_NEAR(n.norm(), 1.0, 1e-14);
    EXPECT_NEAR(n.dot(r), 0.0, 1e-14);
  }
  EXPECT_EQ(orthogonal_direction(Vec3::Zero()), Vec3::UnitZ());
}

TEST(Direction, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Vec3 r = (0.2 + 0.7 * std::abs(random_unit(rng).x())) * random_unit(rng);
    Mat3 fd;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k) * h;
      fd.col(k) = (orthogonal_direction(r + e) - orthogonal_direction(r - e)) / (2.0 * h);
    }
    EXPECT_LT((orthogonal_direction_jacobian(r) - fd).norm(), 1e-6);
  }
}

TEST(Direction, LocalOptimumForPurificationIsOrthogonal) {
  const DirectionChoice d = local_optimal_direction(functional::purity_deficit(),
                                                    BlochState(Vec3(0.1, 0.5, 0.2)));
  EXPECT_TRUE(d.orthogonal);
  EXPECT_TRUE(d.hypotheses_hold);
  EXPECT_NEAR(d.direction.dot(Vec3(0.1, 0.5, 0.2)), 0.0, 1e-14);
  EXPECT_NEAR(d.generator, -(1.0 - 0.30), 1e-14);
}

TEST(Direction, ConvexProfilePrefersAlignedProbe) {
  // f = r^2 grows under purification; the aligned probe is the least increasing choice.
  const StateFunctional f = functional::radial(
      "r2", {[](double r) { return r * r; }, [](double r) { return 2.0 * r; },
             [](double) { return 2.0; }});
  const Vec3 r(0.0, 0.6, 0.0);
  const DirectionChoice d = local_optimal_direction(f, BlochState(r));
  EXPECT_FALSE(d.orthogonal);
  EXPECT_FALSE(d.hypotheses_hold);
  EXPECT_NEAR(std::abs(d.direction.dot(r.normalized())), 1.0, 1e-14);
}

TEST(Direction, BruteForceScanFindsOrthogonalPlane) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const Vec3 r = 0.7 * random_unit(rng);
    const ScanResult s = scan_directions(functional::purity_deficit(), BlochState(r), 1.0, 2000);
    EXPECT_LE(std::abs(s.direction.dot(r)), 1e-6);
    EXPECT_NEAR(s.value, -(1.0 - r.squaredNorm()), 1e-10);
  }
}

TEST(Direction, FibonacciSphereIsUnitAndSpread) {
  const auto pts = fibonacci_sphere(500);
  ASSERT_EQ(pts.size(), 500u);
  Vec3 sum = Vec3::Zero();
  for (const auto& p : pts) {
    EXPECT_NEAR(p.norm(), 1.0, 1e-14);
    sum += p;
  }
  EXPECT_LT(sum.norm() / 500.0, 1e-2);
}

}  // namespace
}  // namespace qdp
