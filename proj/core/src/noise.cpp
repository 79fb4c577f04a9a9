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

#include "qdp/noise.hpp"

#include <cmath>
#include <numbers>

namespace qdp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(const NoiseKey& key, std::uint64_t step,
                                          std::uint32_t channel) {
  const std::array<std::uint32_t, 4> counter{
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), channel,
      static_cast<std::uint32_t>(key.trajectory)};
  // The high trajectory word is folded into the key so that all 64 bits of
  // both the seed and the trajectory index participate.
  const std::array<std::uint32_t, 2> k{
      static_cast<std::uint32_t>(key.master_seed),
      static_cast<std::uint32_t>(key.master_seed >> 32) ^
          (static_cast<std::uint32_t>(key.trajectory >> 32) * kWeyl0)};
  return philox4x32(counter, k);
}

// 53-bit mantissa mapped to the open interval (0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double standard_normal(const NoiseKey& key, std::uint64_t step, std::uint32_t channel) {
  const auto b = block(key, step, channel);
  const double u1 = to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform_open(const NoiseKey& key, std::uint64_t step, std::uint32_t channel) {
  const auto b = block(key, step, channel);
  return to_unit(b[0], b[1]);
}

}  // namespace qdp
