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

#include <cmath>

#include "qdp/error.hpp"
#include "qdp/hjb.hpp"

namespace qdp {

std::string to_string(ReducedEquation equation) {
  return equation == ReducedEquation::paper_reduced ? "paper_reduced" : "generator_backward";
}

PdeResidualReport verify_closed_form(const std::string& name, const ValueCandidate& candidate,
                                     ReducedEquation equation, const ResidualGridSpec& spec) {
  if (spec.n_t < 2 || spec.n_r < 1) throw InvalidArgument("residual grid is too small");
  if (!(spec.T > spec.t0)) throw InvalidArgument("residual grid requires T > t0");
  if (!(spec.h > 0.0)) throw InvalidArgument("difference step must be positive");

  PdeResidualReport rep;
  rep.candidate = name;
  rep.equation = equation;
  for (std::size_t i = 0; i < spec.n_t; ++i) {
    rep.t.push_back(spec.t0 + (spec.T - spec.t0) * static_cast<double>(i) /
                                  static_cast<double>(spec.n_t - 1));
  }
  for (std::size_t j = 0; j < spec.n_r; ++j) {
    rep.r.push_back(static_cast<double>(j + 1) / static_cast<double>(spec.n_r + 1));
  }
  const double h = spec.h;
  rep.residual.reserve(spec.n_t * spec.n_r);
  double sum = 0.0;
  for (double t : rep.t) {
    for (double r : rep.r) {
      const double st = (candidate(t + h, r) - candidate(t - h, r)) / (2.0 * h);
      const double sr = (candidate(t, r + h) - candidate(t, r - h)) / (2.0 * h);
      double res = -st + 0.5 * r * sr;
      if (equation == ReducedEquation::generator_backward) res -= sr / (2.0 * r);
      rep.residual.push_back(res);
      rep.max_abs = std::max(rep.max_abs, std::abs(res));
      sum += std::abs(res);
    }
  }
  rep.mean_abs = sum / static_cast<double>(rep.residual.size());
  return rep;
}

Policy extract_policy(std::shared_ptr<const ValueGrid> grid) {
  if (!grid) throw InvalidArgument("extract_policy needs a grid");
  PolicySpec spec;
  spec.grid = std::move(grid);
  spec.strength = spec.grid->dictionary().strength;
  return make_policy(PolicyKind::grid_policy, std::move(spec));
}

}  // namespace qdp
