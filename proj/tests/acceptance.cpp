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

// Acceptance suite: one PASS/FAIL line per criterion, each timed against
// its runtime budget. Optional arguments select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "qdp/control.hpp"
#include "qdp/filtersim.hpp"
#include "qdp/functionals.hpp"
#include "qdp/hjb.hpp"
#include "qdp_cli/commands.hpp"

namespace {

using namespace qdp;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome from_command(const cli::CommandResult& res, const std::set<std::string>& prefixes) {
  Outcome o{true, ""};
  std::size_t checked = 0;
  for (const auto& p : res.passed) {
    for (const auto& pre : prefixes) checked += p.rfind(pre, 0) == 0;
  }
  for (const auto& f : res.failures) {
    for (const auto& pre : prefixes) {
      if (f.check.rfind(pre, 0) == 0) {
        o.pass = false;
        o.detail += f.check + ": " + f.detail + "; ";
      }
    }
  }
  if (checked == 0 && o.pass) {
    o.pass = false;
    o.detail = "no checks ran";
  }
  if (o.pass) o.detail = std::to_string(checked) + " checks passed";
  return o;
}

Vec3 random_ball(std::mt19937_64& rng, double rmin, double rmax) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(rmin, rmax);
  return u(rng) * Vec3(g(rng), g(rng), g(rng)).normalized();
}

Outcome generator_closed_form() {
  cli::RunConfig c;
  c.system.strength = 1.0;
  c.simulation.master_seed = 20260101;
  c.generator_check.points = 9;
  c.generator_check.extent = 0.5;
  c.generator_check.n_traj = 20000;
  c.generator_check.h = 1e-3;
  cli::CommandOptions opt;
  opt.write_files = false;
  const auto res = cli::cmd_generator_check(c, opt);
  Outcome o = from_command(res, {"closed_form_matrix", "closed_form_radial", "monte_carlo",
                                 "worked_point"});
  o.detail += " (max closed-form error " + fmt("%.2e", res.report["max_error_matrix"].get<double>()) +
              ", worst MC ratio " + fmt("%.2f", res.report["worst_mc_ratio"].get<double>()) + ")";
  return o;
}

Outcome direction_optimality() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 r = random_ball(rng, 0.05, 0.95);
    const ScanResult s = scan_directions(functional::purity_deficit(), BlochState(r), 1.0);
    worst = std::max(worst, std::abs(s.direction.dot(r)));
  }
  return {worst <= 1e-6, "max |n.r| = " + fmt("%.2e", worst)};
}

Outcome pathwise_purification() {
  SimulationConfig c;
  c.r0 = Vec3(0.6, 0, 0);
  c.policy = make_policy(PolicyKind::orthogonal_adaptive);
  c.grid = {0.0, 2.0, 1e-4};
  c.master_seed = 3;
  double worst = 0.0, s1 = 0.0, s2 = 0.0;
  constexpr int n = 100;
  for (int traj = 0; traj < n; ++traj) {
    const TrajectoryRecord rec = simulate_trajectory(c, static_cast<std::uint64_t>(traj));
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const double d = 1.0 - rec.states[k].squaredNorm();
      worst = std::max(worst, std::abs(d - 0.64 * std::exp(-rec.times[k])));
    }
    const double d = 1.0 - rec.states.back().squaredNorm();
    s1 += d;
    s2 += d * d;
  }
  const double sd = std::sqrt(std::max(0.0, (s2 - s1 * s1 / n) / (n - 1)));
  return {worst <= 1e-3 && sd <= 1e-5,
          "max pathwise deviation " + fmt("%.2e", worst) + ", terminal sd " + fmt("%.2e", sd)};
}

Outcome martingale() {
  SimulationConfig c;
  c.r0 = Vec3(0.0, 0.0, 0.3);
  c.policy = make_policy(PolicyKind::fixed_axis);
  c.grid = {0.0, 2.0, 1e-4};
  c.n_traj = 10000;
  c.master_seed = 4;
  c.functionals = {functional::coordinate(2)};
  c.sample_every = c.grid.steps();
  const EnsembleStats st = simulate_ensemble(c);
  const std::size_t k = st.times.size() - 1;
  const double gap = std::abs(st.mean[0][k] - 0.3);
  const double tol = 3.0 * st.standard_error(0, k);
  return {st.violations.empty() && st.n_traj == 10000 && gap <= tol,
          "|mean z(T) - 0.3| = " + fmt("%.2e", gap) + " vs 3 stderr " + fmt("%.2e", tol)};
}

Outcome pde_residuals() {
  const double T = 1.0;
  const auto printed = [T](double t, double r) { return 1.0 - r * r * std::exp(-(T - t)); };
  const auto fk = [T](double t, double r) { return (1.0 - r * r) * std::exp(-(T - t)); };
  const auto a = verify_closed_form("printed", printed, ReducedEquation::paper_reduced);
  const auto b = verify_closed_form("feynman_kac", fk, ReducedEquation::generator_backward);
  double offset = 0.0;
  for (double t : a.t) {
    for (double r : a.r) {
      offset = std::max(offset, std::abs(printed(t, r) - fk(t, r) - (1.0 - std::exp(-(T - t)))));
    }
  }
  return {a.max_abs <= 1e-6 && b.max_abs <= 1e-6 && offset <= 1e-12 && a.t.size() == 200 &&
              a.r.size() == 200,
          "residuals " + fmt("%.2e", a.max_abs) + " / " + fmt("%.2e", b.max_abs) + ", offset " +
              fmt("%.1e", offset)};
}

Outcome hjb_vs_analytic() {
  MeasurementProblem p;
  p.costs = CostSpec::purification();
  HjbGridSpec spec;
  spec.T = 1.0;
  auto run = [&](double dx, std::size_t& non_orthogonal) {
    spec.dx = dx;
    const ValueGrid g = solve_measurement_hjb(p, spec);
    double gap = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double r = g.node_position(i).x();
      gap = std::max(gap, std::abs(g.values(0)[i] - (1.0 - r * r) * std::exp(-1.0)));
    }
    for (std::size_t s = 0; s + 1 < g.slice_count(); ++s) {
      for (std::size_t i = 1; i + 1 < g.node_count(); ++i) non_orthogonal += g.policy(s)[i] != 0;
    }
    return gap;
  };
  std::size_t bad = 0;
  const double coarse = run(0.01, bad);
  const double fine = run(0.005, bad);
  const double ratio = coarse / fine;
  return {bad == 0 && coarse <= 5e-3 && ratio >= 1.8,
          "sup gap " + fmt("%.2e", coarse) + ", refined " + fmt("%.2e", fine) + " (x" +
              fmt("%.2f", ratio) + "), non-orthogonal nodes " + std::to_string(bad)};
}

Outcome policy_dominance() {
  cli::RunConfig c;
  c.system.strength = 1.0;
  c.simulation.master_seed = 7;
  c.benchmark.r0 = {0.0, 0.3, 0.6, 0.9};
  c.benchmark.T = 1.0;
  c.benchmark.dt = 1e-4;
  c.benchmark.n_traj = 5000;
  c.benchmark.policies = {"orthogonal_adaptive", "fixed_z", "fixed_x", "no_measurement"};
  cli::CommandOptions opt;
  opt.write_files = false;
  return from_command(cli::cmd_purify_benchmark(c, opt),
                      {"orthogonal_dominates", "orthogonal_analytic", "admissible_controls"});
}

Outcome me_decay() {
  ControlAction a;
  a.channels = {ChannelSpec::observed(Vec3::UnitZ(), 1.0)};
  const auto rec = integrate_me(BlochState(Vec3(0.9, 0, 0)), a, TimeGrid{0.0, 2.0, 1e-3});
  const double rel = std::abs(rec.states.back().x() / (0.9 * std::exp(-1.0)) - 1.0);
  return {rel <= 1e-6, "relative error " + fmt("%.2e", rel)};
}

Outcome pontryagin() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 q(u(rng), u(rng), u(rng));
    const Vec3 p(u(rng), u(rng), u(rng));
    const auto res = pontryagin_hamiltonian(q, {p, 0.0}, CostSpec{}, ControlConstraint::ball(1.0), 1.0);
    worst = std::max(worst, (res.control - q.cross(p).normalized()).norm());
  }
  const Vec3 q(0.2, -0.3, 0.1);
  const Vec3 p(0.5, 0.1, -0.4);
  const std::vector<ChannelSpec> ch{ChannelSpec::unobserved(Vec3::UnitZ(), 1.0)};
  const double base =
      pontryagin_hamiltonian_numeric(q, {p, 0.0}, CostSpec{}, ControlConstraint::ball(1.0), ch).value;
  double shift = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double c = 100.0 * u(rng);
    const double v =
        pontryagin_hamiltonian_numeric(q, {p, c}, CostSpec{}, ControlConstraint::ball(1.0), ch).value;
    const double w = pontryagin_hamiltonian(q, {p, c}, CostSpec{}, ControlConstraint::ball(1.0), 1.0).value;
    shift = std::max({shift, std::abs(v - base), std::abs(w - pontryagin_hamiltonian(
                                                               q, {p, 0.0}, CostSpec{},
                                                               ControlConstraint::ball(1.0), 1.0)
                                                               .value)});
  }
  return {worst <= 1e-12 && shift <= 1e-12,
          "normalization error " + fmt("%.1e", worst) + ", identity-shift drift " + fmt("%.1e", shift)};
}

Outcome structural() {
  SimulationConfig c;
  c.r0 = Vec3(0.3, -0.2, 0.4);
  c.grid = {0.0, 0.5, 1e-3};
  c.master_seed = 10;
  c.n_traj = 200;
  c.functionals = {functional::purity_deficit(), functional::coordinate(0)};
  c.keep_terminal = true;
  double trace = 0.0, herm = 0.0, norm = 0.0, book = 0.0;
  bool same = true;
  for (PolicyKind kind : {PolicyKind::fixed_axis, PolicyKind::orthogonal_adaptive}) {
    c.policy = make_policy(kind);
    for (std::uint64_t traj = 0; traj < 20; ++traj) {
      const TrajectoryRecord rec = simulate_trajectory(c, traj);
      for (std::size_t k = 0; k < rec.size(); ++k) {
        const CMatrix rho = bloch_to_density(rec.states[k]).matrix();
        trace = std::max(trace, std::abs(rho.trace() - 1.0));
        herm = std::max(herm, (rho - rho.adjoint()).norm());
        norm = std::max(norm, rec.states[k].norm());
        for (std::size_t j = 0; j < rec.y.size(); ++j) {
          book = std::max(book, std::abs(rec.y[j][k] - rec.signal[j][k] - rec.w[j][k]));
        }
      }
    }
    c.workers = 1;
    const EnsembleStats a = simulate_ensemble(c);
    c.workers = 4;
    const EnsembleStats b = simulate_ensemble(c);
    same = same && a.mean == b.mean && a.variance == b.variance && a.terminal == b.terminal;
  }
  return {trace <= 1e-12 && herm <= 1e-12 && norm <= 1.0 && book <= 1e-12 && same,
          "trace " + fmt("%.1e", trace) + ", hermiticity " + fmt("%.1e", herm) + ", max |r| " +
              fmt("%.12f", norm) + ", bookkeeping " + fmt("%.1e", book) +
              (same ? ", workers {1,4} bit-identical" : ", workers {1,4} DIFFER")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "generator closed form", 120, generator_closed_form},
      {2, "local direction optimality", 60, direction_optimality},
      {3, "pathwise deterministic purification", 120, pathwise_purification},
      {4, "martingale conservation", 180, martingale},
      {5, "closed-form PDE residuals", 10, pde_residuals},
      {6, "HJB solver vs analytic value and policy", 60, hjb_vs_analytic},
      {7, "policy dominance", 300, policy_dominance},
      {8, "deterministic ME decay", 1, me_decay},
      {9, "Pontryagin properties", 1, pontryagin},
      {10, "structural suites", 120, structural},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s; %.2f s of %.0f s budget%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
