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

#include "qdp_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdp/functionals.hpp"
#include "qdp_cli/csv.hpp"

namespace qdp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void CommandResult::check(bool condition, const std::string& name, const std::string& detail) {
  if (condition) {
    passed.push_back(name);
  } else {
    failures.push_back({name, detail});
  }
}

json CommandResult::verdict() const {
  json f = json::array();
  for (const auto& x : failures) f.push_back({{"check", x.check}, {"detail", x.detail}});
  return {{"command", command}, {"ok", ok()}, {"passed", passed}, {"failures", f}};
}

namespace {

std::string num(double v) { return format_number(v); }

std::uint64_t require_seed(const RunConfig& c, const CommandOptions& o) {
  if (o.seed) return *o.seed;
  if (c.simulation.master_seed) return *c.simulation.master_seed;
  throw ConfigError("simulation.master_seed (or --seed) is required for this command");
}

fs::path out_dir(const RunConfig& c, const CommandOptions& o) {
  fs::path dir = o.out_dir.value_or(c.out_dir);
  if (o.write_files) fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j, CommandResult& res) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  res.outputs.push_back(path.string());
}

SimulationConfig simulation_config(const RunConfig& c, std::uint64_t seed) {
  SimulationConfig s;
  s.r0 = c.simulation.r0;
  s.policy = make_policy_from(c);
  s.grid = {c.simulation.t0, c.simulation.T, c.simulation.dt};
  s.background = c.system.background;
  s.n_traj = c.simulation.n_traj;
  s.master_seed = seed;
  s.scheme = c.simulation.scheme;
  s.sample_every = c.simulation.sample_every;
  for (const auto& f : c.simulation.functionals) s.functionals.push_back(make_functional(f));
  return s;
}

bool measurement_only(const RunConfig& c) {
  return c.policy.kind != PolicyKind::bang_bang_field;
}

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace

// ---- simulate ---------------------------------------------------------------

CommandResult cmd_simulate(const RunConfig& c, const CommandOptions& o) {
  CommandResult res;
  res.command = "simulate";
  const std::uint64_t seed = require_seed(c, o);
  const SimulationConfig cfg = simulation_config(c, seed);
  const fs::path dir = out_dir(c, o);

  TrajectoryRecord rec;
  try {
    rec = simulate_trajectory(cfg, c.simulation.trajectory);
  } catch (const TrajectoryAborted& e) {
    res.check(false, "admissible_controls",
              "step " + std::to_string(e.step()) + ": " + e.what());
    return res;
  }
  res.check(true, "admissible_controls", "");

  const std::size_t slots = rec.y.size();
  double max_norm = 0.0, bookkeeping = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    max_norm = std::max(max_norm, rec.states[k].norm());
    for (std::size_t j = 0; j < slots; ++j) {
      bookkeeping = std::max(bookkeeping, std::abs(rec.y[j][k] - rec.signal[j][k] - rec.w[j][k]));
    }
  }
  res.check(max_norm <= 1.0, "physical_states", "max |r| = " + num(max_norm));
  res.check(bookkeeping <= 1e-12, "innovation_bookkeeping", "max defect " + num(bookkeeping));

  const bool frozen_expected = c.policy.kind == PolicyKind::no_measurement && c.system.background.empty();
  if (frozen_expected) {
    double drift = 0.0;
    for (const auto& r : rec.states) drift = std::max(drift, (r - rec.states.front()).norm());
    res.check(drift == 0.0, "frozen_state", "max displacement " + num(drift));
  }
  if (c.policy.kind == PolicyKind::orthogonal_adaptive && c.system.background.empty() &&
      rec.states.front().squaredNorm() < 1.0) {
    std::vector<double> t, y;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const double d = 1.0 - rec.states[k].squaredNorm();
      if (d <= 0.0) break;
      t.push_back(rec.times[k]);
      y.push_back(std::log(d));
    }
    const double expected = -cfg.policy.spec().strength;
    const double slope = t.size() >= 2 ? fit_slope(t, y) : std::nan("");
    res.check(std::abs(slope - expected) <= 1e-3, "log_purity_slope",
              "slope " + num(slope) + " vs " + num(expected));
    res.report["log_purity_slope"] = slope;
  }

  if (o.write_files) {
    std::vector<std::string> header{"t", "x", "y", "z", "r2"};
    for (std::size_t j = 0; j < slots; ++j) header.push_back("u_" + std::to_string(j));
    for (std::size_t j = 0; j < slots; ++j) header.push_back("dy_" + std::to_string(j));
    for (std::size_t j = 0; j < slots; ++j) header.push_back("y_" + std::to_string(j));
    for (std::size_t j = 0; j < slots; ++j) header.push_back("w_" + std::to_string(j));
    const fs::path path = dir / "trajectory.csv";
    CsvWriter csv(path.string(), header);
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const Vec3& r = rec.states[k];
      csv << rec.times[k] << r.x() << r.y() << r.z() << r.squaredNorm();
      for (std::size_t j = 0; j < slots; ++j) csv << rec.controls[k].strengths.at(j);
      for (std::size_t j = 0; j < slots; ++j) csv << (k ? rec.y[j][k] - rec.y[j][k - 1] : 0.0);
      for (std::size_t j = 0; j < slots; ++j) csv << rec.y[j][k];
      for (std::size_t j = 0; j < slots; ++j) csv << rec.w[j][k];
      csv.end_row();
    }
    res.outputs.push_back(path.string());
  }
  res.report["samples"] = rec.size();
  res.report["final_state"] = {rec.states.back().x(), rec.states.back().y(), rec.states.back().z()};
  return res;
}

// ---- ensemble ---------------------------------------------------------------

CommandResult cmd_ensemble(const RunConfig& c, const CommandOptions& o) {
  CommandResult res;
  res.command = "ensemble";
  const std::uint64_t seed = require_seed(c, o);
  const SimulationConfig cfg = simulation_config(c, seed);
  const fs::path dir = out_dir(c, o);
  const EnsembleStats st = simulate_ensemble(cfg);

  std::ostringstream v;
  for (const auto& x : st.violations) v << "traj " << x.trajectory << " step " << x.step << ": " << x.message << "; ";
  res.check(st.violations.empty(), "admissible_controls", v.str());

  bool nonneg = true;
  for (const auto& row : st.variance) {
    for (double x : row) nonneg = nonneg && x >= 0.0;
  }
  res.check(nonneg, "variance_nonnegative", "negative variance encountered");

  const std::size_t last = st.times.size() - 1;
  for (std::size_t f = 0; f < st.names.size(); ++f) {
    if (st.names[f] == "purity_deficit" && measurement_only(c)) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < st.times.size(); ++k) {
        const double se = std::hypot(st.standard_error(f, k), st.standard_error(f, k + 1));
        worst = std::max(worst, st.mean[f][k + 1] - st.mean[f][k] - 3.0 * se);
      }
      res.check(worst <= 0.0, "mean_purity_nonincreasing", "worst excess " + num(worst));
    }
    const bool sigma_z = c.policy.kind == PolicyKind::fixed_axis &&
                         (c.policy.axis - Vec3::UnitZ()).norm() < 1e-12 && c.system.background.empty();
    if (st.names[f] == "z" && sigma_z) {
      const double gap = std::abs(st.mean[f][last] - c.simulation.r0.z());
      const double tol = 3.0 * st.standard_error(f, last);
      res.check(gap <= tol, "martingale_z", "gap " + num(gap) + " vs 3 stderr " + num(tol));
    }
  }

  if (o.write_files) {
    const fs::path path = dir / "ensemble.csv";
    CsvWriter csv(path.string(), {"t", "functional", "mean", "variance", "stderr", "n_traj"});
    for (std::size_t f = 0; f < st.names.size(); ++f) {
      for (std::size_t k = 0; k < st.times.size(); ++k) {
        csv << st.times[k] << st.names[f] << st.mean[f][k] << st.variance[f][k]
            << st.standard_error(f, k) << static_cast<long long>(st.n_traj);
        csv.end_row();
      }
    }
    res.outputs.push_back(path.string());
  }
  res.report["n_traj"] = st.n_traj;
  res.report["master_seed"] = st.master_seed;
  return res;
}

// ---- generator-check ---------------------------------------------------------

CommandResult cmd_generator_check(const RunConfig& c, const CommandOptions& o) {
  CommandResult res;
  res.command = "generator-check";
  const std::uint64_t seed = require_seed(c, o);
  const fs::path dir = out_dir(c, o);
  const GeneratorCheckBlock& g = c.generator_check;
  const double lam2 = c.system.strength;
  const StateFunctional f = functional::purity_deficit();
  const ChannelSpec probe = ChannelSpec::observed(Vec3::UnitZ(), lam2);
  const std::span<const ChannelSpec> channels(&probe, 1);
  const HamiltonianSpec none;

  json table = json::array();
  double worst_matrix = 0.0, worst_radial = 0.0;
  std::size_t mc_fail = 0;
  double worst_mc_ratio = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < g.points; ++i) {
    for (std::size_t j = 0; j < g.points; ++j) {
      for (std::size_t k = 0; k < g.points; ++k, ++idx) {
        auto coord = [&](std::size_t a) {
          return -g.extent + 2.0 * g.extent * static_cast<double>(a) / static_cast<double>(g.points - 1);
        };
        const Vec3 r(coord(i), coord(j), coord(k));
        const BlochState s(r);
        const double expected = lam2 * (r.squaredNorm() - 1.0) * (1.0 - r.z() * r.z());
        const double matrix = generator(f, s, none, channels).total;
        worst_matrix = std::max(worst_matrix, std::abs(matrix - expected));
        double radial = expected;
        if (r.norm() > 0.0) {
          radial = generator_general_direction(f, s, Vec3::UnitZ(), std::sqrt(lam2)).total;
          worst_radial = std::max(worst_radial, std::abs(radial - expected));
        }
        const McEstimate mc = mc_generator_estimate(
            f, s, none, channels, g.h, g.n_traj, seed ^ (0x9E3779B97F4A7C15ULL * (idx + 1)));
        const double tol = 3.0 * mc.standard_error + g.mc_slack * g.h;
        const double err = std::abs(mc.mean - expected);
        if (err > tol) ++mc_fail;
        worst_mc_ratio = std::max(worst_mc_ratio, err / tol);
        table.push_back({{"r", {r.x(), r.y(), r.z()}},
                         {"expected", expected},
                         {"matrix", matrix},
                         {"radial", radial},
                         {"mc", mc.mean},
                         {"mc_stderr", mc.standard_error},
                         {"mc_pass", err <= tol}});
      }
    }
  }
  res.check(worst_matrix <= g.closed_tolerance, "closed_form_matrix", "max error " + num(worst_matrix));
  res.check(worst_radial <= g.closed_tolerance, "closed_form_radial", "max error " + num(worst_radial));
  res.check(mc_fail == 0, "monte_carlo",
            std::to_string(mc_fail) + " states outside 3 stderr + C h (worst ratio " +
                num(worst_mc_ratio) + ")");

  // Worked point, a pure eigenstate and an orthogonal probe.
  const double worked = generator(f, BlochState(Vec3(0.6, 0, 0)), none, channels).total;
  res.check(std::abs(worked + 0.64 * lam2) <= 1e-12, "worked_point",
            "D F at (0.6,0,0) = " + num(worked));
  const double pure = generator(f, BlochState(Vec3::UnitZ()), none, channels).total;
  res.check(std::abs(pure) <= 1e-12, "pure_eigenstate", "D F at e_z = " + num(pure));
  const ChannelSpec ortho = ChannelSpec::observed(Vec3::UnitX(), lam2);
  const Vec3 ro(0.0, 0.0, 0.6);
  const double orth = generator(f, BlochState(ro), none, std::span<const ChannelSpec>(&ortho, 1)).total;
  res.check(std::abs(orth + lam2 * (1.0 - ro.squaredNorm())) <= 1e-12, "orthogonal_probe",
            "D F = " + num(orth));

  res.report = {{"strength", lam2},
                {"h", g.h},
                {"n_traj", g.n_traj},
                {"max_error_matrix", worst_matrix},
                {"max_error_radial", worst_radial},
                {"mc_failures", mc_fail},
                {"worst_mc_ratio", worst_mc_ratio},
                {"worked_point", worked},
                {"table", table}};
  if (o.write_files) {
    json out = res.report;
    out["verdict"] = res.verdict();
    write_json(dir / "generator_check.json", out, res);
  }
  return res;
}

// ---- hjb ---------------------------------------------------------------------

namespace {

void write_grid_csv(const ValueGrid& grid, const fs::path& path, bool all) {
  CsvWriter csv(path.string(), {"t", "x", "y", "z", "S", "policy"});
  for (std::size_t s = 0; s < grid.slice_count(); ++s) {
    if (!all && s != 0 && s + 1 != grid.slice_count()) continue;
    const auto v = grid.values(s);
    const auto p = grid.policy(s);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      if (!grid.admissible(i)) continue;
      const Vec3 r = grid.node_position(i);
      csv << grid.slice_time(s) << r.x() << r.y() << r.z() << v[i] << static_cast<long long>(p[i]);
      csv.end_row();
    }
  }
}

}  // namespace

CommandResult cmd_hjb(const RunConfig& c, const CommandOptions& o) {
  CommandResult res;
  res.command = "hjb";
  const fs::path dir = out_dir(c, o);
  const HjbBlock& h = c.hjb;
  const CostSpec costs = make_costs(c.cost);

  std::shared_ptr<ValueGrid> grid;
  if (h.solver == "measurement") {
    MeasurementProblem p;
    p.costs = costs;
    p.strength = c.system.strength;
    p.alphas = h.alphas;
    p.directions = h.directions;
    grid = std::make_shared<ValueGrid>(solve_measurement_hjb(p, h.grid));
  } else {
    DeterministicProblem p;
    p.costs = costs;
    p.constraint = ControlConstraint::ball(h.field_radius);
    p.subspace = ControlSubspace(c.system.subspace);
    p.channels = c.system.background;
    grid = std::make_shared<ValueGrid>(solve_deterministic_hjb(p, h.grid));
  }
  const std::size_t last = grid->slice_count() - 1;

  // Terminal slice against the bequest.
  double terminal_gap = 0.0;
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    if (!grid->admissible(i)) continue;
    const double b = costs.terminal(grid->node_position(i)).value();
    terminal_gap = std::max(terminal_gap, std::abs(grid->values(last)[i] - b));
  }
  res.check(terminal_gap <= 1e-12, "terminal_consistency", "max gap " + num(terminal_gap));

  double value_gap = std::nan("");
  const double horizon = grid->horizon() - grid->t0();
  if (h.solver == "measurement" && h.grid.mode == GridMode::radial && c.cost.bequest == "purity_deficit") {
    const auto v0 = grid->values(0);
    value_gap = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      const double r = grid->node_position(i).x();
      const double fk = (1.0 - r * r) * std::exp(-c.system.strength * horizon);
      value_gap = std::max(value_gap, std::abs(v0[i] - fk));
    }
    res.check(value_gap <= h.value_tolerance, "value_vs_feynman_kac", "sup gap " + num(value_gap));

    const auto zero = std::find(h.alphas.begin(), h.alphas.end(), 0.0);
    if (zero != h.alphas.end() && grid->steps() > 0 && c.system.strength > 0.0) {
      const int code = static_cast<int>(zero - h.alphas.begin());
      std::size_t bad = 0;
      for (std::size_t s = 0; s < last; ++s) {
        const auto p = grid->policy(s);
        for (std::size_t i = 1; i + 1 < grid->node_count(); ++i) bad += p[i] != code;
      }
      res.check(bad == 0, "orthogonal_policy", std::to_string(bad) + " interior nodes with alpha != 0");
    }
  }
  if (c.cost.bequest == "constant") {
    double spread = 0.0;
    std::size_t on = 0;
    for (std::size_t s = 0; s < grid->slice_count(); ++s) {
      for (std::size_t i = 0; i < grid->node_count(); ++i) {
        if (!grid->admissible(i)) continue;
        spread = std::max(spread, std::abs(grid->values(s)[i] - c.cost.constant));
        if (h.solver == "measurement") on += grid->policy(s)[i] != kPolicyOff;
      }
    }
    res.check(spread == 0.0 && on == 0, "constant_bequest",
              "max deviation " + num(spread) + ", nodes measuring " + std::to_string(on));
  }
  if (h.solver == "deterministic" && c.cost.bequest == "purity_deficit" && c.system.background.empty()) {
    double gap = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      if (!grid->admissible(i)) continue;
      gap = std::max(gap, std::abs(grid->values(0)[i] - (1.0 - grid->node_position(i).squaredNorm())));
    }
    res.check(gap <= h.value_tolerance, "unitary_invariance", "sup gap " + num(gap));
  }
  if (h.solver == "deterministic" && h.r0 && grid->steps() > 0) {
    const Policy policy = extract_policy(grid);
    const TimeGrid tg{grid->t0(), grid->horizon(), grid->dt() / 10.0};
    const TrajectoryRecord rec = integrate_me(BlochState(*h.r0), policy, tg, c.system.background);
    const Vec3 end = rec.states.back();
    res.report["open_loop_final"] = {end.x(), end.y(), end.z()};
    if (c.cost.bequest == "target_error") {
      const double miss = (end - c.cost.target).norm();
      res.check(miss <= h.reach_tolerance, "reaches_target", "|r(T) - target| = " + num(miss));
    }
  }

  // Both closed-form candidates for the purification problem.
  ResidualGridSpec rs = h.residual;
  rs.t0 = grid->t0();
  rs.T = horizon > 0.0 ? grid->horizon() : grid->t0() + 1.0;
  const double T = rs.T;
  const auto printed = [T](double t, double r) { return 1.0 - r * r * std::exp(-(T - t)); };
  const auto feynman_kac = [T](double t, double r) { return (1.0 - r * r) * std::exp(-(T - t)); };
  const PdeResidualReport a = verify_closed_form("printed", printed, ReducedEquation::paper_reduced, rs);
  const PdeResidualReport b =
      verify_closed_form("feynman_kac", feynman_kac, ReducedEquation::generator_backward, rs);
  res.check(a.max_abs <= 1e-6, "residual_paper_reduced", "max residual " + num(a.max_abs));
  res.check(b.max_abs <= 1e-6, "residual_generator_backward", "max residual " + num(b.max_abs));
  double offset = 0.0;
  for (double t : a.t) {
    for (double r : a.r) {
      offset = std::max(offset, std::abs(printed(t, r) - feynman_kac(t, r) - (1.0 - std::exp(-(T - t)))));
    }
  }
  res.check(offset <= 1e-12, "candidate_offset", "max deviation " + num(offset));

  res.report["solver"] = h.solver;
  res.report["mode"] = h.grid.mode == GridMode::radial ? "radial" : "ball";
  res.report["steps"] = grid->steps();
  res.report["dt"] = grid->dt();
  res.report["dx"] = grid->dx();
  res.report["clamped_feet"] = grid->clamped_feet();
  res.report["value_gap"] = value_gap;
  res.report["residuals"] = json::array(
      {{{"candidate", a.candidate}, {"equation", to_string(a.equation)}, {"max_abs", a.max_abs}, {"mean_abs", a.mean_abs}},
       {{"candidate", b.candidate}, {"equation", to_string(b.equation)}, {"max_abs", b.max_abs}, {"mean_abs", b.mean_abs}}});
  res.report["candidate_offset"] = offset;

  if (o.write_files) {
    const fs::path path = dir / "value_grid.csv";
    write_grid_csv(*grid, path, h.csv_slices == "all");
    res.outputs.push_back(path.string());
    const fs::path rpath = dir / "residuals.csv";
    CsvWriter csv(rpath.string(), {"t", "r", "paper_reduced", "generator_backward"});
    for (std::size_t i = 0; i < a.t.size(); ++i) {
      for (std::size_t j = 0; j < a.r.size(); ++j) {
        const std::size_t n = i * a.r.size() + j;
        csv << a.t[i] << a.r[j] << a.residual[n] << b.residual[n];
        csv.end_row();
      }
    }
    res.outputs.push_back(rpath.string());
    json out = res.report;
    out["verdict"] = res.verdict();
    write_json(dir / "hjb_report.json", out, res);
  }
  return res;
}

// ---- purify-benchmark ----------------------------------------------------------

CommandResult cmd_purify_benchmark(const RunConfig& c, const CommandOptions& o) {
  CommandResult res;
  res.command = "purify-benchmark";
  const std::uint64_t seed = require_seed(c, o);
  const fs::path dir = out_dir(c, o);
  const BenchmarkBlock& b = c.benchmark;
  const double lam2 = c.system.strength;

  std::shared_ptr<const ValueGrid> grid;
  const bool want_grid =
      std::find(b.policies.begin(), b.policies.end(), "grid_policy") != b.policies.end();
  if (want_grid) {
    MeasurementProblem p;
    p.costs = CostSpec::purification();
    p.strength = lam2;
    HjbGridSpec spec;
    spec.T = b.T;
    spec.dx = b.grid_dx;
    spec.max_stored_slices = 201;
    grid = std::make_shared<const ValueGrid>(solve_measurement_hjb(p, spec));
  }

  auto make = [&](const std::string& name) {
    PolicySpec s;
    s.strength = lam2;
    if (name == "orthogonal_adaptive") return make_policy(PolicyKind::orthogonal_adaptive, s);
    if (name == "fixed_z") return make_policy(PolicyKind::fixed_axis, s);
    if (name == "fixed_x") {
      s.axis = Vec3::UnitX();
      return make_policy(PolicyKind::fixed_axis, s);
    }
    if (name == "grid_policy") return extract_policy(grid);
    return make_policy(PolicyKind::no_measurement, s);
  };

  std::unique_ptr<CsvWriter> csv;
  if (o.write_files) {
    const fs::path path = dir / "purify_benchmark.csv";
    csv = std::make_unique<CsvWriter>(path.string(),
                                      std::vector<std::string>{"r0", "policy", "mean_deficit", "stderr",
                                                               "n_traj", "analytic_orthogonal", "grid_value"});
    res.outputs.push_back(path.string());
  }
  json rows = json::array();
  for (double r0 : b.r0) {
    const double analytic = (1.0 - r0 * r0) * std::exp(-lam2 * b.T);
    const double grid_value = grid ? grid->value_at(0.0, Vec3(r0, 0, 0)) : std::nan("");
    std::vector<double> means, ses, variances;
    for (const auto& name : b.policies) {
      SimulationConfig s;
      s.r0 = Vec3(r0, 0.0, 0.0);
      s.policy = make(name);
      s.grid = {0.0, b.T, b.dt};
      s.n_traj = b.n_traj;
      s.master_seed = seed;
      s.functionals = {functional::purity_deficit()};
      s.sample_every = s.grid.steps();
      const EnsembleStats st = simulate_ensemble(s);
      res.check(st.violations.empty(), "admissible_controls_" + name, "violations recorded");
      const std::size_t k = st.times.size() - 1;
      means.push_back(st.mean[0][k]);
      ses.push_back(st.standard_error(0, k));
      variances.push_back(st.variance[0][k]);
      if (csv) {
        *csv << r0 << name << means.back() << ses.back() << static_cast<long long>(st.n_traj)
             << analytic << grid_value;
        csv->end_row();
      }
      rows.push_back({{"r0", r0}, {"policy", name}, {"mean", means.back()}, {"stderr", ses.back()}});
    }
    const std::string tag = "_r0=" + num(r0);
    for (std::size_t p = 1; p < b.policies.size(); ++p) {
      const double tol = 3.0 * std::hypot(ses[0], ses[p]);
      res.check(means[0] <= means[p] + tol, "orthogonal_dominates_" + b.policies[p] + tag,
                num(means[0]) + " vs " + num(means[p]) + " (+" + num(tol) + ")");
      if (b.policies[p] == "no_measurement") {
        res.check(variances[p] == 0.0 && std::abs(means[p] - (1.0 - r0 * r0)) <= 1e-15,
                  "no_measurement_constant" + tag, "mean " + num(means[p]));
      }
      if (b.policies[p] == "grid_policy") {
        const double gap = std::abs(means[p] - grid_value);
        const double tol_g = 3.0 * ses[p] + b.grid_tolerance;
        res.check(gap <= tol_g, "grid_self_consistency" + tag, "gap " + num(gap) + " vs " + num(tol_g));
      }
    }
    const double miss = std::abs(means[0] - analytic);
    res.check(miss <= b.analytic_tolerance, "orthogonal_analytic" + tag,
              num(means[0]) + " vs " + num(analytic));
  }
  res.report["rows"] = rows;
  return res;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "ensemble", "generator-check", "hjb",
                                              "purify-benchmark"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& c, const CommandOptions& o) {
  if (name == "simulate") return cmd_simulate(c, o);
  if (name == "ensemble") return cmd_ensemble(c, o);
  if (name == "generator-check") return cmd_generator_check(c, o);
  if (name == "hjb") return cmd_hjb(c, o);
  if (name == "purify-benchmark") return cmd_purify_benchmark(c, o);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace qdp::cli
