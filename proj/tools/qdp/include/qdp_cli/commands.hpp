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

#pragma once

// Experiment commands behind the qdp tool. Each command is a pure function
// of (config, seed): it writes its artifacts and reports every in-command
// check it ran.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdp_cli/config.hpp"

namespace qdp::cli {

struct Failure {
  std::string check;
  std::string detail;
};

struct CommandResult {
  std::string command;
  std::vector<std::string> passed;
  std::vector<Failure> failures;
  nlohmann::json report = nlohmann::json::object();
  std::vector<std::string> outputs;

  bool ok() const { return failures.empty(); }
  void check(bool condition, const std::string& name, const std::string& detail);
  /// Machine-readable verdict: {"command", "ok", "passed", "failures"}.
  nlohmann::json verdict() const;
};

struct CommandOptions {
  std::optional<std::uint64_t> seed;    // overrides simulation.master_seed
  std::optional<std::string> out_dir;   // overrides output.dir
  bool write_files = true;
};

CommandResult cmd_simulate(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_ensemble(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_generator_check(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_hjb(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_purify_benchmark(const RunConfig& config, const CommandOptions& options);

const std::vector<std::string>& command_names();
CommandResult run_command(const std::string& name, const RunConfig& config,
                          const CommandOptions& options);

}  // namespace qdp::cli
