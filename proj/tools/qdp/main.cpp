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

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "qdp/error.hpp"
#include "qdp_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qdp: continuously observed qubits, filtering and feedback control"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool quiet = false;

  for (const auto& name : qdp::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides simulation.master_seed)");
    sub->add_option("-o,--out", out, "output directory (overrides output.dir)");
    sub->add_flag("-q,--quiet", quiet, "suppress the verdict on success");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const qdp::cli::RunConfig config = qdp::cli::load_config(config_path);
    qdp::cli::CommandOptions options;
    options.seed = seed;
    options.out_dir = out;
    const qdp::cli::CommandResult result = qdp::cli::run_command(name, config, options);
    const std::string verdict = result.verdict().dump(2);
    if (!result.ok()) {
      std::cerr << verdict << '\n';
      return 1;
    }
    if (!quiet) std::cout << verdict << '\n';
    return 0;
  } catch (const qdp::cli::ConfigError& e) {
    std::cerr << "qdp " << name << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const qdp::InvalidArgument& e) {
    std::cerr << "qdp " << name << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qdp " << name << ": " << e.what() << '\n';
    return 1;
  }
}
