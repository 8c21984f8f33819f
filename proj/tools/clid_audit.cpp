// Copyright 2026 The CLiD Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clid/harness.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membership-inference auditing for toy conditional diffusion models"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(CLID_VERSION));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
  std::string role;
  bool resume = false;

  const char* commands[] = {"world", "train", "attack", "trajectory", "validate-assumption",
                            "defense"};
  const char* descriptions[] = {
      "Generate the toy world, dataset and member/hold-out split",
      "Train the shadow and/or target model and write checkpoints",
      "Calibrate, fit attacks on the shadow model and audit the target",
      "Refit and evaluate attacks at every saved checkpoint",
      "Measure generated-vs-real distances under truncated conditions",
      "Retrain under each defense policy and report metric and utility deltas"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--jobs", jobs, "Worker threads for scoring (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Run directory (overrides config output_dir)");
    if (std::string(commands[i]) == "train") {
      sub->add_option("--role", role, "Train only this role")
          ->check(CLI::IsMember({"shadow", "target"}));
      sub->add_flag("--resume", resume, "Continue from the latest matching checkpoint");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    clid::RunContext ctx;
    ctx.config = clid::load_config(config_path);
    if (seed) ctx.config.seed = *seed;
    if (!out_dir.empty()) ctx.config.output_dir = out_dir;
    ctx.run_dir = std::filesystem::path(ctx.config.output_dir);
    ctx.jobs = jobs;
    ctx.resume = resume;
    if (!role.empty()) ctx.role = clid::model_role_from_string(role);
    ctx.summary = &std::cout;

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "world") {
      clid::cmd_world(ctx);
    } else if (command == "train") {
      clid::cmd_train(ctx);
    } else if (command == "attack") {
      clid::cmd_attack(ctx);
    } else if (command == "trajectory") {
      clid::cmd_trajectory(ctx);
    } else if (command == "validate-assumption") {
      clid::cmd_validate_assumption(ctx);
    } else {
      clid::cmd_defense(ctx);
    }
  } catch (const clid::ValidationError& e) {
    std::cerr << "clid-audit: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "clid-audit: malformed input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "clid-audit: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
