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
#ifndef CLID_HARNESS_HPP_
#define CLID_HARNESS_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clid/config.hpp"
#include "clid/experiments.hpp"
#include "clid/manifest.hpp"

namespace clid {

// Inputs shared by every command. Summaries go to summary; nothing else is
// written to standard streams.
struct RunContext {
  ExperimentConfig config;
  std::filesystem::path run_dir;
  int jobs = 1;
  std::optional<ModelRole> role;  // train only; empty trains both
  bool resume = false;            // train only
  std::ostream* summary = nullptr;
};

// Run-directory layout.
namespace paths {
inline const std::string kWorld = "world/world.json";
inline const std::string kEmbedder = "world/embedder.json";
inline const std::string kDataset = "world/dataset.jsonl";
inline const std::string kSplit = "world/split.json";
inline const std::string kWindow = "attack/window.json";
inline const std::string kMetrics = "reports/metrics.json";
inline const std::string kTrajectoryJson = "reports/trajectory.json";
inline const std::string kTrajectoryCsv = "reports/trajectory.csv";
inline const std::string kTrajectorySvg = "reports/trajectory.svg";
inline const std::string kAssumptionJson = "reports/assumption.json";
inline const std::string kAssumptionCsv = "reports/assumption.csv";
inline const std::string kDefenseJson = "reports/defense.json";
inline const std::string kDefenseCsv = "reports/defense.csv";

std::string checkpoint_dir(ModelRole role);
std::string checkpoint_file(ModelRole role, std::int64_t step);
std::string loader_log(ModelRole role);
std::string indicators(ModelRole role);
std::string attack_model(const std::string& attack_name);
std::string roc_csv(const std::string& attack_name);
}  // namespace paths

// SHA-256 of the canonical config with output_dir removed.
std::string config_hash(const ExperimentConfig& config);

void cmd_world(const RunContext& ctx);
void cmd_train(const RunContext& ctx);
void cmd_attack(const RunContext& ctx);
void cmd_trajectory(const RunContext& ctx);
void cmd_validate_assumption(const RunContext& ctx);
void cmd_defense(const RunContext& ctx);

// world, train (both roles), attack.
void run_pipeline(const RunContext& ctx);

// Reloads the world written by cmd_world after checking its hashes.
AuditWorld load_world(const std::filesystem::path& run_dir, const RunManifest& manifest,
                      std::uint64_t seed);

// Checkpoints recorded for a role, ordered by step.
std::vector<std::string> checkpoint_paths(const RunManifest& manifest, ModelRole role);

struct DefenseRun {
  std::string name;
  DefensePolicy policy;
  std::optional<AugmentationPolicy> augmentation;
  std::vector<MetricsReport> reports;
  double utility_fid = 0.0;
};

// Trains shadow and target under each policy (the attacker mirrors the
// training recipe) and attacks the target. A "none" baseline is added first
// when the list has none.
std::vector<DefenseRun> run_defenses(const ExperimentConfig& config,
                                     const std::vector<NamedDefense>& policies, int jobs);

}  // namespace clid

#endif  // CLID_HARNESS_HPP_
