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
#ifndef CLID_CONFIG_HPP_
#define CLID_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clid/experiments.hpp"
#include "clid/io.hpp"

namespace clid {

struct EvaluationConfig {
  std::vector<double> truncation_levels{1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0};
  std::vector<DistanceKind> metrics{DistanceKind::kToyFid, DistanceKind::kSlicedWasserstein,
                                    DistanceKind::kKernelMmd, DistanceKind::kOneNn};
  int samples_per_condition = 1;
};

struct NamedDefense {
  std::string name;
  DefensePolicy policy;
  std::optional<AugmentationPolicy> augmentation;
};

struct OutputConfig {
  bool write_svg = true;
  bool write_roc_csv = true;
  bool loader_log = false;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "clid_run";
  WorldConfig world;
  ModelConfig model;
  TrainingConfig training;
  // When set, training steps = round(step_ratio * training-set size).
  std::optional<double> step_ratio;
  AttackConfig attack;
  EvaluationConfig evaluation;
  std::vector<NamedDefense> defenses;
  OutputConfig output;

  // Cross-field checks the schema cannot express.
  void validate() const;
  // Training config for a role with steps resolved and the RNG seeded.
  TrainingConfig training_for(ModelRole role) const;
};

const std::string& config_schema_text();

// Checks value against the schema subset used by the published config
// schema: type, properties, required, additionalProperties, enum, items,
// minItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum and local
// $ref. Returns one "path: message" entry per violation.
std::vector<std::string> schema_errors(const Json& value, const Json& schema);

ExperimentConfig parse_config(const Json& value);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical form with every default filled in; hashed into the manifest.
Json to_json(const ExperimentConfig& config);

}  // namespace clid

#endif  // CLID_CONFIG_HPP_
