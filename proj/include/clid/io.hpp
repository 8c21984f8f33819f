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
#ifndef CLID_IO_HPP_
#define CLID_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "clid/attacks.hpp"
#include "clid/experiments.hpp"
#include "clid/metrics.hpp"
#include "clid/toy_world.hpp"

namespace clid {

using Json = nlohmann::ordered_json;

// Files are written to a sibling temporary and renamed into place.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

Json to_json(const GaussianMixtureWorld& world);
GaussianMixtureWorld world_from_json(const Json& j);

// One JSON object per line: {"id", "x", "c"}.
std::string dataset_to_jsonl(const ToyDataset& dataset);
ToyDataset dataset_from_jsonl(const std::string& text);

Json to_json(const SplitSpec& split);
SplitSpec split_from_json(const Json& j);

Json to_json(const ConditionEmbedder& embedder);
ConditionEmbedder embedder_from_json(const Json& j);

// One line per audited point: point_id, split_label, discrepancies,
// elbo_proxy, query_count, seed.
std::string indicators_to_jsonl(const ScoredSet& set, ModelRole role);

Json to_json(const RobustScalerParams& scaler);
RobustScalerParams scaler_from_json(const Json& j);

Json to_json(const ThresholdAttackModel& model, ScalerCenter center);
ThresholdAttackModel threshold_model_from_json(const Json& j);

Json to_json(const VectorAttackModel& model);
VectorAttackModel vector_model_from_json(const Json& j);

Json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const Json& j);

Json to_json(const AssumptionReport& report);

Json to_json(const TimestepWindow& window);

// Columns: threshold,fpr,tpr. Infinite thresholds are written as inf/-inf.
std::string roc_to_csv(const RocCurve& roc);

// Columns: step,attack,auc,asr,tpr_at_1pct_fpr.
std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& points);

// Columns: level,metric,member,holdout,difference.
std::string assumption_to_csv(const AssumptionReport& report);

}  // namespace clid

#endif  // CLID_IO_HPP_
