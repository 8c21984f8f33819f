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
#ifndef CLID_EXPERIMENTS_HPP_
#define CLID_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clid/attacks.hpp"
#include "clid/distances.hpp"
#include "clid/indicator.hpp"
#include "clid/metrics.hpp"
#include "clid/reduction.hpp"
#include "clid/toy_world.hpp"
#include "clid/training.hpp"

namespace clid {

struct WorldConfig {
  int n_components = 8;
  int dim = 8;
  double stddev = 1.0;
  int per_component = 200;
  int vocabulary_size = 32;
  int embedding_dim = 16;
  std::size_t member_n = 400;
  std::size_t holdout_n = 400;
  std::size_t aux_member_n = 400;
  std::size_t aux_holdout_n = 400;
};

struct ModelConfig {
  std::vector<int> hidden_widths{128, 128, 128};
  int time_dim = DenoiserNet::kDefaultTimeDim;
  int total_steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.05;
  SigmaMode sigma_mode = SigmaMode::kBeta;
};

struct ReductionConfig {
  ReductionStrategy strategy = ReductionStrategy::kImportance;
  std::vector<double> proportions{0.3, 0.5, 0.7};
  std::vector<double> scales{0.5, 0.7, 0.9};
};

inline const std::vector<std::string> kDefaultAttacks{"clid_th", "clid_vec",
                                                      "loss", "monte_carlo"};

struct AttackConfig {
  ReductionConfig reduction;
  int m_draws = 3;
  int n_draws = 3;
  bool share_noise = true;
  std::vector<int> candidate_timesteps;  // empty: every 5th step
  int window_width = 3;
  std::vector<int> fixed_window;  // non-empty skips calibration
  ScalerCenter scaler_center = ScalerCenter::kMean;
  BoostingParams boosting;
  bool pseudo_caption = false;
  std::vector<std::string> attacks = kDefaultAttacks;
  int jobs = 1;
};

enum class ModelRole { kShadow, kTarget };

std::string to_string(ModelRole role);
ModelRole model_role_from_string(const std::string& name);

// World, embedder, dataset and split, all derived from one seed.
struct AuditWorld {
  GaussianMixtureWorld world;
  ConditionEmbedder embedder;
  ToyDataset dataset;
  SplitSpec split;
  std::uint64_t seed = 0;

  // aux_member for the shadow, member for the target.
  const std::vector<std::size_t>& training_indices(ModelRole role) const;
  // (members, hold-outs) audited with the given role's model.
  std::vector<std::size_t> eval_indices(ModelRole role) const;
  std::vector<bool> eval_labels(ModelRole role) const;
};

AuditWorld build_world(const WorldConfig& config, std::uint64_t seed);

ModelCheckpoint initial_model(const AuditWorld& world, const ModelConfig& config,
                              ModelRole role);

// Trains the role's model on its training indices. The defense is applied to
// those training rows only.
TrainingRun train_role(const AuditWorld& world, const ModelCheckpoint& start,
                       TrainingConfig config, ModelRole role,
                       const DefensePolicy& defense = {},
                       const BatchObserver& observer = {});

// Seeds the role's training stream from the audit seed.
TrainingConfig role_training_config(TrainingConfig base, std::uint64_t seed,
                                    ModelRole role);

// Per-point scores of one audited set.
struct ScoredSet {
  std::vector<std::size_t> indices;
  std::vector<bool> labels;
  std::vector<IndicatorEstimate> estimates;
  std::vector<double> loss_scores;
  std::vector<double> monte_carlo_scores;
  std::int64_t loss_queries = 0;
  std::int64_t monte_carlo_queries = 0;
  std::int64_t importance_queries = 0;
  std::uint64_t noise_seed = 0;
};

ScoredSet score_set(const AuditWorld& world, const ModelCheckpoint& model,
                    ModelRole role, const std::vector<int>& timesteps,
                    const AttackConfig& config, std::uint64_t seed);

struct AttackOutcome {
  TimestepWindow window;
  std::vector<int> plan_timesteps;
  ThresholdAttackModel threshold;
  ThresholdAttackModel threshold_median;
  ThresholdAttackModel threshold_null_only;
  VectorAttackModel vector;
  ScoredSet shadow;
  ScoredSet target;
  // One report per configured attack, in config order.
  std::vector<MetricsReport> reports;
  // Target scores behind each entry of reports, same order.
  std::vector<std::vector<LabeledScore>> report_scores;
  // Informational variants: clid_th_median, clid_th_null_only.
  std::vector<MetricsReport> extra_reports;

  const MetricsReport& report(const std::string& attack_name) const;
};

// Calibrates the window on the shadow model, fits attacks on shadow scores,
// then transfers them unchanged to the target's member/hold-out split.
AttackOutcome run_attack(const AuditWorld& world, const ModelCheckpoint& shadow,
                         const ModelCheckpoint& target, const AttackConfig& config,
                         std::uint64_t seed);

struct AuditResult {
  std::uint64_t seed = 0;
  AttackOutcome outcome;
};

// Full pipeline per seed: world, shadow and target training, attack.
std::vector<AuditResult> run_audit(const WorldConfig& world_cfg,
                                   const ModelConfig& model_cfg,
                                   const TrainingConfig& train_cfg,
                                   const AttackConfig& attack_cfg,
                                   const std::vector<std::uint64_t>& seeds,
                                   const DefensePolicy& defense = {});

struct TrajectoryPoint {
  std::int64_t step = 0;
  std::vector<MetricsReport> reports;
};

// Shadow and target checkpoint lists must share their step sequence.
std::vector<TrajectoryPoint> trajectory(const AuditWorld& world,
                                        const std::vector<ModelCheckpoint>& shadow,
                                        const std::vector<ModelCheckpoint>& target,
                                        const AttackConfig& config,
                                        std::uint64_t seed);

struct AssumptionRow {
  double level = 1.0;  // fraction of the condition kept; 0 is null
  DistanceKind metric = DistanceKind::kToyFid;
  double member_distance = 0.0;
  double holdout_distance = 0.0;

  double difference() const { return holdout_distance - member_distance; }
};

struct AssumptionReport {
  std::vector<AssumptionRow> rows;

  const AssumptionRow& row(double level, DistanceKind metric) const;
};

// First ceil(level * L) tokens; level 0 gives the null condition.
TokenSequence truncate_condition(const TokenSequence& c, double level);

// For each truncation level, samples samples_per_condition points per
// member/hold-out condition and measures the distance to the real set.
AssumptionReport validate_assumption(const ModelCheckpoint& model,
                                     const ToyDataset& dataset,
                                     const std::vector<std::size_t>& members,
                                     const std::vector<std::size_t>& holdouts,
                                     const std::vector<double>& truncation_levels,
                                     const std::vector<DistanceKind>& metrics,
                                     int samples_per_condition, std::uint64_t seed);

// toy_fid between samples generated under the hold-out conditions and the
// real hold-out data.
double generation_utility_fid(const ModelCheckpoint& model, const AuditWorld& world,
                              std::uint64_t seed);

}  // namespace clid

#endif  // CLID_EXPERIMENTS_HPP_
