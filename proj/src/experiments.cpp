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
#include "clid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "clid/parallel.hpp"
#include "clid/sampling.hpp"

namespace clid {

namespace {

constexpr std::uint64_t kImportanceSalt = 0x1A9D7C3B5E2F4861ULL;

std::vector<int> default_candidates(int total_steps) {
  std::vector<int> out;
  for (int t = 5; t <= total_steps; t += 5) out.push_back(t);
  if (out.empty()) out.push_back(total_steps);
  return out;
}

ModelHandle handle_of(const ModelCheckpoint& ckpt) {
  return ModelHandle{ckpt.model, ckpt.schedule, ckpt.embedder};
}

std::vector<LabeledScore> labeled(const ScoredSet& set,
                                  const std::vector<double>& scores) {
  std::vector<LabeledScore> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = LabeledScore{set.indices[i], scores[i], set.labels[i]};
  }
  return out;
}

// std::vector<bool> has no contiguous storage; spans need a real bool array.
std::unique_ptr<bool[]> bool_array(const std::vector<bool>& labels) {
  auto out = std::make_unique<bool[]>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i];
  return out;
}

std::vector<IndicatorEstimate> null_only(const std::vector<IndicatorEstimate>& in) {
  std::vector<IndicatorEstimate> out = in;
  for (auto& e : out) {
    if (!e.discrepancies.empty()) e.discrepancies = {e.discrepancies.back()};
  }
  return out;
}

std::vector<double> threshold_scores(const std::vector<IndicatorEstimate>& est,
                                     const ThresholdAttackModel& model) {
  std::vector<double> out(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) out[i] = score_clid_th(est[i], model);
  return out;
}

// Keeps the central max(M, N) entries when the plan draws fewer samples than
// the window has timesteps.
std::vector<int> plan_window(const std::vector<int>& window, int m_draws, int n_draws) {
  const std::size_t draws = static_cast<std::size_t>(std::max(m_draws, n_draws));
  if (draws >= window.size()) return window;
  const std::size_t begin = (window.size() - draws) / 2;
  return std::vector<int>(window.begin() + static_cast<std::ptrdiff_t>(begin),
                          window.begin() + static_cast<std::ptrdiff_t>(begin + draws));
}

}  // namespace

std::string to_string(ModelRole role) {
  return role == ModelRole::kShadow ? "shadow" : "target";
}

ModelRole model_role_from_string(const std::string& name) {
  if (name == "shadow") return ModelRole::kShadow;
  if (name == "target") return ModelRole::kTarget;
  throw ValidationError("unknown role '" + name + "'");
}

const std::vector<std::size_t>& AuditWorld::training_indices(ModelRole role) const {
  return role == ModelRole::kShadow ? split.aux_member : split.member;
}

std::vector<std::size_t> AuditWorld::eval_indices(ModelRole role) const {
  const auto& in = role == ModelRole::kShadow ? split.aux_member : split.member;
  const auto& out = role == ModelRole::kShadow ? split.aux_holdout : split.holdout;
  std::vector<std::size_t> all(in);
  all.insert(all.end(), out.begin(), out.end());
  return all;
}

std::vector<bool> AuditWorld::eval_labels(ModelRole role) const {
  const auto& in = role == ModelRole::kShadow ? split.aux_member : split.member;
  const auto& out = role == ModelRole::kShadow ? split.aux_holdout : split.holdout;
  std::vector<bool> labels(in.size(), true);
  labels.insert(labels.end(), out.size(), false);
  return labels;
}

AuditWorld build_world(const WorldConfig& config, std::uint64_t seed) {
  AuditWorld w;
  w.seed = seed;
  w.embedder = ConditionEmbedder::random(config.vocabulary_size, config.embedding_dim,
                                         derive_seed(seed, SeedStream::kEmbedder));
  w.world = generate_world(derive_seed(seed, SeedStream::kWorld), config.n_components,
                           config.dim, config.stddev, w.embedder);
  w.dataset = sample_dataset(w.world, config.per_component,
                             derive_seed(seed, SeedStream::kDataset));
  w.split = split_dataset(w.dataset, derive_seed(seed, SeedStream::kSplit),
                          config.member_n, config.holdout_n, config.aux_member_n,
                          config.aux_holdout_n);
  return w;
}

ModelCheckpoint initial_model(const AuditWorld& world, const ModelConfig& config,
                              ModelRole role) {
  const std::uint64_t init_seed = derive_seed(
      world.seed,
      role == ModelRole::kShadow ? SeedStream::kShadowInit : SeedStream::kTargetInit);
  DenoiserNet net(world.world.dim, world.embedder.embedding_dim(),
                  config.hidden_widths, config.time_dim);
  net.init_random(init_seed);
  NoiseSchedule schedule = make_linear_schedule(config.total_steps, config.beta_start,
                                                config.beta_end, config.sigma_mode);
  SeedLineage seeds;
  seeds.world_seed = world.seed;
  seeds.init_seed = init_seed;
  return initial_checkpoint(std::move(net), std::move(schedule), world.embedder, seeds);
}

TrainingConfig role_training_config(TrainingConfig base, std::uint64_t seed,
                                    ModelRole role) {
  base.rng_seed = derive_seed(
      seed,
      role == ModelRole::kShadow ? SeedStream::kShadowTrain : SeedStream::kTargetTrain);
  return base;
}

TrainingRun train_role(const AuditWorld& world, const ModelCheckpoint& start,
                       TrainingConfig config, ModelRole role,
                       const DefensePolicy& defense, const BatchObserver& observer) {
  const auto& indices = world.training_indices(role);
  ToyDataset rows = world.dataset.subset(indices);
  if (defense.kind != DefenseKind::kNone) {
    defense.validate();
    Rng rng(mix_seed(derive_seed(world.seed, SeedStream::kDefense),
                     static_cast<std::uint64_t>(role)));
    rows = apply_defense(rows, defense, rng);
  }
  std::vector<std::size_t> local(rows.points.size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = i;
  TrainingRun run = train(start, rows, local, config, observer);
  for (auto& ckpt : run.checkpoints) ckpt.seeds.train_seed = config.rng_seed;
  return run;
}

ScoredSet score_set(const AuditWorld& world, const ModelCheckpoint& model,
                    ModelRole role, const std::vector<int>& timesteps,
                    const AttackConfig& config, std::uint64_t seed) {
  ScoredSet set;
  set.indices = world.eval_indices(role);
  set.labels = world.eval_labels(role);
  set.noise_seed = derive_seed(
      seed,
      role == ModelRole::kShadow ? SeedStream::kShadowNoise : SeedStream::kTargetNoise);
  MonteCarloPlan plan;
  plan.timesteps = timesteps;
  plan.m_draws = config.m_draws;
  plan.n_draws = config.n_draws;
  plan.noise_seed = set.noise_seed;
  plan.share_noise_across_conditions = config.share_noise;
  plan.validate(model.schedule);

  const ModelHandle handle = handle_of(model);
  const std::size_t n = set.indices.size();
  set.estimates.resize(n);
  set.loss_scores.resize(n);
  set.monte_carlo_scores.resize(n);
  std::vector<std::int64_t> loss_q(n), mc_q(n), imp_q(n);
  const std::uint64_t reduction_seed = derive_seed(seed, SeedStream::kReduction);

  parallel_for(n, config.jobs, [&](std::size_t i) {
    const std::size_t idx = set.indices[i];
    const DataPoint& p = world.dataset.points[idx];
    const TokenSequence c =
        config.pseudo_caption ? pseudo_caption(p.x, world.world) : p.c;
    const MonteCarloPlan point_plan = plan.for_point(idx);

    ReducedConditionSet reduction;
    switch (config.reduction.strategy) {
      case ReductionStrategy::kClip:
        reduction = reduce_clip(c);
        break;
      case ReductionStrategy::kEmbedNoise: {
        Rng rng(mix_seed(reduction_seed, idx));
        reduction = reduce_embed_noise(c, world.embedder, config.reduction.scales, rng);
        break;
      }
      case ReductionStrategy::kImportance: {
        MonteCarloPlan imp_plan = point_plan;
        imp_plan.noise_seed = mix_seed(point_plan.noise_seed ^ kImportanceSalt, 0);
        QueryCounter counter(model.model);
        const ModelHandle counted{counter, model.schedule, model.embedder};
        const ImportanceProfile profile = token_importance(counted, p.x, c, imp_plan);
        imp_q[i] = counter.count();
        reduction = reduce_importance(c, profile, config.reduction.proportions);
        break;
      }
    }
    set.estimates[i] = score_point(handle, p.x, c, reduction, point_plan);
    const BaselineScore loss =
        score_baseline(handle, p.x, c, BaselineKind::kLoss, point_plan);
    const BaselineScore mc =
        score_baseline(handle, p.x, c, BaselineKind::kMonteCarlo, point_plan);
    set.loss_scores[i] = loss.score;
    set.monte_carlo_scores[i] = mc.score;
    loss_q[i] = loss.query_count;
    mc_q[i] = mc.query_count;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (loss_q[i] != loss_q[0] || mc_q[i] != mc_q[0])) {
      throw RuntimeFailure("baseline query counts differ between points");
    }
    set.importance_queries += imp_q[i];
  }
  if (n > 0) {
    set.loss_queries = loss_q[0];
    set.monte_carlo_queries = mc_q[0];
  }
  return set;
}

const MetricsReport& AttackOutcome::report(const std::string& attack_name) const {
  for (const auto& r : reports) {
    if (r.attack_name == attack_name) return r;
  }
  for (const auto& r : extra_reports) {
    if (r.attack_name == attack_name) return r;
  }
  throw ValidationError("no report for attack '" + attack_name + "'");
}

AttackOutcome run_attack(const AuditWorld& world, const ModelCheckpoint& shadow,
                         const ModelCheckpoint& target, const AttackConfig& config,
                         std::uint64_t seed) {
  for (const auto& name : config.attacks) {
    if (std::find(kDefaultAttacks.begin(), kDefaultAttacks.end(), name) ==
        kDefaultAttacks.end()) {
      throw ValidationError("unknown attack '" + name + "'");
    }
  }
  AttackOutcome out;
  const int total_steps = shadow.schedule.total_steps;
  if (!config.fixed_window.empty()) {
    out.window.timesteps = config.fixed_window;
  } else {
    std::vector<ProbePoint> probes;
    const auto indices = world.eval_indices(ModelRole::kShadow);
    const auto labels = world.eval_labels(ModelRole::kShadow);
    probes.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const DataPoint& p = world.dataset.points[indices[i]];
      const TokenSequence c =
          config.pseudo_caption ? pseudo_caption(p.x, world.world) : p.c;
      probes.push_back(ProbePoint{p.x, c, labels[i]});
    }
    const auto candidates = config.candidate_timesteps.empty()
                                ? default_candidates(total_steps)
                                : config.candidate_timesteps;
    out.window = calibrate_timestep_window(
        handle_of(shadow), probes, candidates, config.window_width,
        mix_seed(derive_seed(seed, SeedStream::kShadowNoise), 0xCA11));
  }
  out.plan_timesteps = plan_window(out.window.timesteps, config.m_draws, config.n_draws);

  out.shadow = score_set(world, shadow, ModelRole::kShadow, out.plan_timesteps,
                         config, seed);
  out.target = score_set(world, target, ModelRole::kTarget, out.plan_timesteps,
                         config, seed);

  const auto shadow_labels = bool_array(out.shadow.labels);
  const std::span<const bool> labels(shadow_labels.get(), out.shadow.labels.size());
  out.threshold = fit_threshold_attack(out.shadow.estimates, labels,
                                       config.scaler_center);
  out.threshold_median =
      fit_threshold_attack(out.shadow.estimates, labels, ScalerCenter::kMedian);
  const auto shadow_null = null_only(out.shadow.estimates);
  out.threshold_null_only =
      fit_threshold_attack(shadow_null, labels, config.scaler_center);

  std::vector<FeatureVector> shadow_features(out.shadow.estimates.size());
  for (std::size_t i = 0; i < shadow_features.size(); ++i) {
    shadow_features[i] = build_feature_vector(out.shadow.estimates[i]);
  }
  out.vector = train_vector_classifier(shadow_features, labels, config.boosting);

  const std::int64_t clid_queries =
      out.target.estimates.empty() ? 0 : out.target.estimates.front().query_count;

  auto baseline_report = [&](const std::string& name,
                             const std::vector<double>& shadow_scores,
                             const std::vector<double>& target_scores,
                             std::int64_t queries) {
    const ThresholdFit fit = fit_decision_threshold(shadow_scores, labels);
    auto scored = labeled(out.target, target_scores);
    out.report_scores.push_back(scored);
    return make_metrics_report(name, scored, fit.tau, queries);
  };

  for (const auto& name : config.attacks) {
    if (name == "clid_th") {
      const auto scored =
          labeled(out.target, threshold_scores(out.target.estimates, out.threshold));
      out.reports.push_back(
          make_metrics_report(name, scored, out.threshold.tau, clid_queries));
      out.report_scores.push_back(scored);
    } else if (name == "clid_vec") {
      std::vector<double> scores(out.target.estimates.size());
      for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = out.vector.confidence(build_feature_vector(out.target.estimates[i]));
      }
      const auto scored = labeled(out.target, scores);
      out.reports.push_back(
          make_metrics_report(name, scored, out.vector.tau, clid_queries));
      out.report_scores.push_back(scored);
    } else if (name == "loss") {
      out.reports.push_back(baseline_report(name, out.shadow.loss_scores,
                                            out.target.loss_scores,
                                            out.target.loss_queries));
    } else if (name == "monte_carlo") {
      out.reports.push_back(baseline_report(name, out.shadow.monte_carlo_scores,
                                            out.target.monte_carlo_scores,
                                            out.target.monte_carlo_queries));
    }
  }

  {
    const auto scored = labeled(
        out.target, threshold_scores(out.target.estimates, out.threshold_median));
    out.extra_reports.push_back(make_metrics_report(
        "clid_th_median", scored, out.threshold_median.tau, clid_queries));
  }
  {
    const auto target_null = null_only(out.target.estimates);
    const auto scored =
        labeled(out.target, threshold_scores(target_null, out.threshold_null_only));
    out.extra_reports.push_back(make_metrics_report(
        "clid_th_null_only", scored, out.threshold_null_only.tau, clid_queries));
  }
  return out;
}

std::vector<AuditResult> run_audit(const WorldConfig& world_cfg,
                                   const ModelConfig& model_cfg,
                                   const TrainingConfig& train_cfg,
                                   const AttackConfig& attack_cfg,
                                   const std::vector<std::uint64_t>& seeds,
                                   const DefensePolicy& defense) {
  std::vector<AuditResult> results;
  for (const std::uint64_t seed : seeds) {
    const AuditWorld world = build_world(world_cfg, seed);
    auto trained = [&](ModelRole role) {
      const ModelCheckpoint start = initial_model(world, model_cfg, role);
      TrainingConfig cfg = role_training_config(train_cfg, seed, role);
      cfg.checkpoint_every = 0;
      TrainingRun run = train_role(world, start, cfg, role, defense);
      return std::move(run.checkpoints.back());
    };
    const ModelCheckpoint shadow = trained(ModelRole::kShadow);
    const ModelCheckpoint target = trained(ModelRole::kTarget);
    results.push_back(AuditResult{seed, run_attack(world, shadow, target, attack_cfg, seed)});
  }
  return results;
}

std::vector<TrajectoryPoint> trajectory(const AuditWorld& world,
                                        const std::vector<ModelCheckpoint>& shadow,
                                        const std::vector<ModelCheckpoint>& target,
                                        const AttackConfig& config,
                                        std::uint64_t seed) {
  require(shadow.size() == target.size(),
          "shadow and target checkpoint lists differ in length");
  std::vector<TrajectoryPoint> out;
  out.reserve(shadow.size());
  for (std::size_t i = 0; i < shadow.size(); ++i) {
    require(shadow[i].step == target[i].step,
            "shadow and target checkpoints are at different steps");
    AttackOutcome outcome = run_attack(world, shadow[i], target[i], config, seed);
    out.push_back(TrajectoryPoint{shadow[i].step, std::move(outcome.reports)});
  }
  return out;
}

const AssumptionRow& AssumptionReport::row(double level, DistanceKind metric) const {
  for (const auto& r : rows) {
    if (std::abs(r.level - level) < 1e-12 && r.metric == metric) return r;
  }
  throw ValidationError("no assumption row for level " + std::to_string(level) +
                        " and metric " + to_string(metric));
}

TokenSequence truncate_condition(const TokenSequence& c, double level) {
  require(level >= 0.0 && level <= 1.0, "truncation level must be in [0, 1]");
  const auto keep = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(c.size()) - 1e-9));
  return TokenSequence(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(
                                                  std::min(keep, c.size())));
}

namespace {

Mat generate_for(const ModelCheckpoint& model, const ToyDataset& dataset,
                 const std::vector<std::size_t>& indices, double level,
                 int samples_per_condition, std::uint64_t seed) {
  const int cond_dim = model.embedder.embedding_dim();
  const auto total = static_cast<Eigen::Index>(indices.size()) * samples_per_condition;
  Mat cond(cond_dim, total);
  Eigen::Index col = 0;
  for (const std::size_t idx : indices) {
    const Vec e = model.embedder.embed(truncate_condition(dataset.points[idx].c, level));
    for (int s = 0; s < samples_per_condition; ++s) cond.col(col++) = e;
  }
  Rng rng(seed);
  return sample_ddpm_batch(model.model, cond, model.schedule, rng);
}

Mat real_for(const ToyDataset& dataset, const std::vector<std::size_t>& indices) {
  Mat out(dataset.dim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = dataset.points[indices[i]].x;
  }
  return out;
}

}  // namespace

AssumptionReport validate_assumption(const ModelCheckpoint& model,
                                     const ToyDataset& dataset,
                                     const std::vector<std::size_t>& members,
                                     const std::vector<std::size_t>& holdouts,
                                     const std::vector<double>& truncation_levels,
                                     const std::vector<DistanceKind>& metrics,
                                     int samples_per_condition, std::uint64_t seed) {
  require(samples_per_condition >= 1, "samples_per_condition must be >= 1");
  require(!members.empty() && !holdouts.empty(), "member and hold-out sets must be non-empty");
  require(!truncation_levels.empty() && !metrics.empty(),
          "need at least one truncation level and one metric");
  const Mat real_m = real_for(dataset, members);
  const Mat real_h = real_for(dataset, holdouts);
  AssumptionReport report;
  for (std::size_t li = 0; li < truncation_levels.size(); ++li) {
    const double level = truncation_levels[li];
    const std::uint64_t level_seed =
        mix_seed(derive_seed(seed, SeedStream::kSampling), li);
    const Mat gen_m = generate_for(model, dataset, members, level,
                                   samples_per_condition, mix_seed(level_seed, 0));
    const Mat gen_h = generate_for(model, dataset, holdouts, level,
                                   samples_per_condition, mix_seed(level_seed, 1));
    for (const DistanceKind metric : metrics) {
      AssumptionRow row;
      row.level = level;
      row.metric = metric;
      row.member_distance = sample_distance(metric, gen_m, real_m);
      row.holdout_distance = sample_distance(metric, gen_h, real_h);
      report.rows.push_back(row);
    }
  }
  return report;
}

double generation_utility_fid(const ModelCheckpoint& model, const AuditWorld& world,
                              std::uint64_t seed) {
  const Mat gen = generate_for(model, world.dataset, world.split.holdout, 1.0, 1,
                               mix_seed(derive_seed(seed, SeedStream::kSampling), 0x0717));
  return toy_fid(gen, real_for(world.dataset, world.split.holdout));
}

}  // namespace clid
