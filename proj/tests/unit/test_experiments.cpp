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
#include <gtest/gtest.h>

#include <map>

#include "clid/experiments.hpp"
#include "clid/sampling.hpp"

namespace clid {
namespace {

WorldConfig small_world() {
  WorldConfig w;
  w.per_component = 60;
  w.member_n = w.holdout_n = w.aux_member_n = w.aux_holdout_n = 100;
  return w;
}

ModelConfig small_model() {
  ModelConfig m;
  m.hidden_widths = {32, 32};
  return m;
}

TrainingConfig steps(std::int64_t n) {
  TrainingConfig t;
  t.total_steps = n;
  return t;
}

void expect_same_reports(const std::vector<MetricsReport>& a, const std::vector<MetricsReport>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].attack_name, b[i].attack_name);
    EXPECT_EQ(a[i].auc, b[i].auc);
    EXPECT_EQ(a[i].asr, b[i].asr);
    EXPECT_EQ(a[i].tpr_at_1pct_fpr, b[i].tpr_at_1pct_fpr);
    EXPECT_EQ(a[i].tau, b[i].tau);
  }
}

TEST(World, RolesUseDisjointPartitions) {
  const AuditWorld w = build_world(small_world(), 3);
  EXPECT_EQ(w.training_indices(ModelRole::kShadow), w.split.aux_member);
  EXPECT_EQ(w.training_indices(ModelRole::kTarget), w.split.member);
  const auto idx = w.eval_indices(ModelRole::kTarget);
  const auto labels = w.eval_labels(ModelRole::kTarget);
  ASSERT_EQ(idx.size(), 200u);
  EXPECT_EQ(idx[0], w.split.member[0]);
  EXPECT_EQ(idx[100], w.split.holdout[0]);
  EXPECT_TRUE(labels[99]);
  EXPECT_FALSE(labels[100]);
  EXPECT_EQ(model_role_from_string(to_string(ModelRole::kShadow)), ModelRole::kShadow);
}

TEST(Audit, UntrainedTargetsCarryNoSignal) {
  WorldConfig w = small_world();
  w.per_component = 200;
  w.member_n = w.holdout_n = w.aux_member_n = w.aux_holdout_n = 400;
  const auto results = run_audit(w, small_model(), steps(0), AttackConfig{}, {1, 2, 3, 4, 5});
  ASSERT_EQ(results.size(), 5u);
  std::map<std::string, double> mean_auc;
  for (const auto& r : results) {
    for (const auto& report : r.outcome.reports) mean_auc[report.attack_name] += report.auc / 5.0;
  }
  ASSERT_EQ(mean_auc.size(), 4u);
  for (const auto& [name, auc] : mean_auc) {
    EXPECT_GE(auc, 0.45) << name;
    EXPECT_LE(auc, 0.55) << name;
  }
}

TEST(Audit, RepeatableAndJobCountInvariant) {
  AttackConfig serial;
  AttackConfig threaded;
  threaded.jobs = 3;
  const auto a = run_audit(small_world(), small_model(), steps(200), serial, {7});
  const auto b = run_audit(small_world(), small_model(), steps(200), serial, {7});
  const auto c = run_audit(small_world(), small_model(), steps(200), threaded, {7});
  expect_same_reports(a[0].outcome.reports, b[0].outcome.reports);
  expect_same_reports(a[0].outcome.reports, c[0].outcome.reports);
  EXPECT_EQ(a[0].outcome.window.timesteps, c[0].outcome.window.timesteps);
  EXPECT_EQ(a[0].outcome.report("clid_th").queries_per_point, 15);
  EXPECT_EQ(a[0].outcome.report("loss").queries_per_point, 1);
  EXPECT_EQ(a[0].outcome.report("monte_carlo").queries_per_point, 3);
}

TEST(Audit, ReportsFollowConfiguredAttacks) {
  AttackConfig cfg;
  cfg.attacks = {"loss", "clid_th"};
  cfg.reduction.strategy = ReductionStrategy::kClip;
  const auto r = run_audit(small_world(), small_model(), steps(50), cfg, {2});
  ASSERT_EQ(r[0].outcome.reports.size(), 2u);
  EXPECT_EQ(r[0].outcome.reports[0].attack_name, "loss");
  EXPECT_EQ(r[0].outcome.reports[1].attack_name, "clid_th");
  EXPECT_THROW(r[0].outcome.report("clid_vec"), ValidationError);
}

TEST(Trajectory, UntrainedStepIsChance) {
  WorldConfig wc = small_world();
  wc.per_component = 200;
  wc.member_n = wc.holdout_n = wc.aux_member_n = wc.aux_holdout_n = 400;
  std::map<std::string, double> mean_auc;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const AuditWorld w = build_world(wc, seed);
    TrainingConfig t = steps(100);
    t.checkpoint_every = 50;
    std::vector<std::vector<ModelCheckpoint>> ckpts;
    for (ModelRole role : {ModelRole::kShadow, ModelRole::kTarget}) {
      const auto start = initial_model(w, small_model(), role);
      ckpts.push_back(train_role(w, start, role_training_config(t, seed, role), role).checkpoints);
    }
    const auto points = trajectory(w, ckpts[0], ckpts[1], AttackConfig{}, seed);
    ASSERT_EQ(points.size(), 3u);
    EXPECT_EQ(points[0].step, 0);
    EXPECT_EQ(points[2].step, 100);
    const auto untrained = run_attack(w, ckpts[0][0], ckpts[1][0], AttackConfig{}, seed);
    expect_same_reports(points[0].reports, untrained.reports);
    for (const auto& report : points[0].reports) mean_auc[report.attack_name] += report.auc / 5.0;
  }
  for (const auto& [name, auc] : mean_auc) {
    EXPECT_GE(auc, 0.45) << name;
    EXPECT_LE(auc, 0.55) << name;
  }
}

TEST(TrainedModel, SamplesMatchComponentMeans) {
  WorldConfig wc;
  wc.n_components = 4;
  wc.dim = 4;
  wc.per_component = 500;
  wc.member_n = 1850;
  wc.holdout_n = wc.aux_member_n = wc.aux_holdout_n = 50;
  const AuditWorld w = build_world(wc, 11);
  const auto start = initial_model(w, ModelConfig{}, ModelRole::kTarget);
  TrainingConfig t = steps(6000);
  t.batch_size = 128;
  t = role_training_config(t, 11, ModelRole::kTarget);
  const auto warm = train_role(w, start, t, ModelRole::kTarget);
  t.total_steps = 12000;
  t.learning_rate = 5e-5;
  const auto run = train_role(w, warm.checkpoints.back(), t, ModelRole::kTarget);
  const ModelCheckpoint& model = run.checkpoints.back();
  // Sampling starts from N(0, I) while q(x_T) keeps sqrt(abar_T) * mu, so
  // even an exact noise predictor ends at (1 - abar_T) * mu.
  const double shrink = 1.0 - model.schedule.alpha_bar(model.schedule.total_steps);
  Rng rng(12);
  for (const auto& comp : w.world.components) {
    const Vec c = model.embedder.embed(comp.canonical);
    const Mat samples = sample_ddpm_batch(model.model, c.replicate(1, 500), model.schedule, rng);
    const Vec mean = samples.rowwise().mean();
    EXPECT_LT((mean - shrink * comp.mean).cwiseAbs().maxCoeff(), 0.3)
        << "component mean " << comp.mean.transpose() << " sample mean " << mean.transpose();
  }
}

TEST(Assumption, ProducesOneRowPerLevelAndMetric) {
  WorldConfig wc = small_world();
  const AuditWorld w = build_world(wc, 9);
  const auto model = initial_model(w, small_model(), ModelRole::kTarget);
  const std::vector<double> levels{1.0, 0.5, 0.0};
  const std::vector<DistanceKind> metrics{DistanceKind::kToyFid, DistanceKind::kOneNn};
  const auto report =
      validate_assumption(model, w.dataset, w.split.member, w.split.holdout, levels, metrics, 1, 3);
  EXPECT_EQ(report.rows.size(), 6u);
  for (const auto& row : report.rows) {
    EXPECT_GE(row.member_distance, 0.0);
    EXPECT_GE(row.holdout_distance, 0.0);
  }
  EXPECT_NO_THROW(report.row(0.5, DistanceKind::kOneNn));
  const std::vector<std::size_t> few(w.split.member.begin(), w.split.member.begin() + 4);
  EXPECT_THROW(validate_assumption(model, w.dataset, few, few, levels, metrics, 1, 3), ValidationError);
}

}  // namespace
}  // namespace clid
