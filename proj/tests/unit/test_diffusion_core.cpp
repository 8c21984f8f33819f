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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "clid/checkpoint.hpp"
#include "clid/embedder.hpp"
#include "clid/sampling.hpp"
#include "clid/schedule.hpp"
#include "clid/toy_world.hpp"
#include "clid/training.hpp"
#include "test_support.hpp"

namespace clid {
namespace {

TEST(Schedule, HandProductOfFixedBetas) {
  const NoiseSchedule s = make_linear_schedule(4, 0.1, 0.4);
  const double expected_betas[] = {0.1, 0.2, 0.3, 0.4};
  const double expected_bars[] = {0.9, 0.72, 0.504, 0.3024};
  for (int t = 1; t <= 4; ++t) {
    EXPECT_NEAR(s.beta(t), expected_betas[t - 1], 1e-15);
    EXPECT_NEAR(s.alpha_bar(t), expected_bars[t - 1], 1e-15);
  }
}

TEST(Schedule, SingleStep) {
  const NoiseSchedule s = make_linear_schedule(1, 0.5, 0.5);
  ASSERT_EQ(s.total_steps, 1);
  EXPECT_DOUBLE_EQ(s.alpha_bar(1), 0.5);
}

TEST(Schedule, InvariantsOnDefault) {
  for (SigmaMode mode : {SigmaMode::kBeta, SigmaMode::kPosterior}) {
    const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.05, mode);
    double product = 1.0;
    for (int t = 1; t <= 100; ++t) {
      EXPECT_GT(s.beta(t), 0.0);
      EXPECT_LT(s.beta(t), 1.0);
      product *= 1.0 - s.beta(t);
      EXPECT_LE(std::abs(s.alpha_bar(t) - product), 1e-12 * product);
      if (t > 1) EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
      EXPECT_GE(s.sigma(t), 0.0);
    }
  }
}

TEST(Schedule, SigmaModes) {
  const NoiseSchedule b = make_linear_schedule(10, 0.01, 0.2, SigmaMode::kBeta);
  const NoiseSchedule p = make_linear_schedule(10, 0.01, 0.2, SigmaMode::kPosterior);
  for (int t = 1; t <= 10; ++t) {
    EXPECT_NEAR(b.sigma(t) * b.sigma(t), b.beta(t), 1e-15);
    const double prev = t == 1 ? 1.0 : p.alpha_bar(t - 1);
    const double posterior = (1.0 - prev) / (1.0 - p.alpha_bar(t)) * p.beta(t);
    EXPECT_NEAR(p.sigma(t) * p.sigma(t), posterior, 1e-15);
  }
}

TEST(Schedule, RejectsInvalidInput) {
  EXPECT_THROW(make_linear_schedule(0, 0.1, 0.2), ValidationError);
  EXPECT_THROW(make_linear_schedule(10, 0.0, 0.2), ValidationError);
  EXPECT_THROW(make_linear_schedule(10, 0.1, 1.0), ValidationError);
  EXPECT_THROW(make_linear_schedule(10, 0.3, 0.2), ValidationError);
}

TEST(ForwardDiffuse, ClosedFormExamples) {
  Vec x0(2);
  x0 << 2.0, 0.0;
  const Vec zero = Vec::Zero(2);
  EXPECT_TRUE(forward_diffuse(x0, 0.25, zero).isApprox((Vec(2) << 1.0, 0.0).finished()));
  Vec eps(2);
  eps << 0.0, 2.0;
  const Vec xt = forward_diffuse(x0, 0.25, eps);
  EXPECT_NEAR(xt[0], 1.0, 1e-12);
  EXPECT_NEAR(xt[1], 1.7320508, 1e-7);
  EXPECT_TRUE(forward_diffuse(x0, 1.0, eps).isApprox(x0));
}

TEST(ForwardDiffuse, RejectsBadShapesAndTimesteps) {
  const NoiseSchedule s = make_linear_schedule(10, 0.01, 0.2);
  EXPECT_THROW(forward_diffuse(Vec::Zero(2), 0, Vec::Zero(2), s), ValidationError);
  EXPECT_THROW(forward_diffuse(Vec::Zero(2), 11, Vec::Zero(2), s), ValidationError);
  EXPECT_THROW(forward_diffuse(Vec::Zero(2), 3, Vec::Zero(3), s), ValidationError);
}

TEST(Embedder, PadIsZeroAndEmptyIsZero) {
  const ConditionEmbedder e = ConditionEmbedder::random(32, 16, 7);
  const std::vector<int> pad{ConditionEmbedder::kPadToken};
  EXPECT_TRUE(e.embed(pad).isZero(0.0));
  EXPECT_TRUE(e.embed(std::vector<int>{}).isZero(0.0));
  const std::vector<int> seq{3, 5, 9};
  const Vec mean = (e.table().col(3) + e.table().col(5) + e.table().col(9)) / 3.0;
  EXPECT_TRUE(e.embed(seq).isApprox(mean, 1e-14));
  EXPECT_TRUE(e.embed(seq) == e.embed(seq));
  EXPECT_THROW(e.embed(std::vector<int>{32}), ValidationError);
}

DenoiserNet small_net(std::uint64_t seed, std::vector<int> hidden = {16, 16}) {
  DenoiserNet net(3, 4, std::move(hidden), 8);
  net.init_random(seed);
  return net;
}

TEST(Denoiser, ZeroOutputLayerGivesZero) {
  DenoiserNet net = small_net(1);
  net.zero_output_layer();
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    EXPECT_TRUE(predict_eps(net, standard_normal(3, rng), 1 + i, standard_normal(4, rng))
                    .isZero(0.0));
  }
}

TEST(Denoiser, DeterministicAndFinite) {
  const DenoiserNet net = small_net(2);
  Rng rng(4);
  const Vec x = standard_normal(3, rng);
  const Vec c = standard_normal(4, rng);
  const Vec a = predict_eps(net, x, 17, c);
  const Vec b = predict_eps(net, x, 17, c);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a.allFinite());
  EXPECT_EQ(a.size(), 3);
}

TEST(Denoiser, BatchColumnsMatchSingleQueries) {
  const DenoiserNet net = small_net(5);
  Rng rng(6);
  Mat x(3, 4);
  Mat c(4, 4);
  for (int b = 0; b < 4; ++b) {
    x.col(b) = standard_normal(3, rng);
    c.col(b) = standard_normal(4, rng);
  }
  const std::vector<int> ts{1, 20, 50, 99};
  const Mat batch = net.predict(x, ts, c);
  for (int b = 0; b < 4; ++b) {
    EXPECT_TRUE(batch.col(b).isApprox(predict_eps(net, x.col(b), ts[b], c.col(b)), 1e-12));
  }
}

TEST(Denoiser, RejectsShapeMismatch) {
  const DenoiserNet net = small_net(1);
  EXPECT_THROW(predict_eps(net, Vec::Zero(2), 1, Vec::Zero(4)), ValidationError);
  EXPECT_THROW(predict_eps(net, Vec::Zero(3), 1, Vec::Zero(5)), ValidationError);
}

TEST(Denoiser, QueryCounterCountsColumns) {
  const DenoiserNet net = small_net(1);
  QueryCounter counter(net);
  predict_eps(counter, Vec::Zero(3), 1, Vec::Zero(4));
  counter.predict(Mat::Zero(3, 5), std::vector<int>(5, 2), Mat::Zero(4, 5));
  EXPECT_EQ(counter.count(), 6);
  counter.reset();
  EXPECT_EQ(counter.count(), 0);
}

TEST(Denoiser, TimestepEncodingIsSinusoidal) {
  const DenoiserNet net = small_net(1);
  const Vec e = net.timestep_encoding(7);
  ASSERT_EQ(e.size(), 8);
  for (int i = 0; i < 4; ++i) {
    const double freq = std::exp(-std::log(1000.0) * i / 4.0);
    EXPECT_NEAR(e[i], std::sin(7 * freq), 1e-12);
    EXPECT_NEAR(e[i + 4], std::cos(7 * freq), 1e-12);
  }
}

// Central differences against the analytic gradient at fixed (t, eps).
double max_relative_gradient_error(std::uint64_t seed, int coordinates) {
  DenoiserNet net = small_net(seed, {12, 10, 8});
  Rng rng(seed * 31 + 1);
  const int batch = 5;
  Mat x0(3, batch), cond(4, batch), eps(3, batch);
  std::vector<int> ts(batch);
  const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.05);
  std::uniform_int_distribution<int> pick_t(1, 100);
  for (int b = 0; b < batch; ++b) {
    x0.col(b) = standard_normal(3, rng);
    cond.col(b) = standard_normal(4, rng);
    eps.col(b) = standard_normal(3, rng);
    ts[b] = pick_t(rng);
  }
  Mat xt(3, batch);
  for (int b = 0; b < batch; ++b) xt.col(b) = forward_diffuse(x0.col(b), ts[b], eps.col(b), s);
  std::vector<double> grad;
  net.loss_and_gradient(xt, ts, cond, eps, &grad);
  std::uniform_int_distribution<std::size_t> pick(0, net.parameter_count() - 1);
  double worst = 0.0;
  const double h = 1e-5;
  for (int k = 0; k < coordinates; ++k) {
    const std::size_t i = pick(rng);
    auto params = net.mutable_parameters();
    const double saved = params[i];
    params[i] = saved + h;
    const double up = net.loss_and_gradient(xt, ts, cond, eps, nullptr);
    params[i] = saved - h;
    const double down = net.loss_and_gradient(xt, ts, cond, eps, nullptr);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad[i]) / denom);
  }
  return worst;
}

TEST(DiffusionLoss, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EXPECT_LT(max_relative_gradient_error(seed, 20), 1e-4) << "model seed " << seed;
  }
}

TEST(DiffusionLoss, OracleModelHasZeroLoss) {
  const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.05);
  Rng rng(9);
  const Vec x0 = standard_normal(4, rng);
  testing::OracleModel oracle(x0, 2, s, false);
  for (int t : {1, 50, 100}) {
    const Vec eps = standard_normal(4, rng);
    const Vec pred = predict_eps(oracle, forward_diffuse(x0, t, eps, s), t, Vec::Ones(2));
    EXPECT_NEAR((pred - eps).squaredNorm(), 0.0, 1e-20);
  }
}

TEST(DiffusionLoss, ZeroOutputConcentratesNearDimension) {
  DenoiserNet net(8, 4, {8}, 8);
  net.init_random(1);
  net.zero_output_layer();
  const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.05);
  Rng rng(11);
  const int batch = 10000;
  Mat x0(8, batch);
  Mat cond = Mat::Zero(4, batch);
  for (int b = 0; b < batch; ++b) x0.col(b) = standard_normal(8, rng);
  const LossResult r = diffusion_loss(net, x0, cond, s, rng);
  // ||eps||^2 ~ chi-square(8): mean 8, variance 16, so SE = 4 / sqrt(batch).
  EXPECT_NEAR(r.loss, 8.0, 3.0 * 4.0 / std::sqrt(static_cast<double>(batch)));
  EXPECT_GE(r.loss, 0.0);
}

TEST(DiffusionLoss, RejectsEmptyBatch) {
  const DenoiserNet net = small_net(1);
  const NoiseSchedule s = make_linear_schedule(10, 0.01, 0.2);
  Rng rng(1);
  EXPECT_THROW(diffusion_loss(net, Mat(3, 0), Mat(4, 0), s, rng), ValidationError);
}

struct TinySetup {
  GaussianMixtureWorld world;
  ConditionEmbedder embedder;
  ToyDataset dataset;
  std::vector<std::size_t> train_indices;
  ModelCheckpoint start;
};

TinySetup tiny_setup() {
  TinySetup s;
  s.embedder = ConditionEmbedder::random(32, 8, 3);
  s.world = generate_world(5, 4, 4, 0.5, s.embedder);
  s.dataset = sample_dataset(s.world, 30, 6);
  for (std::size_t i = 0; i < s.dataset.points.size(); i += 2) s.train_indices.push_back(i);
  DenoiserNet net(4, 8, {32, 32}, 8);
  net.init_random(4);
  s.start = initial_checkpoint(std::move(net), make_linear_schedule(50, 1e-4, 0.05),
                               s.embedder, SeedLineage{5, 4, 0});
  return s;
}

TrainingConfig tiny_config(std::int64_t steps, std::int64_t every = 0) {
  TrainingConfig c;
  c.total_steps = steps;
  c.checkpoint_every = every;
  c.rng_seed = 99;
  c.batch_size = 16;
  return c;
}

bool same_parameters(const ModelCheckpoint& a, const ModelCheckpoint& b) {
  const auto pa = a.model.parameters();
  const auto pb = b.model.parameters();
  return pa.size() == pb.size() && std::equal(pa.begin(), pa.end(), pb.begin());
}

TEST(Training, ZeroStepsGivesInitialCheckpoint) {
  const TinySetup s = tiny_setup();
  const TrainingRun run = train(s.start, s.dataset, s.train_indices, tiny_config(0));
  ASSERT_EQ(run.checkpoints.size(), 1u);
  EXPECT_EQ(run.checkpoints[0].step, 0);
  EXPECT_TRUE(same_parameters(run.checkpoints[0], s.start));
}

TEST(Training, CheckpointScheduleIncludesStartAndEnd) {
  const TinySetup s = tiny_setup();
  const TrainingRun run = train(s.start, s.dataset, s.train_indices, tiny_config(25, 10));
  std::vector<std::int64_t> steps;
  for (const auto& c : run.checkpoints) steps.push_back(c.step);
  EXPECT_EQ(steps, (std::vector<std::int64_t>{0, 10, 20, 25}));
  EXPECT_EQ(run.losses.size(), 25u);
}

TEST(Training, SeededRunsAreIdentical) {
  const TinySetup s = tiny_setup();
  const auto a = train(s.start, s.dataset, s.train_indices, tiny_config(40));
  const auto b = train(s.start, s.dataset, s.train_indices, tiny_config(40));
  EXPECT_TRUE(same_parameters(a.checkpoints.back(), b.checkpoints.back()));
  EXPECT_EQ(a.losses, b.losses);
}

TEST(Training, ResumeMatchesUninterruptedRun) {
  const TinySetup s = tiny_setup();
  const auto full = train(s.start, s.dataset, s.train_indices, tiny_config(60));
  const auto first = train(s.start, s.dataset, s.train_indices, tiny_config(23));
  const ModelCheckpoint reloaded =
      deserialize_checkpoint(serialize_checkpoint(first.checkpoints.back()));
  const auto rest = train(reloaded, s.dataset, s.train_indices, tiny_config(60));
  EXPECT_TRUE(same_parameters(full.checkpoints.back(), rest.checkpoints.back()));
  EXPECT_EQ(serialize_checkpoint(full.checkpoints.back()),
            serialize_checkpoint(rest.checkpoints.back()));
}

TEST(Training, ObserverSeesOnlyTrainingIndices) {
  const TinySetup s = tiny_setup();
  const std::set<std::size_t> allowed(s.train_indices.begin(), s.train_indices.end());
  std::int64_t calls = 0;
  bool all_allowed = true;
  train(s.start, s.dataset, s.train_indices, tiny_config(30),
        [&](std::int64_t, std::span<const std::size_t> batch, double) {
          ++calls;
          for (std::size_t i : batch) all_allowed = all_allowed && allowed.count(i) == 1;
        });
  EXPECT_EQ(calls, 30);
  EXPECT_TRUE(all_allowed);
}

TEST(Training, TrailingLossDecreases) {
  const TinySetup s = tiny_setup();
  const auto run = train(s.start, s.dataset, s.train_indices, tiny_config(2000));
  const auto window = 200;
  const double head =
      std::accumulate(run.losses.begin(), run.losses.begin() + window, 0.0) / window;
  const double tail = std::accumulate(run.losses.end() - window, run.losses.end(), 0.0) / window;
  EXPECT_LT(tail, head);
}

TEST(Training, DivergenceIsReported) {
  TinySetup s = tiny_setup();
  s.start.model.mutable_parameters()[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train(s.start, s.dataset, s.train_indices, tiny_config(3)), RuntimeFailure);
}

TEST(Training, RejectsBadConfig) {
  const TinySetup s = tiny_setup();
  TrainingConfig c = tiny_config(5);
  c.learning_rate = 0.0;
  EXPECT_THROW(train(s.start, s.dataset, s.train_indices, c), ValidationError);
  EXPECT_THROW(train(s.start, s.dataset, {}, tiny_config(5)), ValidationError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const TinySetup s = tiny_setup();
  const auto run = train(s.start, s.dataset, s.train_indices, tiny_config(15));
  const ModelCheckpoint& a = run.checkpoints.back();
  const std::string bytes = serialize_checkpoint(a);
  const ModelCheckpoint b = deserialize_checkpoint(bytes);
  EXPECT_EQ(serialize_checkpoint(b), bytes);
  EXPECT_EQ(b.step, a.step);
  EXPECT_EQ(b.seeds.train_seed, a.seeds.train_seed);
  EXPECT_EQ(b.seeds.world_seed, a.seeds.world_seed);
  EXPECT_TRUE(same_parameters(a, b));
  Rng rng(2);
  const Vec x = standard_normal(4, rng);
  const Vec c = standard_normal(8, rng);
  EXPECT_TRUE(predict_eps(a.model, x, 9, c) == predict_eps(b.model, x, 9, c));
  EXPECT_TRUE(a.embedder.table() == b.embedder.table());
  EXPECT_EQ(a.schedule.alpha_bars, b.schedule.alpha_bars);
}

TEST(Checkpoint, FileRoundTrip) {
  const TinySetup s = tiny_setup();
  const auto path = std::filesystem::temp_directory_path() / "clid_ckpt_test" / "a.ckpt";
  save_checkpoint(path, s.start);
  EXPECT_EQ(serialize_checkpoint(load_checkpoint(path)), serialize_checkpoint(s.start));
  std::filesystem::remove_all(path.parent_path());
}

TEST(Checkpoint, RejectsCorruptInput) {
  const TinySetup s = tiny_setup();
  std::string bytes = serialize_checkpoint(s.start);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), ValidationError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() / 2)), ValidationError);
  EXPECT_THROW(deserialize_checkpoint(bytes + "extra"), ValidationError);
}

TEST(Sampling, SingleStepZeroModelIsDeterministicAlgebra) {
  const NoiseSchedule s = make_linear_schedule(1, 0.3, 0.3);
  testing::ZeroModel zero(3, 2);
  Rng rng(17);
  const Vec out = sample_ddpm(zero, Vec::Zero(2), s, rng);
  Rng replay(17);
  const Vec x1 = standard_normal(3, replay);
  EXPECT_TRUE(out.isApprox(x1 / std::sqrt(s.alpha(1)), 1e-14));
}

TEST(Sampling, SeededSamplesRepeat) {
  const DenoiserNet net = small_net(3);
  const NoiseSchedule s = make_linear_schedule(20, 1e-3, 0.1);
  Rng a(5), b(5);
  const Vec c = Vec::Ones(4);
  EXPECT_TRUE(sample_ddpm(net, c, s, a) == sample_ddpm(net, c, s, b));
}

TEST(Sampling, NonFiniteOutputAborts) {
  DenoiserNet net = small_net(3);
  net.mutable_parameters()[net.parameter_count() - 1] = std::numeric_limits<double>::infinity();
  const NoiseSchedule s = make_linear_schedule(5, 1e-3, 0.1);
  Rng rng(1);
  EXPECT_THROW(sample_ddpm(net, Vec::Ones(4), s, rng), RuntimeFailure);
}

}  // namespace
}  // namespace clid
