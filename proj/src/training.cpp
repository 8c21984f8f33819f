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
#include "clid/training.hpp"

#include <cmath>
#include <string>

namespace clid {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

void adam_update(std::span<double> params, std::span<const double> grad,
                 AdamState& state, double learning_rate, std::int64_t step) {
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad[i];
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad[i] * grad[i];
    params[i] -= learning_rate * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
  }
}

}  // namespace

void TrainingConfig::validate() const {
  require(learning_rate > 0.0, "training.learning_rate must be > 0");
  require(batch_size >= 1, "training.batch_size must be >= 1");
  require(total_steps >= 0, "training.total_steps must be >= 0");
  require(checkpoint_every >= 0, "training.checkpoint_every must be >= 0");
  require(condition_dropout >= 0.0 && condition_dropout <= 1.0,
          "training.condition_dropout outside [0, 1]");
  augmentation.validate();
}

LossResult diffusion_loss(const DenoiserNet& model, const Mat& x0,
                          const Mat& cond, const NoiseSchedule& schedule,
                          Rng& rng) {
  if (x0.cols() == 0) throw ValidationError("diffusion_loss: empty batch");
  const auto batch = x0.cols();
  std::uniform_int_distribution<int> pick_t(1, schedule.total_steps);
  std::vector<int> ts(static_cast<std::size_t>(batch));
  Mat eps(x0.rows(), batch);
  Mat x_t(x0.rows(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    ts[static_cast<std::size_t>(b)] = pick_t(rng);
    eps.col(b) = standard_normal(static_cast<int>(x0.rows()), rng);
    x_t.col(b) = forward_diffuse(x0.col(b), ts[static_cast<std::size_t>(b)],
                                 eps.col(b), schedule);
  }
  LossResult result;
  result.loss = model.loss_and_gradient(x_t, ts, cond, eps, &result.gradient);
  return result;
}

ModelCheckpoint initial_checkpoint(DenoiserNet model, NoiseSchedule schedule,
                                   ConditionEmbedder embedder,
                                   SeedLineage seeds) {
  require(model.cond_dim() == embedder.embedding_dim(),
          "model condition dimension must equal embedding_dim");
  ModelCheckpoint ckpt;
  ckpt.step = 0;
  ckpt.optimizer.first_moment.assign(model.parameter_count(), 0.0);
  ckpt.optimizer.second_moment.assign(model.parameter_count(), 0.0);
  ckpt.model = std::move(model);
  ckpt.schedule = std::move(schedule);
  ckpt.embedder = std::move(embedder);
  ckpt.seeds = seeds;
  return ckpt;
}

TrainingRun train(const ModelCheckpoint& start, const ToyDataset& dataset,
                  std::span<const std::size_t> train_indices,
                  const TrainingConfig& config, const BatchObserver& observer) {
  config.validate();
  require(!train_indices.empty(), "train: empty training set");
  require(start.step <= config.total_steps,
          "train: start checkpoint is beyond total_steps");
  for (std::size_t i : train_indices) {
    require(i < dataset.size(), "train: index outside dataset");
  }

  const DenoiserNet& init = start.model;
  const int dim = init.data_dim();
  const int cond_dim = init.cond_dim();
  std::vector<Vec> embeddings;
  embeddings.reserve(train_indices.size());
  for (std::size_t i : train_indices) {
    embeddings.push_back(start.embedder.embed(dataset.points[i].c));
  }

  TrainingRun run;
  ModelCheckpoint current = start;
  if (current.optimizer.first_moment.size() != init.parameter_count()) {
    current.optimizer.first_moment.assign(init.parameter_count(), 0.0);
    current.optimizer.second_moment.assign(init.parameter_count(), 0.0);
  }
  current.seeds.train_seed = config.rng_seed;
  if (current.step == 0) run.checkpoints.push_back(current);

  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> rows(batch);
  std::vector<std::size_t> batch_indices(batch);
  Mat x0(dim, static_cast<Eigen::Index>(batch));
  Mat cond(cond_dim, static_cast<Eigen::Index>(batch));
  std::uniform_int_distribution<std::size_t> pick(0, train_indices.size() - 1);
  std::bernoulli_distribution drop(config.condition_dropout);

  while (current.step < config.total_steps) {
    const std::int64_t step = current.step + 1;
    Rng rng(mix_seed(config.rng_seed, static_cast<std::uint64_t>(step)));
    for (std::size_t b = 0; b < batch; ++b) {
      rows[b] = pick(rng);
      batch_indices[b] = train_indices[rows[b]];
      const auto col = static_cast<Eigen::Index>(b);
      x0.col(col) = augment(dataset.points[batch_indices[b]].x,
                            config.augmentation, rng);
      if (drop(rng)) {
        cond.col(col).setZero();
      } else {
        cond.col(col) = embeddings[rows[b]];
      }
    }
    const LossResult lr = diffusion_loss(current.model, x0, cond,
                                         current.schedule, rng);
    if (!std::isfinite(lr.loss)) {
      throw RuntimeFailure("training diverged: loss is " +
                           std::to_string(lr.loss) + " at step " +
                           std::to_string(step));
    }
    adam_update(current.model.mutable_parameters(), lr.gradient,
                current.optimizer, config.learning_rate, step);
    current.step = step;
    run.losses.push_back(lr.loss);
    if (observer) observer(step, batch_indices, lr.loss);

    const bool periodic =
        config.checkpoint_every > 0 && step % config.checkpoint_every == 0;
    if (periodic || step == config.total_steps) {
      run.checkpoints.push_back(current);
    }
  }
  return run;
}

}  // namespace clid
