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
#ifndef CLID_TRAINING_HPP_
#define CLID_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "clid/common.hpp"
#include "clid/denoiser.hpp"
#include "clid/embedder.hpp"
#include "clid/schedule.hpp"
#include "clid/toy_world.hpp"

namespace clid {

struct TrainingConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  std::int64_t total_steps = 0;
  // 0 emits only the initial and final checkpoints.
  std::int64_t checkpoint_every = 0;
  // Probability of training a row against the null condition.
  double condition_dropout = 0.1;
  AugmentationPolicy augmentation;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

struct SeedLineage {
  std::uint64_t world_seed = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
};

// Everything needed to score with a model or resume its training.
struct ModelCheckpoint {
  std::int64_t step = 0;
  DenoiserNet model;
  NoiseSchedule schedule;
  ConditionEmbedder embedder;
  AdamState optimizer;
  SeedLineage seeds;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;
};

// Diffusion training objective: t ~ U{1..T}, eps ~ N(0, I) per column of x0.
LossResult diffusion_loss(const DenoiserNet& model, const Mat& x0,
                          const Mat& cond, const NoiseSchedule& schedule,
                          Rng& rng);

struct TrainingRun {
  std::vector<ModelCheckpoint> checkpoints;
  // Minibatch loss per step taken in this run.
  std::vector<double> losses;
};

// Called once per step with the dataset indices of the minibatch rows.
using BatchObserver = std::function<void(
    std::int64_t step, std::span<const std::size_t> batch_indices, double loss)>;

// Runs Adam from start.step to config.total_steps on the dataset rows listed
// in train_indices. Step s draws all its randomness from
// mix_seed(config.rng_seed, s), so a resumed run reproduces an uninterrupted
// one exactly.
TrainingRun train(const ModelCheckpoint& start, const ToyDataset& dataset,
                  std::span<const std::size_t> train_indices,
                  const TrainingConfig& config,
                  const BatchObserver& observer = {});

// Step-0 checkpoint with freshly initialized parameters.
ModelCheckpoint initial_checkpoint(DenoiserNet model, NoiseSchedule schedule,
                                   ConditionEmbedder embedder,
                                   SeedLineage seeds);

}  // namespace clid

#endif  // CLID_TRAINING_HPP_
