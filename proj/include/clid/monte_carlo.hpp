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
#ifndef CLID_MONTE_CARLO_HPP_
#define CLID_MONTE_CARLO_HPP_

#include <cstdint>
#include <vector>

#include "clid/common.hpp"
#include "clid/denoiser.hpp"
#include "clid/embedder.hpp"
#include "clid/schedule.hpp"

namespace clid {

// Read-only view of everything a query needs.
struct ModelHandle {
  const NoisePredictor& net;
  const NoiseSchedule& schedule;
  const ConditionEmbedder& embedder;
};

// Draw i uses timestep timesteps[i % timesteps.size()] and fresh noise from
// the stream seeded by noise_seed.
struct MonteCarloPlan {
  std::vector<int> timesteps;
  int m_draws = 3;  // draws for the ELBO proxy
  int n_draws = 3;  // draws per discrepancy
  std::uint64_t noise_seed = 0;
  bool share_noise_across_conditions = true;

  void validate(const NoiseSchedule& schedule) const;
  int draws_per_timestep() const;
  // Plan whose noise stream is the per-point stream of point_index.
  MonteCarloPlan for_point(std::uint64_t point_index) const;
};

struct NoiseDraw {
  int t = 0;
  Vec eps;
};

std::vector<NoiseDraw> make_draws(const MonteCarloPlan& plan, int count, int dim,
                                  std::uint64_t stream_seed);

// ||eps_theta(x_t, t, c) - eps||^2 for one draw; exactly one model query.
double squared_error(const ModelHandle& model, const Vec& x, const Vec& c_embed,
                     const NoiseDraw& draw);

}  // namespace clid

#endif  // CLID_MONTE_CARLO_HPP_
