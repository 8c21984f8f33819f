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
#include "clid/monte_carlo.hpp"

#include <algorithm>
#include <string>

namespace clid {

void MonteCarloPlan::validate(const NoiseSchedule& schedule) const {
  require(!timesteps.empty(), "Monte Carlo plan has no timesteps");
  require(m_draws >= 1 && n_draws >= 1, "Monte Carlo draw counts must be >= 1");
  for (int t : timesteps) {
    require(schedule.contains(t), "plan timestep " + std::to_string(t) +
                                      " outside [1, " +
                                      std::to_string(schedule.total_steps) + "]");
  }
}

int MonteCarloPlan::draws_per_timestep() const {
  const int n = static_cast<int>(timesteps.size());
  return n == 0 ? 0 : (std::max(m_draws, n_draws) + n - 1) / n;
}

MonteCarloPlan MonteCarloPlan::for_point(std::uint64_t point_index) const {
  MonteCarloPlan plan = *this;
  plan.noise_seed = mix_seed(noise_seed, point_index);
  return plan;
}

std::vector<NoiseDraw> make_draws(const MonteCarloPlan& plan, int count, int dim,
                                  std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  std::vector<NoiseDraw> draws(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    draws[i].t = plan.timesteps[static_cast<std::size_t>(i) % plan.timesteps.size()];
    draws[i].eps = standard_normal(dim, rng);
  }
  return draws;
}

double squared_error(const ModelHandle& model, const Vec& x, const Vec& c_embed,
                     const NoiseDraw& draw) {
  const Vec x_t = forward_diffuse(x, draw.t, draw.eps, model.schedule);
  return (predict_eps(model.net, x_t, draw.t, c_embed) - draw.eps).squaredNorm();
}

}  // namespace clid
