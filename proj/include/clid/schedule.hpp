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
#ifndef CLID_SCHEDULE_HPP_
#define CLID_SCHEDULE_HPP_

#include <string>
#include <vector>

#include "clid/common.hpp"

namespace clid {

enum class SigmaMode { kBeta, kPosterior };

std::string to_string(SigmaMode mode);
SigmaMode sigma_mode_from_string(const std::string& name);

// Forward/reverse process tables. Timesteps are 1-based: t in [1, T] reads
// element t - 1 of every table.
struct NoiseSchedule {
  int total_steps = 0;
  double beta_start = 0.0;
  double beta_end = 0.0;
  SigmaMode sigma_mode = SigmaMode::kBeta;
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<double> alpha_bars;
  std::vector<double> sigmas;

  double beta(int t) const { return betas[index(t)]; }
  double alpha(int t) const { return alphas[index(t)]; }
  double alpha_bar(int t) const { return alpha_bars[index(t)]; }
  double sigma(int t) const { return sigmas[index(t)]; }

  bool contains(int t) const { return t >= 1 && t <= total_steps; }

 private:
  std::size_t index(int t) const;
};

// Betas linearly interpolated from beta_start to beta_end inclusive.
NoiseSchedule make_linear_schedule(int total_steps, double beta_start,
                                   double beta_end,
                                   SigmaMode sigma_mode = SigmaMode::kBeta);

// Closed-form marginal x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
Vec forward_diffuse(const Vec& x0, int t, const Vec& eps,
                    const NoiseSchedule& schedule);
Vec forward_diffuse(const Vec& x0, double alpha_bar, const Vec& eps);

}  // namespace clid

#endif  // CLID_SCHEDULE_HPP_
