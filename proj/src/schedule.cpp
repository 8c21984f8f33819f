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
#include "clid/schedule.hpp"

#include <cmath>

namespace clid {

std::string to_string(SigmaMode mode) {
  return mode == SigmaMode::kBeta ? "beta" : "posterior";
}

SigmaMode sigma_mode_from_string(const std::string& name) {
  if (name == "beta") return SigmaMode::kBeta;
  if (name == "posterior") return SigmaMode::kPosterior;
  throw ValidationError("unknown sigma_mode '" + name + "'");
}

std::size_t NoiseSchedule::index(int t) const {
  if (!contains(t)) {
    throw ValidationError("timestep " + std::to_string(t) +
                          " outside [1, " + std::to_string(total_steps) + "]");
  }
  return static_cast<std::size_t>(t - 1);
}

NoiseSchedule make_linear_schedule(int total_steps, double beta_start,
                                   double beta_end, SigmaMode sigma_mode) {
  require(total_steps >= 1, "total_steps must be >= 1");
  require(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end,
          "beta range must satisfy 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.total_steps = total_steps;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  s.sigma_mode = sigma_mode;
  s.betas.resize(total_steps);
  s.alphas.resize(total_steps);
  s.alpha_bars.resize(total_steps);
  s.sigmas.resize(total_steps);

  double running = 1.0;
  for (int i = 0; i < total_steps; ++i) {
    const double frac =
        total_steps == 1 ? 0.0 : static_cast<double>(i) / (total_steps - 1);
    s.betas[i] = beta_start + (beta_end - beta_start) * frac;
    s.alphas[i] = 1.0 - s.betas[i];
    running *= s.alphas[i];
    s.alpha_bars[i] = running;
  }
  for (int i = 0; i < total_steps; ++i) {
    if (sigma_mode == SigmaMode::kBeta) {
      s.sigmas[i] = std::sqrt(s.betas[i]);
    } else {
      const double prev = i == 0 ? 1.0 : s.alpha_bars[i - 1];
      s.sigmas[i] =
          std::sqrt((1.0 - prev) / (1.0 - s.alpha_bars[i]) * s.betas[i]);
    }
  }
  return s;
}

Vec forward_diffuse(const Vec& x0, double alpha_bar, const Vec& eps) {
  require(x0.size() == eps.size(), "forward_diffuse: noise dimension mismatch");
  require(alpha_bar >= 0.0 && alpha_bar <= 1.0,
          "forward_diffuse: alpha_bar outside [0, 1]");
  return std::sqrt(alpha_bar) * x0 + std::sqrt(1.0 - alpha_bar) * eps;
}

Vec forward_diffuse(const Vec& x0, int t, const Vec& eps,
                    const NoiseSchedule& schedule) {
  return forward_diffuse(x0, schedule.alpha_bar(t), eps);
}

}  // namespace clid
