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
#ifndef CLID_SAMPLING_HPP_
#define CLID_SAMPLING_HPP_

#include "clid/common.hpp"
#include "clid/denoiser.hpp"
#include "clid/schedule.hpp"

namespace clid {

// Ancestral sampling from x_T ~ N(0, I) with
// mu = (x_t - beta_t / sqrt(1 - abar_t) * eps_theta) / sqrt(alpha_t) and
// sigma_t noise at every step except the last.
Vec sample_ddpm(const NoisePredictor& model, const Vec& cond,
                const NoiseSchedule& schedule, Rng& rng);

// One sample per column of cond (cond_dim x n); returns data_dim x n.
Mat sample_ddpm_batch(const NoisePredictor& model, const Mat& cond,
                      const NoiseSchedule& schedule, Rng& rng);

// Reverse chain from a given x_T (data_dim x n).
Mat run_reverse_chain(const NoisePredictor& model, Mat x, const Mat& cond,
                      const NoiseSchedule& schedule, Rng& rng);

}  // namespace clid

#endif  // CLID_SAMPLING_HPP_
