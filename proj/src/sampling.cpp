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
#include "clid/sampling.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace clid {

Mat run_reverse_chain(const NoisePredictor& model, Mat x, const Mat& cond,
                      const NoiseSchedule& schedule, Rng& rng) {
  require(x.rows() == model.data_dim() && cond.rows() == model.cond_dim() &&
              x.cols() == cond.cols(),
          "sampling: model and condition shapes are incompatible");
  const auto n = x.cols();
  std::vector<int> ts(static_cast<std::size_t>(n));
  for (int t = schedule.total_steps; t >= 1; --t) {
    std::fill(ts.begin(), ts.end(), t);
    const Mat eps = model.predict(x, ts, cond);
    const double coef = schedule.beta(t) / std::sqrt(1.0 - schedule.alpha_bar(t));
    x = (x - coef * eps) / std::sqrt(schedule.alpha(t));
    if (t > 1) {
      for (Eigen::Index b = 0; b < n; ++b) {
        x.col(b) += schedule.sigma(t) * standard_normal(model.data_dim(), rng);
      }
    }
    if (!x.allFinite()) {
      throw RuntimeFailure("sampling produced non-finite values at t=" +
                           std::to_string(t));
    }
  }
  return x;
}

Mat sample_ddpm_batch(const NoisePredictor& model, const Mat& cond,
                      const NoiseSchedule& schedule, Rng& rng) {
  Mat x(model.data_dim(), cond.cols());
  for (Eigen::Index b = 0; b < cond.cols(); ++b) {
    x.col(b) = standard_normal(model.data_dim(), rng);
  }
  return run_reverse_chain(model, std::move(x), cond, schedule, rng);
}

Vec sample_ddpm(const NoisePredictor& model, const Vec& cond,
                const NoiseSchedule& schedule, Rng& rng) {
  return sample_ddpm_batch(model, cond, schedule, rng).col(0);
}

}  // namespace clid
