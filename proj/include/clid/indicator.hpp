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
#ifndef CLID_INDICATOR_HPP_
#define CLID_INDICATOR_HPP_

#include <cstdint>
#include <vector>

#include "clid/common.hpp"
#include "clid/monte_carlo.hpp"
#include "clid/reduction.hpp"

namespace clid {

// Per-draw audit record: squared errors under the full condition and under
// every reduced condition.
struct DrawRecord {
  int t = 0;
  double conditional_se = 0.0;
  std::vector<double> reduced_se;
};

struct IndicatorEstimate {
  // D_i = E[||eps(x_t, t, c*_i) - eps||^2 - ||eps(x_t, t, c) - eps||^2]
  std::vector<double> discrepancies;
  // L = -E[||eps(x_t, t, c) - eps||^2]
  double elbo_proxy = 0.0;
  std::int64_t query_count = 0;
  std::vector<DrawRecord> records;

  double mean_discrepancy() const;
};

// (D_1, ..., D_k, L)
struct FeatureVector {
  std::vector<double> values;
};

// Paired Monte Carlo estimate over plan.n_draws draws. With shared noise the
// same (t, eps) feeds both terms of every draw.
double estimate_discrepancy(const ModelHandle& model, const Vec& x,
                            const Condition& c, const Condition& c_star,
                            const MonteCarloPlan& plan);

double estimate_elbo_proxy(const ModelHandle& model, const Vec& x,
                           const Condition& c, const MonteCarloPlan& plan);

// All k discrepancies plus L using exactly M + k * N queries. With shared
// noise (requires M == N) the conditional evaluations are reused, so the
// results equal the two estimators above bit for bit.
IndicatorEstimate score_point(const ModelHandle& model, const Vec& x,
                              const Condition& c,
                              const ReducedConditionSet& reduction,
                              const MonteCarloPlan& plan);

std::int64_t expected_query_count(const MonteCarloPlan& plan, std::size_t k);

FeatureVector build_feature_vector(const IndicatorEstimate& estimate);

struct ProbePoint {
  Vec x;
  Condition c;
  bool member = false;
};

struct TimestepWindow {
  std::vector<int> timesteps;
  std::vector<int> candidates;
  std::vector<double> candidate_auc;
  // True when no candidate showed signal and the mid-schedule default was used.
  bool fallback = false;
};

inline constexpr double kNoSignalBand = 0.05;

// Scores every probe with one null-condition discrepancy draw at each
// candidate timestep and centres a window of window_width consecutive
// timesteps on the best AUC (ties to the lowest t).
TimestepWindow calibrate_timestep_window(const ModelHandle& model,
                                         const std::vector<ProbePoint>& probes,
                                         const std::vector<int>& candidates,
                                         int window_width,
                                         std::uint64_t noise_seed);

// window_width consecutive timesteps centred on centre, clamped to [1, T].
std::vector<int> centred_window(int centre, int window_width, int total_steps);

}  // namespace clid

#endif  // CLID_INDICATOR_HPP_
