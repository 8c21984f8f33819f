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
#include "clid/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "clid/metrics.hpp"

namespace clid {
namespace {

// Stream for the reduced-condition terms of entry i when noise is not shared.
std::uint64_t reduced_stream(const MonteCarloPlan& plan, std::size_t i) {
  return mix_seed(plan.noise_seed, i + 1);
}

double mean_paired_difference(const std::vector<DrawRecord>& records,
                              std::size_t i) {
  double total = 0.0;
  for (const auto& r : records) total += r.reduced_se[i] - r.conditional_se;
  return total / static_cast<double>(records.size());
}

double negated_mean_conditional(const std::vector<DrawRecord>& records) {
  double total = 0.0;
  for (const auto& r : records) total += r.conditional_se;
  return -(total / static_cast<double>(records.size()));
}

double mean_of(const std::vector<double>& v) {
  double total = 0.0;
  for (double e : v) total += e;
  return total / static_cast<double>(v.size());
}

}  // namespace

double IndicatorEstimate::mean_discrepancy() const {
  require(!discrepancies.empty(), "estimate has no discrepancies");
  return mean_of(discrepancies);
}

std::int64_t expected_query_count(const MonteCarloPlan& plan, std::size_t k) {
  return plan.m_draws + static_cast<std::int64_t>(k) * plan.n_draws;
}

double estimate_discrepancy(const ModelHandle& model, const Vec& x,
                            const Condition& c, const Condition& c_star,
                            const MonteCarloPlan& plan) {
  plan.validate(model.schedule);
  ReducedConditionSet single;
  single.entries.push_back(c_star);
  MonteCarloPlan paired = plan;
  paired.m_draws = plan.n_draws;
  return score_point(model, x, c, single, paired).discrepancies.front();
}

double estimate_elbo_proxy(const ModelHandle& model, const Vec& x,
                           const Condition& c, const MonteCarloPlan& plan) {
  plan.validate(model.schedule);
  const Vec c_embed = embed_condition(model.embedder, c);
  const auto draws =
      make_draws(plan, plan.m_draws, static_cast<int>(x.size()), plan.noise_seed);
  std::vector<DrawRecord> records(draws.size());
  for (std::size_t j = 0; j < draws.size(); ++j) {
    records[j].t = draws[j].t;
    records[j].conditional_se = squared_error(model, x, c_embed, draws[j]);
  }
  return negated_mean_conditional(records);
}

IndicatorEstimate score_point(const ModelHandle& model, const Vec& x,
                              const Condition& c,
                              const ReducedConditionSet& reduction,
                              const MonteCarloPlan& plan) {
  plan.validate(model.schedule);
  require(reduction.k() >= 1, "score_point: empty reduced condition set");
  require(x.size() == model.net.data_dim(), "score_point: data dimension mismatch");
  const bool shared = plan.share_noise_across_conditions;
  if (shared && plan.m_draws != plan.n_draws) {
    throw ValidationError("score_point: shared noise requires M == N");
  }

  QueryCounter counter(model.net);
  const ModelHandle counted{counter, model.schedule, model.embedder};
  const int dim = static_cast<int>(x.size());
  const std::size_t k = reduction.k();

  const Vec c_embed = embed_condition(model.embedder, c);
  std::vector<Vec> reduced_embeds;
  reduced_embeds.reserve(k);
  for (const auto& entry : reduction.entries) {
    reduced_embeds.push_back(embed_condition(model.embedder, entry));
  }

  const auto draws = make_draws(plan, plan.m_draws, dim, plan.noise_seed);
  IndicatorEstimate est;
  est.records.resize(draws.size());
  for (std::size_t j = 0; j < draws.size(); ++j) {
    DrawRecord& rec = est.records[j];
    rec.t = draws[j].t;
    rec.conditional_se = squared_error(counted, x, c_embed, draws[j]);
    if (shared) {
      rec.reduced_se.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        rec.reduced_se[i] = squared_error(counted, x, reduced_embeds[i], draws[j]);
      }
    }
  }
  est.elbo_proxy = negated_mean_conditional(est.records);

  est.discrepancies.resize(k);
  if (shared) {
    for (std::size_t i = 0; i < k; ++i) {
      est.discrepancies[i] = mean_paired_difference(est.records, i);
    }
  } else {
    const double conditional_mean = -est.elbo_proxy;
    for (std::size_t i = 0; i < k; ++i) {
      const auto own = make_draws(plan, plan.n_draws, dim, reduced_stream(plan, i));
      std::vector<double> se(own.size());
      for (std::size_t j = 0; j < own.size(); ++j) {
        se[j] = squared_error(counted, x, reduced_embeds[i], own[j]);
      }
      est.discrepancies[i] = mean_of(se) - conditional_mean;
    }
  }

  est.query_count = counter.count();
  if (est.query_count != expected_query_count(plan, k)) {
    throw RuntimeFailure("query accounting mismatch: issued " +
                         std::to_string(est.query_count) + ", expected " +
                         std::to_string(expected_query_count(plan, k)));
  }
  return est;
}

FeatureVector build_feature_vector(const IndicatorEstimate& estimate) {
  require(!estimate.discrepancies.empty(), "estimate has no discrepancies");
  FeatureVector v;
  v.values = estimate.discrepancies;
  v.values.push_back(estimate.elbo_proxy);
  return v;
}

std::vector<int> centred_window(int centre, int window_width, int total_steps) {
  require(window_width >= 1, "window width must be >= 1");
  const int width = std::min(window_width, total_steps);
  int start = centre - (width - 1) / 2;
  start = std::clamp(start, 1, total_steps - width + 1);
  std::vector<int> window(static_cast<std::size_t>(width));
  std::iota(window.begin(), window.end(), start);
  return window;
}

TimestepWindow calibrate_timestep_window(const ModelHandle& model,
                                         const std::vector<ProbePoint>& probes,
                                         const std::vector<int>& candidates,
                                         int window_width,
                                         std::uint64_t noise_seed) {
  require(!candidates.empty(), "calibrate_timestep_window: no candidates");
  std::set<bool> labels;
  for (const auto& p : probes) labels.insert(p.member);
  if (labels.size() < 2) {
    throw ValidationError("calibrate_timestep_window needs both labels");
  }

  TimestepWindow result;
  result.candidates = candidates;
  const ReducedConditionSet null_only{{null_condition()}, ReductionStrategy::kClip};
  for (int t : candidates) {
    MonteCarloPlan plan;
    plan.timesteps = {t};
    plan.m_draws = 1;
    plan.n_draws = 1;
    plan.noise_seed = mix_seed(noise_seed, static_cast<std::uint64_t>(t));
    std::vector<LabeledScore> scores;
    scores.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto est = score_point(model, probes[i].x, probes[i].c, null_only,
                                   plan.for_point(i));
      scores.push_back({i, est.discrepancies.front(), probes[i].member});
    }
    result.candidate_auc.push_back(compute_roc_auc(scores).auc);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double a = result.candidate_auc[i];
    const double b = result.candidate_auc[best];
    if (a > b || (a == b && candidates[i] < candidates[best])) best = i;
  }
  int centre = candidates[best];
  if (candidates.size() > 1 &&
      result.candidate_auc[best] <= 0.5 + kNoSignalBand) {
    result.fallback = true;
    centre = (model.schedule.total_steps + 1) / 2;
  }
  result.timesteps = centred_window(centre, window_width, model.schedule.total_steps);
  return result;
}

}  // namespace clid
