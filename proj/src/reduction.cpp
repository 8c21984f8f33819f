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
#include "clid/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace clid {
namespace {

// ceil(p * n) robust to p * n landing a hair above an integer.
std::size_t ceil_count(double p, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
}

TokenSequence slice(const TokenSequence& c, std::size_t begin, std::size_t end) {
  return TokenSequence(c.begin() + static_cast<std::ptrdiff_t>(begin),
                       c.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

Vec embed_condition(const ConditionEmbedder& embedder, const Condition& c) {
  if (const auto* tokens = std::get_if<TokenSequence>(&c)) {
    return embedder.embed(*tokens);
  }
  const Vec& embedding = std::get<Vec>(c);
  require(embedding.size() == embedder.embedding_dim(),
          "condition embedding has the wrong dimension");
  return embedding;
}

std::string to_string(ReductionStrategy strategy) {
  switch (strategy) {
    case ReductionStrategy::kClip: return "clip";
    case ReductionStrategy::kEmbedNoise: return "embed_noise";
    case ReductionStrategy::kImportance: return "importance";
  }
  return "clip";
}

ReductionStrategy reduction_strategy_from_string(const std::string& name) {
  if (name == "clip") return ReductionStrategy::kClip;
  if (name == "embed_noise") return ReductionStrategy::kEmbedNoise;
  if (name == "importance") return ReductionStrategy::kImportance;
  throw ValidationError("unknown reduction strategy '" + name + "'");
}

Condition null_condition() { return TokenSequence{}; }

bool is_null(const Condition& c) {
  if (const auto* tokens = std::get_if<TokenSequence>(&c)) return tokens->empty();
  return std::get<Vec>(c).isZero(0.0);
}

ReducedConditionSet reduce_clip(const TokenSequence& c) {
  require(!c.empty(), "reduce_clip: empty condition");
  const std::size_t n = c.size();
  ReducedConditionSet set;
  set.strategy = ReductionStrategy::kClip;
  set.entries.push_back(slice(c, 0, (n + 2) / 3));
  set.entries.push_back(slice(c, n / 3, (2 * n + 2) / 3));
  set.entries.push_back(slice(c, 2 * n / 3, n));
  set.entries.push_back(null_condition());
  return set;
}

ReducedConditionSet reduce_embed_noise(const TokenSequence& c,
                                       const ConditionEmbedder& embedder,
                                       std::span<const double> scales,
                                       Rng& rng) {
  require(!scales.empty(), "reduce_embed_noise: no scales");
  for (double s : scales) {
    require(s >= 0.0 && s <= 1.0, "reduce_embed_noise: scale outside [0, 1]");
  }
  const Vec base = embedder.embed(c);
  const double mean = base.mean();
  const double var = (base.array() - mean).square().mean();
  ReducedConditionSet set;
  set.strategy = ReductionStrategy::kEmbedNoise;
  for (double s : scales) {
    const Vec eta = std::sqrt(var) * standard_normal(embedder.embedding_dim(), rng);
    set.entries.push_back(Vec((1.0 - s) * base + s * eta));
  }
  set.entries.push_back(null_condition());
  return set;
}

ImportanceProfile token_importance(const ModelHandle& model, const Vec& x,
                                   const TokenSequence& c,
                                   const MonteCarloPlan& plan) {
  require(!c.empty(), "token_importance: empty condition");
  plan.validate(model.schedule);
  const auto draws =
      make_draws(plan, plan.m_draws, static_cast<int>(x.size()), plan.noise_seed);

  auto mean_loss = [&](const TokenSequence& tokens) {
    const Vec emb = model.embedder.embed(tokens);
    double total = 0.0;
    for (const auto& draw : draws) total += squared_error(model, x, emb, draw);
    return total / static_cast<double>(draws.size());
  };

  const double full = mean_loss(c);
  ImportanceProfile profile;
  profile.scores.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    TokenSequence padded = c;
    padded[j] = model.embedder.pad_token_id();
    profile.scores[j] = mean_loss(padded) - full;
  }
  return profile;
}

ReducedConditionSet reduce_importance(const TokenSequence& c,
                                      const ImportanceProfile& profile,
                                      std::span<const double> proportions,
                                      int pad_token) {
  require(!c.empty(), "reduce_importance: empty condition");
  if (profile.scores.size() != c.size()) {
    throw ValidationError("reduce_importance: profile length " +
                          std::to_string(profile.scores.size()) +
                          " does not match condition length " +
                          std::to_string(c.size()));
  }
  double previous = 0.0;
  for (double p : proportions) {
    require(p > 0.0 && p < 1.0, "reduce_importance: proportion outside (0, 1)");
    require(p >= previous, "reduce_importance: proportions must be ascending");
    previous = p;
  }

  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profile.scores[a] > profile.scores[b];
  });

  ReducedConditionSet set;
  set.strategy = ReductionStrategy::kImportance;
  for (double p : proportions) {
    const std::size_t n_pad = std::min(ceil_count(p, c.size()), c.size());
    TokenSequence reduced = c;
    for (std::size_t r = 0; r < n_pad; ++r) reduced[order[r]] = pad_token;
    set.entries.push_back(std::move(reduced));
  }
  set.entries.push_back(null_condition());
  return set;
}

}  // namespace clid
