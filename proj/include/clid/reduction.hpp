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
#ifndef CLID_REDUCTION_HPP_
#define CLID_REDUCTION_HPP_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "clid/common.hpp"
#include "clid/monte_carlo.hpp"

namespace clid {

// A condition is either a token sequence or an already-perturbed embedding.
using Condition = std::variant<TokenSequence, Vec>;

Vec embed_condition(const ConditionEmbedder& embedder, const Condition& c);

enum class ReductionStrategy { kClip, kEmbedNoise, kImportance };

std::string to_string(ReductionStrategy strategy);
ReductionStrategy reduction_strategy_from_string(const std::string& name);

// Degraded versions of one condition; the last entry is always null.
struct ReducedConditionSet {
  std::vector<Condition> entries;
  ReductionStrategy strategy = ReductionStrategy::kClip;

  std::size_t k() const { return entries.size(); }
};

struct ImportanceProfile {
  std::vector<double> scores;
};

Condition null_condition();
bool is_null(const Condition& c);

// First, middle and last thirds of the sequence, then null.
ReducedConditionSet reduce_clip(const TokenSequence& c);

// (1 - s) embed(c) + s * eta per scale, eta ~ N(0, var(embed(c)) I), then null.
ReducedConditionSet reduce_embed_noise(const TokenSequence& c,
                                       const ConditionEmbedder& embedder,
                                       std::span<const double> scales, Rng& rng);

// Leave-one-out loss increase when token j is replaced by pad, averaged over
// the plan's M draws (shared across all variants). Issues (L + 1) * M queries.
ImportanceProfile token_importance(const ModelHandle& model, const Vec& x,
                                   const TokenSequence& c,
                                   const MonteCarloPlan& plan);

// Pads the ceil(p * L) most important tokens per proportion p, then null.
ReducedConditionSet reduce_importance(const TokenSequence& c,
                                      const ImportanceProfile& profile,
                                      std::span<const double> proportions,
                                      int pad_token = ConditionEmbedder::kPadToken);

}  // namespace clid

#endif  // CLID_REDUCTION_HPP_
