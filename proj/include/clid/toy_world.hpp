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
#ifndef CLID_TOY_WORLD_HPP_
#define CLID_TOY_WORLD_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clid/common.hpp"
#include "clid/embedder.hpp"

namespace clid {

struct MixtureComponent {
  Vec mean;
  double stddev = 1.0;
  TokenSequence canonical;
};

// Conditional Gaussian mixture: condition = canonical token sequence of a
// component, x ~ N(mean, stddev^2 I).
//
// Vocabulary layout: token 0 is pad, tokens [1, n_components] identify a
// component, tokens (n_components, vocab/2) are shared fillers and
// [vocab/2, vocab) is reserved for synonyms.
struct GaussianMixtureWorld {
  int dim = 0;
  int vocabulary_size = 0;
  std::uint64_t seed = 0;
  std::vector<MixtureComponent> components;

  // Component whose canonical sequence equals c, or -1.
  int find_component(std::span<const int> c) const;
  int identity_token(int component) const { return component + 1; }
};

struct DataPoint {
  Vec x;
  TokenSequence c;
};

struct ToyDataset {
  int dim = 0;
  std::vector<DataPoint> points;

  std::size_t size() const { return points.size(); }
  ToyDataset subset(std::span<const std::size_t> indices) const;
};

struct SplitSpec {
  std::vector<std::size_t> member;
  std::vector<std::size_t> holdout;
  std::vector<std::size_t> aux_member;
  std::vector<std::size_t> aux_holdout;
  std::uint64_t seed = 0;
};

struct AugmentationPolicy {
  bool enabled = false;
  double flip_prob = 0.5;
  double crop_mask_fraction = 0.125;
  double jitter_stddev = 0.1;

  void validate() const;
};

enum class DefenseKind { kNone, kRephrase, kDelete, kShuffle };

std::string to_string(DefenseKind kind);
DefenseKind defense_kind_from_string(const std::string& name);

struct DefensePolicy {
  DefenseKind kind = DefenseKind::kNone;
  double delete_fraction = 0.0;
  double shuffle_fraction = 0.0;
  std::map<int, int> synonym_map;

  void validate() const;
};

// Maps every content token of [1, vocab/2) to a reserved synonym in
// [vocab/2, vocab).
std::map<int, int> default_synonym_map(int vocabulary_size);

GaussianMixtureWorld generate_world(std::uint64_t seed, int n_components,
                                    int dim, double stddev,
                                    const ConditionEmbedder& vocab);

ToyDataset sample_dataset(const GaussianMixtureWorld& world, int per_component,
                          std::uint64_t seed);

SplitSpec split_dataset(const ToyDataset& dataset, std::uint64_t seed,
                        std::size_t member_n, std::size_t holdout_n,
                        std::size_t aux_member_n, std::size_t aux_holdout_n);

Vec augment(const Vec& x, const AugmentationPolicy& policy, Rng& rng);

ToyDataset apply_defense(const ToyDataset& dataset, const DefensePolicy& policy,
                         Rng& rng);

// Nearest component mean (Euclidean), ties to the lowest index.
TokenSequence pseudo_caption(const Vec& x, const GaussianMixtureWorld& world);

}  // namespace clid

#endif  // CLID_TOY_WORLD_HPP_
