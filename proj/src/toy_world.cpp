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
#include "clid/toy_world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace clid {
namespace {

constexpr int kMinSequenceLength = 3;
constexpr int kMaxSequenceLength = 6;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

int GaussianMixtureWorld::find_component(std::span<const int> c) const {
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto& canon = components[j].canonical;
    if (std::equal(canon.begin(), canon.end(), c.begin(), c.end())) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

ToyDataset ToyDataset::subset(std::span<const std::size_t> indices) const {
  ToyDataset out;
  out.dim = dim;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < points.size(), "subset index out of range");
    out.points.push_back(points[i]);
  }
  return out;
}

void AugmentationPolicy::validate() const {
  require(in_unit_interval(flip_prob), "augmentation.flip_prob outside [0, 1]");
  require(crop_mask_fraction >= 0.0 && crop_mask_fraction < 1.0,
          "augmentation.crop_mask_fraction outside [0, 1)");
  require(jitter_stddev >= 0.0, "augmentation.jitter_stddev must be >= 0");
}

std::string to_string(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kNone: return "none";
    case DefenseKind::kRephrase: return "rephrase";
    case DefenseKind::kDelete: return "delete";
    case DefenseKind::kShuffle: return "shuffle";
  }
  return "none";
}

DefenseKind defense_kind_from_string(const std::string& name) {
  if (name == "none") return DefenseKind::kNone;
  if (name == "rephrase") return DefenseKind::kRephrase;
  if (name == "delete") return DefenseKind::kDelete;
  if (name == "shuffle") return DefenseKind::kShuffle;
  throw ValidationError("unknown defense kind '" + name + "'");
}

void DefensePolicy::validate() const {
  require(in_unit_interval(delete_fraction), "delete_fraction outside [0, 1]");
  require(in_unit_interval(shuffle_fraction), "shuffle_fraction outside [0, 1]");
  std::set<int> images;
  for (const auto& [from, to] : synonym_map) {
    require(images.insert(to).second, "synonym_map must be injective");
    require(!synonym_map.contains(to),
            "synonym_map targets must be reserved synonym tokens");
  }
}

std::map<int, int> default_synonym_map(int vocabulary_size) {
  const int half = vocabulary_size / 2;
  std::map<int, int> map;
  for (int token = 1; token < half; ++token) map[token] = half + token - 1;
  return map;
}

GaussianMixtureWorld generate_world(std::uint64_t seed, int n_components,
                                    int dim, double stddev,
                                    const ConditionEmbedder& vocab) {
  require(n_components >= 1, "n_components must be >= 1");
  require(dim >= 1, "dim must be >= 1");
  require(stddev > 0.0, "stddev must be > 0");
  const int vocab_size = vocab.vocabulary_size();
  const int first_filler = n_components + 1;
  const int end_filler = vocab_size / 2;
  if (end_filler - first_filler < 1) {
    throw ValidationError("vocabulary of size " + std::to_string(vocab_size) +
                          " too small for " + std::to_string(n_components) +
                          " components");
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_int_distribution<int> length(kMinSequenceLength,
                                            kMaxSequenceLength);
  std::uniform_int_distribution<int> filler(first_filler, end_filler - 1);

  GaussianMixtureWorld world;
  world.dim = dim;
  world.vocabulary_size = vocab_size;
  world.seed = seed;
  for (int j = 0; j < n_components; ++j) {
    MixtureComponent comp;
    comp.mean.resize(dim);
    for (int i = 0; i < dim; ++i) comp.mean[i] = coord(rng);
    comp.stddev = stddev;
    const int len = length(rng);
    std::uniform_int_distribution<int> slot(0, len - 1);
    const int identity_slot = slot(rng);
    for (int p = 0; p < len; ++p) {
      comp.canonical.push_back(p == identity_slot ? world.identity_token(j)
                                                  : filler(rng));
    }
    world.components.push_back(std::move(comp));
  }
  return world;
}

ToyDataset sample_dataset(const GaussianMixtureWorld& world, int per_component,
                          std::uint64_t seed) {
  require(per_component >= 1, "per_component must be >= 1");
  require(!world.components.empty(), "world has no components");
  Rng rng(seed);
  ToyDataset data;
  data.dim = world.dim;
  data.points.reserve(world.components.size() * per_component);
  for (const auto& comp : world.components) {
    for (int n = 0; n < per_component; ++n) {
      data.points.push_back(
          {comp.mean + comp.stddev * standard_normal(world.dim, rng),
           comp.canonical});
    }
  }
  return data;
}

SplitSpec split_dataset(const ToyDataset& dataset, std::uint64_t seed,
                        std::size_t member_n, std::size_t holdout_n,
                        std::size_t aux_member_n, std::size_t aux_holdout_n) {
  const std::size_t total = member_n + holdout_n + aux_member_n + aux_holdout_n;
  if (total > dataset.size()) {
    throw ValidationError("split sizes (" + std::to_string(total) +
                          ") exceed dataset size (" +
                          std::to_string(dataset.size()) + ")");
  }
  Rng rng(seed);
  const auto order = choose_distinct(dataset.size(), total, rng);
  SplitSpec split;
  split.seed = seed;
  auto take = [&, pos = std::size_t{0}](std::size_t n) mutable {
    std::vector<std::size_t> out(order.begin() + pos, order.begin() + pos + n);
    pos += n;
    return out;
  };
  split.member = take(member_n);
  split.holdout = take(holdout_n);
  split.aux_member = take(aux_member_n);
  split.aux_holdout = take(aux_holdout_n);
  return split;
}

Vec augment(const Vec& x, const AugmentationPolicy& policy, Rng& rng) {
  if (!policy.enabled) return x;
  policy.validate();
  Vec out = x;
  const auto dim = static_cast<std::size_t>(x.size());
  if (dim == 0) return out;
  std::bernoulli_distribution flip(policy.flip_prob);
  if (flip(rng)) {
    std::uniform_int_distribution<std::size_t> coord(0, dim - 1);
    const auto i = static_cast<Eigen::Index>(coord(rng));
    out[i] = -out[i];
  }
  const auto masked = static_cast<std::size_t>(
      std::ceil(policy.crop_mask_fraction * static_cast<double>(dim)));
  for (std::size_t i : choose_distinct(dim, std::min(masked, dim), rng)) {
    out[static_cast<Eigen::Index>(i)] = 0.0;
  }
  if (policy.jitter_stddev > 0.0) {
    out += policy.jitter_stddev * standard_normal(static_cast<int>(dim), rng);
  }
  return out;
}

ToyDataset apply_defense(const ToyDataset& dataset, const DefensePolicy& policy,
                         Rng& rng) {
  policy.validate();
  ToyDataset out = dataset;
  switch (policy.kind) {
    case DefenseKind::kNone:
      break;
    case DefenseKind::kRephrase:
      for (auto& p : out.points) {
        for (int& token : p.c) {
          if (auto it = policy.synonym_map.find(token);
              it != policy.synonym_map.end()) {
            token = it->second;
          }
        }
      }
      break;
    case DefenseKind::kDelete:
      if (policy.delete_fraction <= 0.0) break;
      for (auto& p : out.points) {
        const std::size_t len = p.c.size();
        if (len <= 1) continue;
        std::size_t n_delete = static_cast<std::size_t>(
            std::ceil(policy.delete_fraction * static_cast<double>(len)));
        n_delete = std::min(n_delete, len - 1);
        auto drop = choose_distinct(len, n_delete, rng);
        std::sort(drop.begin(), drop.end());
        TokenSequence kept;
        for (std::size_t i = 0; i < len; ++i) {
          if (!std::binary_search(drop.begin(), drop.end(), i)) {
            kept.push_back(p.c[i]);
          }
        }
        p.c = std::move(kept);
      }
      break;
    case DefenseKind::kShuffle: {
      const auto n_shuffle = static_cast<std::size_t>(std::llround(
          policy.shuffle_fraction * static_cast<double>(out.size())));
      auto chosen = choose_distinct(out.size(), n_shuffle, rng);
      std::sort(chosen.begin(), chosen.end());
      std::vector<TokenSequence> conds;
      for (std::size_t i : chosen) conds.push_back(out.points[i].c);
      std::shuffle(conds.begin(), conds.end(), rng);
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        out.points[chosen[k]].c = std::move(conds[k]);
      }
      break;
    }
  }
  return out;
}

TokenSequence pseudo_caption(const Vec& x, const GaussianMixtureWorld& world) {
  require(!world.components.empty(), "pseudo_caption: empty world");
  require(x.size() == world.dim, "pseudo_caption: dimension mismatch");
  std::size_t best = 0;
  double best_dist = (x - world.components[0].mean).squaredNorm();
  for (std::size_t j = 1; j < world.components.size(); ++j) {
    const double d = (x - world.components[j].mean).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  return world.components[best].canonical;
}

}  // namespace clid
