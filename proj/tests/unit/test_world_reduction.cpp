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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "clid/embedder.hpp"
#include "clid/reduction.hpp"
#include "clid/schedule.hpp"
#include "clid/toy_world.hpp"
#include "test_support.hpp"

namespace clid {
namespace {

ConditionEmbedder vocab() { return ConditionEmbedder::random(32, 16, 11); }

TEST(World, SingleComponentSamplesFollowItsGaussian) {
  const auto e = vocab();
  const auto world = generate_world(3, 1, 4, 0.5, e);
  const auto data = sample_dataset(world, 20000, 8);
  Vec mean = Vec::Zero(4);
  for (const auto& p : data.points) {
    mean += p.x;
    EXPECT_EQ(p.c, world.components[0].canonical);
  }
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (const auto& p : data.points) var += (p.x - mean).squaredNorm();
  var /= 4.0 * static_cast<double>(data.size() - 1);
  // Standard error of each mean coordinate is 0.5 / sqrt(20000).
  EXPECT_LT((mean - world.components[0].mean).cwiseAbs().maxCoeff(), 4 * 0.5 / std::sqrt(20000.0));
  EXPECT_NEAR(var, 0.25, 0.01);
}

TEST(World, SameSeedSameWorld) {
  const auto e = vocab();
  const auto a = generate_world(9, 8, 8, 1.0, e);
  const auto b = generate_world(9, 8, 8, 1.0, e);
  ASSERT_EQ(a.components.size(), b.components.size());
  for (std::size_t j = 0; j < a.components.size(); ++j) {
    EXPECT_TRUE(a.components[j].mean == b.components[j].mean);
    EXPECT_EQ(a.components[j].canonical, b.components[j].canonical);
  }
}

TEST(World, MeansDistinctAndSequencesIdentifyComponents) {
  const auto e = vocab();
  const auto world = generate_world(21, 8, 8, 1.0, e);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& seq = world.components[i].canonical;
    EXPECT_GE(seq.size(), 3u);
    EXPECT_LE(seq.size(), 6u);
    EXPECT_EQ(std::count(seq.begin(), seq.end(), world.identity_token(static_cast<int>(i))), 1);
    EXPECT_EQ(world.find_component(seq), static_cast<int>(i));
    for (int token : seq) {
      EXPECT_GE(token, 1);
      EXPECT_LT(token, e.vocabulary_size() / 2);
    }
    for (std::size_t j = i + 1; j < 8; ++j) {
      EXPECT_GT((world.components[i].mean - world.components[j].mean).norm(), 0.0);
    }
  }
}

TEST(World, RejectsTinyVocabulary) {
  const auto e = ConditionEmbedder::random(8, 4, 1);
  EXPECT_THROW(generate_world(1, 8, 2, 1.0, e), ValidationError);
}

TEST(Dataset, CountsAndComponentOrder) {
  const auto e = vocab();
  const auto world = generate_world(2, 3, 2, 1.0, e);
  EXPECT_EQ(sample_dataset(world, 1, 5).size(), 3u);
  const auto data = sample_dataset(world, 4, 5);
  ASSERT_EQ(data.size(), 12u);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(world.find_component(data.points[i].c), static_cast<int>(i / 4));
  }
}

TEST(Split, BoundaryAndDeterminism) {
  const auto e = vocab();
  const auto data = sample_dataset(generate_world(2, 4, 2, 1.0, e), 50, 5);
  const auto empty = split_dataset(data, 3, 0, 10, 10, 10);
  EXPECT_TRUE(empty.member.empty());
  const auto a = split_dataset(data, 3, 50, 50, 50, 50);
  const auto b = split_dataset(data, 3, 50, 50, 50, 50);
  EXPECT_EQ(a.member, b.member);
  EXPECT_EQ(a.aux_holdout, b.aux_holdout);
  EXPECT_THROW(split_dataset(data, 3, 51, 50, 50, 50), ValidationError);
}

TEST(Split, DisjointExactSizesOverManySeeds) {
  const auto e = vocab();
  const auto data = sample_dataset(generate_world(2, 4, 2, 1.0, e), 50, 5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 10 + seed % 40;
    const auto s = split_dataset(data, seed, n, 50 - seed % 7, 30, 20);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto* part : {&s.member, &s.holdout, &s.aux_member, &s.aux_holdout}) {
      total += part->size();
      for (std::size_t i : *part) {
        EXPECT_LT(i, data.size());
        seen.insert(i);
      }
    }
    EXPECT_EQ(s.member.size(), n);
    EXPECT_EQ(s.holdout.size(), 50 - seed % 7);
    EXPECT_EQ(seen.size(), total) << "seed " << seed;
  }
}

TEST(Augment, IdentityCases) {
  Rng rng(1);
  Vec x(3);
  x << 1.0, -2.0, 3.0;
  AugmentationPolicy off;
  EXPECT_TRUE(augment(x, off, rng) == x);
  AugmentationPolicy noop{true, 0.0, 0.0, 0.0};
  EXPECT_TRUE(augment(x, noop, rng) == x);
}

TEST(Augment, ForcedFlip) {
  Rng rng(1);
  Vec x(1);
  x << 2.5;
  const AugmentationPolicy flip{true, 1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(augment(x, flip, rng)[0], -2.5);
}

TEST(Augment, MaskZeroesCeilFraction) {
  Rng rng(4);
  const Vec x = Vec::Constant(8, 5.0);
  const AugmentationPolicy mask{true, 0.0, 0.25, 0.0};
  const Vec y = augment(x, mask, rng);
  EXPECT_EQ((y.array() == 0.0).count(), 2);
  EXPECT_EQ((y.array() == 5.0).count(), 6);
  AugmentationPolicy bad{true, 1.5, 0.0, 0.0};
  EXPECT_THROW(augment(x, bad, rng), ValidationError);
}

ToyDataset three_points() {
  ToyDataset d;
  d.dim = 1;
  d.points = {{Vec::Constant(1, 1.0), {1, 2, 3, 4}},
              {Vec::Constant(1, 2.0), {5, 6}},
              {Vec::Constant(1, 3.0), {7}}};
  return d;
}

bool same_conditions(const ToyDataset& a, const ToyDataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.points[i].c != b.points[i].c || a.points[i].x != b.points[i].x) return false;
  }
  return true;
}

TEST(Defense, NoneAndZeroDeleteAreIdentity) {
  Rng rng(2);
  const auto d = three_points();
  EXPECT_TRUE(same_conditions(apply_defense(d, DefensePolicy{}, rng), d));
  DefensePolicy del;
  del.kind = DefenseKind::kDelete;
  EXPECT_TRUE(same_conditions(apply_defense(d, del, rng), d));
}

TEST(Defense, DeleteRemovesCeilFractionButNeverAll) {
  Rng rng(2);
  DefensePolicy del;
  del.kind = DefenseKind::kDelete;
  del.delete_fraction = 0.5;
  const auto out = apply_defense(three_points(), del, rng);
  EXPECT_EQ(out.points[0].c.size(), 2u);
  EXPECT_EQ(out.points[1].c.size(), 1u);
  EXPECT_EQ(out.points[2].c, (TokenSequence{7}));
  del.delete_fraction = 1.0;
  const auto all = apply_defense(three_points(), del, rng);
  for (const auto& p : all.points) EXPECT_EQ(p.c.size(), 1u);
}

TEST(Defense, ShuffleOfTwoPointsPreservesMultiset) {
  ToyDataset d;
  d.dim = 1;
  d.points = {{Vec::Zero(1), {1, 2}}, {Vec::Ones(1), {3}}};
  DefensePolicy shuffle;
  shuffle.kind = DefenseKind::kShuffle;
  shuffle.shuffle_fraction = 1.0;
  bool swapped = false;
  bool fixed = false;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    Rng rng(seed);
    const auto out = apply_defense(d, shuffle, rng);
    std::multiset<TokenSequence> before{d.points[0].c, d.points[1].c};
    std::multiset<TokenSequence> after{out.points[0].c, out.points[1].c};
    EXPECT_EQ(before, after);
    EXPECT_TRUE(out.points[0].x == d.points[0].x);
    if (out.points[0].c == d.points[1].c) swapped = true;
    if (out.points[0].c == d.points[0].c) fixed = true;
  }
  EXPECT_TRUE(swapped);
  EXPECT_TRUE(fixed);
}

TEST(Defense, RephraseMapsThroughSynonyms) {
  Rng rng(1);
  DefensePolicy rephrase;
  rephrase.kind = DefenseKind::kRephrase;
  rephrase.synonym_map = default_synonym_map(32);
  const auto out = apply_defense(three_points(), rephrase, rng);
  EXPECT_EQ(out.points[0].c, (TokenSequence{16, 17, 18, 19}));
  EXPECT_EQ(out.points[2].c, (TokenSequence{22}));
  rephrase.synonym_map = {{1, 20}, {2, 20}};
  EXPECT_THROW(apply_defense(three_points(), rephrase, rng), ValidationError);
}

TEST(PseudoCaption, ExactMeanAndTieRule) {
  const auto e = vocab();
  auto world = generate_world(5, 6, 2, 1.0, e);
  for (std::size_t j = 0; j < world.components.size(); ++j) {
    EXPECT_EQ(pseudo_caption(world.components[j].mean, world), world.components[j].canonical);
  }
  world.components[2].mean << 1.0, 0.0;
  world.components[5].mean << -1.0, 0.0;
  for (std::size_t j : {0, 1, 3, 4}) world.components[j].mean << 50.0, 50.0 + j;
  EXPECT_EQ(pseudo_caption(Vec::Zero(2), world), world.components[2].canonical);
}

TEST(PseudoCaption, RecoversSourceUnderSmallNoise) {
  const auto e = vocab();
  const auto world = generate_world(8, 8, 8, 1.0, e);
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = i + 1; j < 8; ++j) {
      min_dist = std::min(min_dist, (world.components[i].mean - world.components[j].mean).norm());
    }
  }
  Rng rng(13);
  std::uniform_int_distribution<int> pick(0, 7);
  int hits = 0;
  const int draws = 10000;
  for (int n = 0; n < draws; ++n) {
    const int j = pick(rng);
    const Vec x = world.components[j].mean + 0.1 * min_dist * standard_normal(8, rng);
    if (pseudo_caption(x, world) == world.components[j].canonical) ++hits;
  }
  EXPECT_GE(hits, 0.99 * draws);
}

TEST(Reduction, NullConditionEmbedsToZero) {
  const auto e = vocab();
  EXPECT_TRUE(is_null(null_condition()));
  EXPECT_TRUE(embed_condition(e, null_condition()).isZero(0.0));
  EXPECT_FALSE(is_null(Condition{TokenSequence{3}}));
}

std::vector<TokenSequence> token_entries(const ReducedConditionSet& set) {
  std::vector<TokenSequence> out;
  for (const auto& entry : set.entries) out.push_back(std::get<TokenSequence>(entry));
  return out;
}

TEST(Reduction, ClipThirds) {
  EXPECT_EQ(token_entries(reduce_clip({1, 2, 3})),
            (std::vector<TokenSequence>{{1}, {2}, {3}, {}}));
  EXPECT_EQ(token_entries(reduce_clip({7})),
            (std::vector<TokenSequence>{{7}, {7}, {7}, {}}));
  EXPECT_EQ(token_entries(reduce_clip({1, 2, 3, 4, 5, 6})),
            (std::vector<TokenSequence>{{1, 2}, {3, 4}, {5, 6}, {}}));
  EXPECT_THROW(reduce_clip({}), ValidationError);
}

TEST(Reduction, EmbedNoiseScales) {
  const auto e = vocab();
  const TokenSequence c{3, 4, 5};
  Rng rng(3);
  const std::vector<double> zero{0.0};
  const auto exact = reduce_embed_noise(c, e, zero, rng);
  ASSERT_EQ(exact.k(), 2u);
  EXPECT_TRUE(std::get<Vec>(exact.entries[0]) == e.embed(c));
  EXPECT_TRUE(is_null(exact.entries[1]));

  // At scale 1 the entry only depends on the spread of the embedding, so
  // adding a constant to every coordinate leaves it unchanged.
  const std::vector<double> one{1.0};
  Rng r1(8), r2(8);
  const auto a = reduce_embed_noise(c, e, one, r1);
  Mat table = e.table().array() + 5.0;
  table.col(ConditionEmbedder::kPadToken).setZero();
  const ConditionEmbedder shifted(table);
  const auto b = reduce_embed_noise(c, shifted, one, r2);
  EXPECT_TRUE(std::get<Vec>(a.entries[0]).isApprox(std::get<Vec>(b.entries[0]), 1e-12));

  const std::vector<double> defaults{0.5, 0.7, 0.9};
  EXPECT_EQ(reduce_embed_noise(c, e, defaults, rng).k(), 4u);
}

TEST(Reduction, ImportanceCounts) {
  const TokenSequence c{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  ImportanceProfile profile;
  for (int i = 0; i < 10; ++i) profile.scores.push_back(static_cast<double>(i));
  const std::vector<double> props{0.3, 0.5, 0.7};
  const auto set = reduce_importance(c, profile, props, 0);
  ASSERT_EQ(set.k(), 4u);
  const auto entries = token_entries(set);
  EXPECT_EQ(entries[0], (TokenSequence{1, 2, 3, 4, 5, 6, 7, 0, 0, 0}));
  EXPECT_EQ(std::count(entries[1].begin(), entries[1].end(), 0), 5);
  EXPECT_EQ(std::count(entries[2].begin(), entries[2].end(), 0), 7);
  EXPECT_TRUE(entries[3].empty());
}

TEST(Reduction, ImportanceSmallLengths) {
  const std::vector<double> tiny{0.01};
  ImportanceProfile p3{{0.2, 0.9, 0.1}};
  EXPECT_EQ(token_entries(reduce_importance({4, 5, 6}, p3, tiny, 0))[0],
            (TokenSequence{4, 0, 6}));
  const std::vector<double> half{0.5};
  ImportanceProfile p2{{1.0, 3.0}};
  EXPECT_EQ(token_entries(reduce_importance({4, 5}, p2, half, 0))[0], (TokenSequence{4, 0}));
  ImportanceProfile tied{{1.0, 1.0}};
  EXPECT_EQ(token_entries(reduce_importance({4, 5}, tied, half, 0))[0], (TokenSequence{0, 5}));
  EXPECT_THROW(reduce_importance({4, 5}, p3, half, 0), ValidationError);
}

TEST(Reduction, TokenImportanceProperties) {
  const auto e = vocab();
  const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.05);
  DenoiserNet net(4, 16, {16}, 8);
  net.init_random(3);
  const testing::ConditionBlind blind(net);
  MonteCarloPlan plan;
  plan.timesteps = {10, 20};
  plan.noise_seed = 5;
  Rng rng(2);
  const Vec x = standard_normal(4, rng);
  const auto flat = token_importance({blind, s, e}, x, {3, 4, 5}, plan);
  for (double v : flat.scores) EXPECT_EQ(v, 0.0);
  const auto twin = token_importance({net, s, e}, x, {6, 6}, plan);
  EXPECT_EQ(twin.scores[0], twin.scores[1]);
}

}  // namespace
}  // namespace clid
