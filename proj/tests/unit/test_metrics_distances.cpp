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

#include <cmath>
#include <limits>

#include "clid/boosted_trees.hpp"
#include "clid/distances.hpp"
#include "clid/metrics.hpp"
#include "clid/theorem.hpp"

namespace clid {
namespace {

std::vector<LabeledScore> random_instance(Rng& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> value(0, levels - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<LabeledScore> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, static_cast<double>(value(rng)), coin(rng)});
  out[0].member = true;
  out[1].member = false;
  return out;
}

double pairwise_auc(const std::vector<LabeledScore>& s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& m : s) {
    if (!m.member) continue;
    for (const auto& h : s) {
      if (h.member) continue;
      pairs += 1.0;
      wins += m.score > h.score ? 1.0 : (m.score == h.score ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

double brute_force_tpr(const std::vector<LabeledScore>& s, double target) {
  std::vector<double> cuts{std::numeric_limits<double>::infinity()};
  for (const auto& p : s) cuts.push_back(p.score);
  double n_m = 0.0, n_h = 0.0;
  for (const auto& p : s) (p.member ? n_m : n_h) += 1.0;
  double best = 0.0;
  for (double cut : cuts) {
    double tp = 0.0, fp = 0.0;
    for (const auto& p : s) {
      if (p.score >= cut) (p.member ? tp : fp) += 1.0;
    }
    if (fp / n_h <= target) best = std::max(best, tp / n_m);
  }
  return best;
}

TEST(Roc, PerfectAndTiedExamples) {
  const std::vector<LabeledScore> perfect{{0, 0.9, true}, {1, 0.8, true}, {2, 0.2, false}, {3, 0.1, false}};
  const auto r = compute_roc_auc(perfect);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_DOUBLE_EQ(tpr_at_fpr(r.curve), 1.0);
  EXPECT_EQ(r.curve.fpr.front(), 0.0);
  EXPECT_EQ(r.curve.tpr.back(), 1.0);
  EXPECT_TRUE(std::isinf(r.curve.thresholds.front()));

  std::vector<LabeledScore> tied;
  for (std::size_t i = 0; i < 200; ++i) tied.push_back({i, 3.0, i < 100});
  const auto t = compute_roc_auc(tied);
  EXPECT_DOUBLE_EQ(t.auc, 0.5);
  EXPECT_DOUBLE_EQ(tpr_at_fpr(t.curve, 0.01), 0.0);
}

TEST(Roc, MatchesPairwiseAndThresholdOracles) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_instance(rng, 40, trial % 2 == 0 ? 6 : 1000);
    const auto r = compute_roc_auc(s);
    EXPECT_DOUBLE_EQ(r.auc, pairwise_auc(s));
    for (double target : {0.0, 0.01, 0.1, 0.37}) {
      EXPECT_DOUBLE_EQ(tpr_at_fpr(r.curve, target), brute_force_tpr(s, target));
    }
  }
}

TEST(Roc, LabelFlipAndMonotoneInvariance) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_instance(rng, 60, 8);
    const double auc = compute_roc_auc(s).auc;
    auto flipped = s;
    auto warped = s;
    for (auto& p : flipped) p.member = !p.member;
    for (auto& p : warped) p.score = std::exp(0.7 * p.score) + 3.0;
    EXPECT_DOUBLE_EQ(compute_roc_auc(flipped).auc, 1.0 - auc);
    EXPECT_DOUBLE_EQ(compute_roc_auc(warped).auc, auc);
  }
}

TEST(Roc, RequiresBothLabels) {
  const std::vector<LabeledScore> one{{0, 1.0, true}, {1, 2.0, true}};
  EXPECT_THROW(compute_roc_auc(one), ValidationError);
}

TEST(Asr, ExamplesAndRecount) {
  const std::vector<LabeledScore> perfect{{0, 0.9, true}, {1, 0.8, true}, {2, 0.2, false}};
  EXPECT_DOUBLE_EQ(attack_success_rate(perfect, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(attack_success_rate(perfect, std::numeric_limits<double>::infinity()), 1.0 / 3.0);
  Rng rng(5);
  const auto s = random_instance(rng, 50, 10);
  double correct = 0.0;
  for (const auto& p : s) correct += (p.score > 4.0) == p.member;
  EXPECT_DOUBLE_EQ(attack_success_rate(s, 4.0), correct / 50.0);
  const auto report = make_metrics_report("x", s, 4.0, 15);
  EXPECT_EQ(report.n_member + report.n_holdout, 50u);
  EXPECT_EQ(report.queries_per_point, 15);
  EXPECT_DOUBLE_EQ(report.asr, correct / 50.0);
}

Mat random_samples(int dim, int n, Rng& rng) {
  Mat m(dim, n);
  for (int i = 0; i < n; ++i) m.col(i) = standard_normal(dim, rng);
  return m;
}

TEST(ToyFid, ClosedForms) {
  Rng rng(6);
  const Mat a = random_samples(3, 200, rng);
  EXPECT_NEAR(toy_fid(a, a), 0.0, 1e-8);
  Vec shift(3);
  shift << 1.0, -2.0, 0.5;
  const Mat b = a.colwise() + shift;
  EXPECT_NEAR(toy_fid(a, b), shift.squaredNorm(), 1e-6);

  const Mat x = random_samples(1, 300, rng);
  const double mean = x.mean();
  const Mat y = ((x.array() - mean) * 2.5 + mean).matrix();
  const double var_x = (x.array() - mean).square().sum() / 299.0;
  const double sa = std::sqrt(var_x);
  EXPECT_NEAR(toy_fid(x, y), (sa - 2.5 * sa) * (sa - 2.5 * sa), 1e-9);
  EXPECT_THROW(toy_fid(random_samples(4, 3, rng), random_samples(4, 30, rng)), ValidationError);
}

TEST(AuxDistances, IdentitiesAndSymmetry) {
  Rng rng(7);
  const Mat a = random_samples(2, 60, rng);
  const Mat b = (random_samples(2, 50, rng).array() + 0.7).matrix();
  EXPECT_NEAR(sliced_wasserstein(a, a), 0.0, 1e-12);
  EXPECT_GE(kernel_mmd(a, a), 0.0);
  EXPECT_LE(kernel_mmd(a, a), kernel_mmd(a, b));
  EXPECT_LE(one_nn_accuracy(a, a), 0.5);
  for (auto kind : {DistanceKind::kToyFid, DistanceKind::kSlicedWasserstein,
                    DistanceKind::kKernelMmd, DistanceKind::kOneNn}) {
    EXPECT_NEAR(sample_distance(kind, a, b), sample_distance(kind, b, a), 1e-9) << to_string(kind);
    EXPECT_EQ(distance_kind_from_string(to_string(kind)), kind);
  }
}

TEST(AuxDistances, OneDimensionalTransportAndSeparation) {
  Mat a(1, 2), b(1, 2);
  a << 0.0, 1.0;
  b << 10.0, 11.0;
  EXPECT_NEAR(sliced_wasserstein(a, b), 10.0, 1e-12);
  Rng rng(8);
  const Mat near = random_samples(3, 40, rng);
  const Mat far = (random_samples(3, 40, rng).array() + 100.0).matrix();
  EXPECT_DOUBLE_EQ(one_nn_accuracy(near, far), 1.0);
}

DiscreteJointDistribution random_joint(Rng& rng, int n_x, int n_c) {
  DiscreteJointDistribution d{n_x, n_c, {}};
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double total = 0.0;
  for (int i = 0; i < n_x * n_c; ++i) {
    d.mass.push_back(u(rng));
    total += d.mass.back();
  }
  for (double& m : d.mass) m /= total;
  return d;
}

// Direct evaluation of both sides from joint masses.
double kl_direct(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) s += q[i] * std::log(q[i] / p[i]);
  }
  return s;
}

double side_direct(const DiscreteJointDistribution& q, const DiscreteJointDistribution& p) {
  std::vector<double> qx(q.n_x, 0.0), px(p.n_x, 0.0);
  double expected = 0.0;
  for (int c = 0; c < q.n_c; ++c) {
    double qc = 0.0, pc = 0.0;
    for (int x = 0; x < q.n_x; ++x) {
      qc += q.at(x, c);
      pc += p.at(x, c);
      qx[x] += q.at(x, c);
      px[x] += p.at(x, c);
    }
    std::vector<double> qcond(q.n_x), pcond(q.n_x);
    for (int x = 0; x < q.n_x; ++x) {
      qcond[x] = q.at(x, c) / qc;
      pcond[x] = p.at(x, c) / pc;
    }
    expected += qc * kl_direct(qcond, pcond);
  }
  return expected - kl_direct(qx, px);
}

TEST(Theorem, IdenticalDistributionsGiveZero) {
  Rng rng(9);
  const auto p = random_joint(rng, 3, 2);
  const auto same = verify_theorem_equivalence(p, p, p);
  EXPECT_NEAR(same.form_a, 0.0, 1e-15);
  EXPECT_NEAR(same.form_b, 0.0, 1e-15);
  const auto q = random_joint(rng, 3, 2);
  const auto shared = verify_theorem_equivalence(q, q, p);
  EXPECT_NEAR(shared.form_a, 0.0, 1e-15);
  EXPECT_NEAR(shared.form_b, 0.0, 1e-15);
  EXPECT_NEAR(shared.delta_h, 0.0, 1e-15);
  EXPECT_TRUE(shared.equal);
}

TEST(Theorem, FormsAgreeOnRandomTriples) {
  Rng rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto q_mem = random_joint(rng, 3, 2);
    const auto q_out = random_joint(rng, 3, 2);
    const auto p = random_joint(rng, 3, 2);
    const auto check = verify_theorem_equivalence(q_mem, q_out, p);
    EXPECT_NEAR(check.form_a, side_direct(q_out, p) - side_direct(q_mem, p), 1e-12);
    EXPECT_LT(std::abs(check.form_a - check.form_b), 1e-9);
    EXPECT_TRUE(check.equal);
    EXPECT_DOUBLE_EQ(check.delta_h_shannon, -check.delta_h);
  }
}

TEST(Theorem, RejectsUnsupportedMass) {
  Rng rng(11);
  const auto q = random_joint(rng, 3, 2);
  auto p = random_joint(rng, 3, 2);
  p.mass[0] += p.mass[1];
  p.mass[1] = 0.0;
  EXPECT_THROW(verify_theorem_equivalence(q, q, p), ValidationError);
}

TEST(BoostedTrees, LearnsThresholdAndRejectsBadParams) {
  std::vector<std::vector<double>> rows;
  std::unique_ptr<bool[]> labels(new bool[60]);
  for (int i = 0; i < 60; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>(i % 7)});
    labels[i] = i >= 30;
  }
  const std::span<const bool> view(labels.get(), 60);
  const auto model = BoostedTreeEnsemble::fit(rows, view, BoostingParams{});
  EXPECT_EQ(model.trees().size(), 50u);
  EXPECT_EQ(model.n_features(), 2u);
  EXPECT_LT(model.confidence(rows[0]), 0.5);
  EXPECT_GT(model.confidence(rows[59]), 0.5);
  EXPECT_GT(model.confidence(rows[0]), 0.0);
  EXPECT_LT(model.confidence(rows[59]), 1.0);
  BoostingParams bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(BoostedTreeEnsemble::fit(rows, view, bad), ValidationError);
}

}  // namespace
}  // namespace clid
