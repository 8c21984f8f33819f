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
#ifndef CLID_METRICS_HPP_
#define CLID_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace clid {

struct LabeledScore {
  std::size_t point_id = 0;
  double score = 0.0;
  bool member = false;
};

// Points run from (0, 0) to (1, 1); thresholds[i] is the score at or above
// which points are predicted members to reach point i (+inf for the origin).
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;
};

struct RocResult {
  RocCurve curve;
  double auc = 0.5;
};

// Thresholds sweep the unique scores in descending order, so tied scores
// flip together. The trapezoidal AUC is accumulated in integers and equals
// the Mann-Whitney statistic with ties counted as 1/2.
RocResult compute_roc_auc(std::span<const LabeledScore> scores);

// TPR at the largest achievable FPR <= target_fpr (step convention).
double tpr_at_fpr(const RocCurve& roc, double target_fpr = 0.01);

// Membership decision: strictly greater than the threshold.
inline bool decide(double score, double tau) { return score > tau; }

// Fraction of points with decide(score, tau) == member.
double attack_success_rate(std::span<const LabeledScore> scores, double tau);

struct MetricsReport {
  std::string attack_name;
  double asr = 0.0;
  double auc = 0.0;
  double tpr_at_1pct_fpr = 0.0;
  std::size_t n_member = 0;
  std::size_t n_holdout = 0;
  std::int64_t queries_per_point = 0;
  double tau = 0.0;
};

MetricsReport make_metrics_report(const std::string& attack_name,
                                  std::span<const LabeledScore> scores,
                                  double tau, std::int64_t queries_per_point);

}  // namespace clid

#endif  // CLID_METRICS_HPP_
