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
#include "clid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clid/common.hpp"

namespace clid {
namespace {

void require_both_labels(std::span<const LabeledScore> scores,
                         std::size_t& n_member, std::size_t& n_holdout) {
  n_member = 0;
  n_holdout = 0;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw ValidationError("non-finite score");
    (s.member ? n_member : n_holdout) += 1;
  }
  if (n_member == 0 || n_holdout == 0) {
    throw ValidationError("metrics need at least one member and one hold-out point");
  }
}

}  // namespace

RocResult compute_roc_auc(std::span<const LabeledScore> scores) {
  std::size_t n_member = 0;
  std::size_t n_holdout = 0;
  require_both_labels(scores, n_member, n_holdout);

  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) {
              return a.score > b.score;
            });

  RocResult result;
  RocCurve& roc = result.curve;
  roc.fpr.push_back(0.0);
  roc.tpr.push_back(0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());

  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t twice_area = 0;  // sum of dfp * (tp_prev + tp_new)
  for (std::size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].score;
    const std::int64_t tp_prev = tp;
    const std::int64_t fp_prev = fp;
    for (; i < sorted.size() && sorted[i].score == threshold; ++i) {
      (sorted[i].member ? tp : fp) += 1;
    }
    twice_area += (fp - fp_prev) * (tp + tp_prev);
    roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_holdout));
    roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_member));
    roc.thresholds.push_back(threshold);
  }
  result.auc = static_cast<double>(twice_area) /
               (2.0 * static_cast<double>(n_member) * static_cast<double>(n_holdout));
  return result;
}

double tpr_at_fpr(const RocCurve& roc, double target_fpr) {
  double best_fpr = -1.0;
  double best_tpr = 0.0;
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) {
    if (roc.fpr[i] > target_fpr) continue;
    if (roc.fpr[i] > best_fpr || (roc.fpr[i] == best_fpr && roc.tpr[i] > best_tpr)) {
      best_fpr = roc.fpr[i];
      best_tpr = roc.tpr[i];
    }
  }
  return best_tpr;
}

double attack_success_rate(std::span<const LabeledScore> scores, double tau) {
  std::size_t n_member = 0;
  std::size_t n_holdout = 0;
  require_both_labels(scores, n_member, n_holdout);
  std::size_t correct = 0;
  for (const auto& s : scores) correct += decide(s.score, tau) == s.member ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

MetricsReport make_metrics_report(const std::string& attack_name,
                                  std::span<const LabeledScore> scores,
                                  double tau, std::int64_t queries_per_point) {
  const RocResult roc = compute_roc_auc(scores);
  MetricsReport report;
  report.attack_name = attack_name;
  report.auc = roc.auc;
  report.tpr_at_1pct_fpr = tpr_at_fpr(roc.curve, 0.01);
  report.asr = attack_success_rate(scores, tau);
  report.tau = tau;
  report.queries_per_point = queries_per_point;
  for (const auto& s : scores) (s.member ? report.n_member : report.n_holdout) += 1;
  return report;
}

}  // namespace clid
