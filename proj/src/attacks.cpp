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
#include "clid/attacks.hpp"

#include <algorithm>
#include <cmath>

namespace clid {
namespace {

void require_both_labels(std::span<const bool> labels) {
  const auto positives = std::count(labels.begin(), labels.end(), true);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw ValidationError("attack fitting needs both member and hold-out labels");
  }
}

double auc_of(std::span<const double> scores, std::span<const bool> labels) {
  std::vector<LabeledScore> labeled(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    labeled[i] = {i, scores[i], labels[i]};
  }
  return compute_roc_auc(labeled).auc;
}

}  // namespace

std::string to_string(ScalerCenter center) {
  return center == ScalerCenter::kMean ? "mean" : "median";
}

ScalerCenter scaler_center_from_string(const std::string& name) {
  if (name == "mean") return ScalerCenter::kMean;
  if (name == "median") return ScalerCenter::kMedian;
  throw ValidationError("unknown scaler centre '" + name + "'");
}

double RobustScalerParams::apply(double value) const {
  if (!fitted()) throw ValidationError("robust scaler is not fitted");
  return (value - center) / iqr;
}

double quantile_inclusive(std::span<const double> sorted, double q) {
  require(!sorted.empty(), "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

RobustScalerParams fit_robust_scaler(std::span<const double> values,
                                     ScalerCenter center) {
  require(values.size() >= 4, "robust scaler needs at least 4 values");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) require(std::isfinite(v), "robust scaler: non-finite value");
  std::sort(sorted.begin(), sorted.end());
  RobustScalerParams params;
  params.iqr = quantile_inclusive(sorted, 0.75) - quantile_inclusive(sorted, 0.25);
  if (!(params.iqr > 0.0)) {
    throw ValidationError("robust scaler: degenerate feature (IQR = 0)");
  }
  if (center == ScalerCenter::kMedian) {
    params.center = quantile_inclusive(sorted, 0.5);
  } else {
    double total = 0.0;
    for (double v : sorted) total += v;
    params.center = total / static_cast<double>(sorted.size());
  }
  return params;
}

ThresholdFit fit_decision_threshold(std::span<const double> scores,
                                    std::span<const bool> labels) {
  require(scores.size() == labels.size() && !scores.empty(),
          "threshold fit: scores and labels must align");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  const auto n = static_cast<std::int64_t>(scores.size());
  const auto positives = static_cast<std::int64_t>(
      std::count(labels.begin(), labels.end(), true));

  // Threshold below everything: all predicted members.
  std::int64_t correct = positives;
  std::int64_t best_correct = correct;
  double best_tau = scores[order.front()] - 1.0;
  for (std::size_t i = 0; i < order.size();) {
    const double value = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == value; ++i) {
      correct += labels[order[i]] ? -1 : 1;
    }
    if (correct > best_correct) {
      best_correct = correct;
      best_tau = i < order.size() ? value + 0.5 * (scores[order[i]] - value)
                                  : value + 1.0;
    }
  }
  return {best_tau, static_cast<double>(best_correct) / static_cast<double>(n)};
}

double score_clid_th(const IndicatorEstimate& estimate,
                     const ThresholdAttackModel& model) {
  const double combined = model.alpha * model.scaler_d.apply(estimate.mean_discrepancy()) +
                          (1.0 - model.alpha) * model.scaler_l.apply(estimate.elbo_proxy);
  return model.inverted ? -combined : combined;
}

ThresholdAttackModel fit_threshold_attack(std::span<const IndicatorEstimate> shadow,
                                          std::span<const bool> labels,
                                          ScalerCenter center) {
  require(shadow.size() == labels.size(), "shadow estimates and labels differ in length");
  require_both_labels(labels);
  std::vector<double> mean_d(shadow.size());
  std::vector<double> elbo(shadow.size());
  for (std::size_t i = 0; i < shadow.size(); ++i) {
    mean_d[i] = shadow[i].mean_discrepancy();
    elbo[i] = shadow[i].elbo_proxy;
  }

  ThresholdAttackModel model;
  model.scaler_d = fit_robust_scaler(mean_d, center);
  model.scaler_l = fit_robust_scaler(elbo, center);

  const int grid = static_cast<int>(std::lround(1.0 / kAlphaGridStep));
  double best_objective = -1.0;
  std::vector<double> combined(shadow.size());
  for (int g = 0; g <= grid; ++g) {
    const double alpha = static_cast<double>(g) / grid;
    ThresholdAttackModel candidate = model;
    candidate.alpha = alpha;
    for (std::size_t i = 0; i < shadow.size(); ++i) {
      combined[i] = score_clid_th(shadow[i], candidate);
    }
    const double auc = auc_of(combined, labels);
    const double objective = std::max(auc, 1.0 - auc);
    if (objective > best_objective) {
      best_objective = objective;
      model.alpha = alpha;
      model.shadow_auc = auc;
    }
  }
  model.inverted = model.shadow_auc < 0.5;

  for (std::size_t i = 0; i < shadow.size(); ++i) {
    combined[i] = score_clid_th(shadow[i], model);
  }
  const ThresholdFit fit = fit_decision_threshold(combined, labels);
  model.tau = fit.tau;
  model.shadow_accuracy = fit.accuracy;
  return model;
}

double VectorAttackModel::confidence(const FeatureVector& v) const {
  return classifier.confidence(v.values);
}

VectorAttackModel train_vector_classifier(std::span<const FeatureVector> shadow,
                                          std::span<const bool> labels,
                                          const BoostingParams& params) {
  require(shadow.size() == labels.size(), "shadow vectors and labels differ in length");
  require_both_labels(labels);
  std::vector<std::vector<double>> rows;
  rows.reserve(shadow.size());
  for (const auto& v : shadow) rows.push_back(v.values);

  VectorAttackModel model;
  model.classifier = BoostedTreeEnsemble::fit(rows, labels, params);
  std::vector<double> conf(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    conf[i] = model.classifier.confidence(rows[i]);
  }
  model.tau = fit_decision_threshold(conf, labels).tau;
  return model;
}

std::string to_string(BaselineKind kind) {
  return kind == BaselineKind::kLoss ? "loss" : "monte_carlo";
}

BaselineScore score_baseline(const ModelHandle& model, const Vec& x,
                             const Condition& c, BaselineKind kind,
                             const MonteCarloPlan& plan) {
  QueryCounter counter(model.net);
  const ModelHandle counted{counter, model.schedule, model.embedder};
  MonteCarloPlan own = plan;
  own.m_draws = kind == BaselineKind::kLoss ? 1 : kMonteCarloBaselineDraws;
  BaselineScore result;
  result.score = estimate_elbo_proxy(counted, x, c, own);
  result.query_count = counter.count();
  return result;
}

}  // namespace clid
