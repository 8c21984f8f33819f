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
#ifndef CLID_ATTACKS_HPP_
#define CLID_ATTACKS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clid/boosted_trees.hpp"
#include "clid/indicator.hpp"
#include "clid/metrics.hpp"

namespace clid {

enum class ScalerCenter { kMean, kMedian };

std::string to_string(ScalerCenter center);
ScalerCenter scaler_center_from_string(const std::string& name);

// S(a) = (a - center) / IQR.
struct RobustScalerParams {
  double center = 0.0;
  double iqr = 0.0;

  bool fitted() const { return iqr > 0.0; }
  double apply(double value) const;
};

// Inclusive quantile: linear interpolation at position q * (n - 1) of the
// sorted values.
double quantile_inclusive(std::span<const double> sorted, double q);

// Default centre is the mean (the CLiD formulation); kMedian gives the
// conventional Robust-Scaler.
RobustScalerParams fit_robust_scaler(std::span<const double> values,
                                     ScalerCenter center = ScalerCenter::kMean);

struct ThresholdFit {
  double tau = 0.0;
  double accuracy = 0.0;
};

// tau maximizing accuracy of decide(score, tau); ties resolved to the
// midpoint of the lowest optimal gap between consecutive distinct scores.
ThresholdFit fit_decision_threshold(std::span<const double> scores,
                                    std::span<const bool> labels);

// alpha * S_D(mean_i D_i) + (1 - alpha) * S_L(L), negated when inverted.
struct ThresholdAttackModel {
  double alpha = 0.0;
  double tau = 0.0;
  RobustScalerParams scaler_d;
  RobustScalerParams scaler_l;
  bool inverted = false;
  double shadow_auc = 0.0;
  double shadow_accuracy = 0.0;
};

double score_clid_th(const IndicatorEstimate& estimate,
                     const ThresholdAttackModel& model);

inline constexpr double kAlphaGridStep = 0.05;

// Scalers fitted on all shadow values; alpha from the 0.05 grid maximizing
// max(AUC, 1 - AUC) (ties to smaller alpha); orientation flips when the
// chosen AUC is below 0.5; tau by fit_decision_threshold.
ThresholdAttackModel fit_threshold_attack(
    std::span<const IndicatorEstimate> shadow, std::span<const bool> labels,
    ScalerCenter center = ScalerCenter::kMean);

struct VectorAttackModel {
  BoostedTreeEnsemble classifier;
  double tau = 0.5;

  double confidence(const FeatureVector& v) const;
};

VectorAttackModel train_vector_classifier(std::span<const FeatureVector> shadow,
                                          std::span<const bool> labels,
                                          const BoostingParams& params = {});

enum class BaselineKind { kLoss, kMonteCarlo };

std::string to_string(BaselineKind kind);

struct BaselineScore {
  double score = 0.0;
  std::int64_t query_count = 0;
};

inline constexpr int kMonteCarloBaselineDraws = 3;

// loss: -||eps(x_t, t, c) - eps||^2 on the plan's first draw (1 query).
// monte_carlo: L over 3 draws (3 queries). Higher means more member-like.
BaselineScore score_baseline(const ModelHandle& model, const Vec& x,
                             const Condition& c, BaselineKind kind,
                             const MonteCarloPlan& plan);

}  // namespace clid

#endif  // CLID_ATTACKS_HPP_
