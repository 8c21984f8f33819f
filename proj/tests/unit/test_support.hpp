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
#ifndef CLID_TESTS_TEST_SUPPORT_HPP_
#define CLID_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "clid/denoiser.hpp"
#include "clid/schedule.hpp"

namespace clid::testing {

// Always predicts zero noise.
class ZeroModel final : public NoisePredictor {
 public:
  ZeroModel(int data_dim, int cond_dim) : data_dim_(data_dim), cond_dim_(cond_dim) {}
  int data_dim() const override { return data_dim_; }
  int cond_dim() const override { return cond_dim_; }
  Mat predict(const Mat& x_t, std::span<const int>, const Mat&) const override {
    return Mat::Zero(data_dim_, x_t.cols());
  }

 private:
  int data_dim_;
  int cond_dim_;
};

// Knows the clean point x0 and recovers the exact noise from x_t. When
// condition_aware is set it only does so for non-zero condition embeddings
// and predicts zero under the null condition.
class OracleModel final : public NoisePredictor {
 public:
  OracleModel(Vec x0, int cond_dim, const NoiseSchedule& schedule, bool condition_aware)
      : x0_(std::move(x0)), cond_dim_(cond_dim), schedule_(schedule),
        condition_aware_(condition_aware) {}
  int data_dim() const override { return static_cast<int>(x0_.size()); }
  int cond_dim() const override { return cond_dim_; }
  Mat predict(const Mat& x_t, std::span<const int> ts, const Mat& cond) const override {
    Mat out(x_t.rows(), x_t.cols());
    for (Eigen::Index b = 0; b < x_t.cols(); ++b) {
      const int t = ts[static_cast<std::size_t>(b)];
      if (condition_aware_ && cond.col(b).isZero(0.0)) {
        out.col(b).setZero();
        continue;
      }
      const double ab = schedule_.alpha_bar(t);
      out.col(b) = (x_t.col(b) - std::sqrt(ab) * x0_) / std::sqrt(1.0 - ab);
    }
    return out;
  }

 private:
  Vec x0_;
  int cond_dim_;
  const NoiseSchedule& schedule_;
  bool condition_aware_;
};

// Wraps a network but discards the condition, so outputs cannot depend on it.
class ConditionBlind final : public NoisePredictor {
 public:
  explicit ConditionBlind(const NoisePredictor& inner) : inner_(inner) {}
  int data_dim() const override { return inner_.data_dim(); }
  int cond_dim() const override { return inner_.cond_dim(); }
  Mat predict(const Mat& x_t, std::span<const int> ts, const Mat& cond) const override {
    return inner_.predict(x_t, ts, Mat::Zero(cond.rows(), cond.cols()));
  }

 private:
  const NoisePredictor& inner_;
};

// Contiguous copy of a label vector, viewable as std::span<const bool>.
class Labels {
 public:
  explicit Labels(const std::vector<bool>& labels)
      : size_(labels.size()), data_(std::make_unique<bool[]>(labels.size())) {
    std::copy(labels.begin(), labels.end(), data_.get());
  }
  operator std::span<const bool>() const { return {data_.get(), size_}; }

 private:
  std::size_t size_;
  std::unique_ptr<bool[]> data_;
};

inline double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace clid::testing

#endif  // CLID_TESTS_TEST_SUPPORT_HPP_
