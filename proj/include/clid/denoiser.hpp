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
#ifndef CLID_DENOISER_HPP_
#define CLID_DENOISER_HPP_

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "clid/common.hpp"

namespace clid {

// A conditional noise predictor eps(x_t, t, c). Every column of the batch
// is one model query.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;

  virtual int data_dim() const = 0;
  virtual int cond_dim() const = 0;

  // x_t: data_dim x B, timesteps: B entries, cond: cond_dim x B.
  virtual Mat predict(const Mat& x_t, std::span<const int> timesteps,
                      const Mat& cond) const = 0;
};

// Single-query convenience with shape checks.
Vec predict_eps(const NoisePredictor& model, const Vec& x_t, int t,
                const Vec& c_embed);

// Forwards to a wrapped predictor and counts queries (columns). Safe to
// share between threads.
class QueryCounter final : public NoisePredictor {
 public:
  explicit QueryCounter(const NoisePredictor& inner) : inner_(inner) {}

  int data_dim() const override { return inner_.data_dim(); }
  int cond_dim() const override { return inner_.cond_dim(); }
  Mat predict(const Mat& x_t, std::span<const int> timesteps,
              const Mat& cond) const override;

  std::int64_t count() const { return count_.load(); }
  void reset() { count_.store(0); }

 private:
  const NoisePredictor& inner_;
  mutable std::atomic<std::int64_t> count_{0};
};

// MLP noise predictor over [x_t, sinusoidal(t), embed(c)] with SiLU hidden
// layers and a linear output. Parameters are one flat array holding, per
// layer, the weight matrix (out x in, column-major) followed by the bias.
class DenoiserNet final : public NoisePredictor {
 public:
  static constexpr int kDefaultTimeDim = 16;

  DenoiserNet() = default;
  DenoiserNet(int data_dim, int cond_dim, std::vector<int> hidden_widths,
              int time_dim = kDefaultTimeDim);

  // Rebuild from serialized widths [in, hidden..., out] and parameters.
  static DenoiserNet from_parts(int data_dim, int cond_dim, int time_dim,
                                std::vector<int> layer_widths,
                                std::vector<double> parameters);

  int data_dim() const override { return data_dim_; }
  int cond_dim() const override { return cond_dim_; }
  int time_dim() const { return time_dim_; }
  const std::vector<int>& layer_widths() const { return widths_; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  // Gaussian fan-in initialization, zero biases.
  void init_random(std::uint64_t seed);
  void zero_output_layer();

  Mat predict(const Mat& x_t, std::span<const int> timesteps,
              const Mat& cond) const override;

  // Mean over the batch of ||eps_theta - eps||^2. When grad is non-null it
  // is resized to parameter_count() and receives the exact gradient.
  double loss_and_gradient(const Mat& x_t, std::span<const int> timesteps,
                           const Mat& cond, const Mat& eps,
                           std::vector<double>* grad) const;

  Vec timestep_encoding(int t) const;

 private:
  Mat assemble_input(const Mat& x_t, std::span<const int> timesteps,
                     const Mat& cond) const;
  std::size_t layer_offset(std::size_t layer) const;

  int data_dim_ = 0;
  int cond_dim_ = 0;
  int time_dim_ = kDefaultTimeDim;
  std::vector<int> widths_;
  // Aligned so vectorized kernels see the same layout in every copy.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
};

}  // namespace clid

#endif  // CLID_DENOISER_HPP_
