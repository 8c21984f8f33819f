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
#include "clid/denoiser.hpp"

#include <cmath>
#include <string>

namespace clid {
namespace {

constexpr double kMaxPeriod = 1000.0;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void silu_inplace(Mat& z) {
  z = z.unaryExpr([](double v) { return v * sigmoid(v); });
}

Mat silu_derivative(const Mat& z) {
  return z.unaryExpr([](double v) {
    const double s = sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

}  // namespace

Vec predict_eps(const NoisePredictor& model, const Vec& x_t, int t,
                const Vec& c_embed) {
  require(x_t.size() == model.data_dim(), "predict_eps: x_t dimension mismatch");
  require(c_embed.size() == model.cond_dim(),
          "predict_eps: condition dimension mismatch");
  const int ts[1] = {t};
  return model.predict(x_t, ts, c_embed).col(0);
}

Mat QueryCounter::predict(const Mat& x_t, std::span<const int> timesteps,
                          const Mat& cond) const {
  count_.fetch_add(x_t.cols());
  return inner_.predict(x_t, timesteps, cond);
}

DenoiserNet::DenoiserNet(int data_dim, int cond_dim,
                         std::vector<int> hidden_widths, int time_dim)
    : data_dim_(data_dim), cond_dim_(cond_dim), time_dim_(time_dim) {
  require(data_dim >= 1 && cond_dim >= 1, "denoiser dimensions must be >= 1");
  require(time_dim >= 2 && time_dim % 2 == 0, "time_dim must be even and >= 2");
  require(!hidden_widths.empty(), "denoiser needs at least one hidden layer");
  widths_.push_back(data_dim + time_dim + cond_dim);
  for (int w : hidden_widths) {
    require(w >= 1, "hidden widths must be >= 1");
    widths_.push_back(w);
  }
  widths_.push_back(data_dim);
  params_.assign(layer_offset(widths_.size() - 1), 0.0);
}

DenoiserNet DenoiserNet::from_parts(int data_dim, int cond_dim, int time_dim,
                                    std::vector<int> layer_widths,
                                    std::vector<double> parameters) {
  require(layer_widths.size() >= 3, "layer_widths needs input, hidden, output");
  require(layer_widths.front() == data_dim + time_dim + cond_dim &&
              layer_widths.back() == data_dim,
          "layer_widths inconsistent with data/time/cond dimensions");
  DenoiserNet net(data_dim, cond_dim,
                  std::vector<int>(layer_widths.begin() + 1,
                                   layer_widths.end() - 1),
                  time_dim);
  require(parameters.size() == net.params_.size(),
          "parameter array length does not match layer widths");
  net.params_.assign(parameters.begin(), parameters.end());
  return net;
}

std::size_t DenoiserNet::layer_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    offset += static_cast<std::size_t>(widths_[l + 1]) * (widths_[l] + 1);
  }
  return offset;
}

void DenoiserNet::init_random(std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int fan_in = widths_[l];
    const int fan_out = widths_[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    double* w = params_.data() + layer_offset(l);
    for (int i = 0; i < fan_in * fan_out; ++i) w[i] = scale * normal(rng);
    for (int i = 0; i < fan_out; ++i) w[fan_in * fan_out + i] = 0.0;
  }
}

void DenoiserNet::zero_output_layer() {
  const std::size_t begin = layer_offset(widths_.size() - 2);
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(begin),
            params_.end(), 0.0);
}

Vec DenoiserNet::timestep_encoding(int t) const {
  const int half = time_dim_ / 2;
  Vec enc(time_dim_);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(kMaxPeriod) * i / half);
    enc[i] = std::sin(t * freq);
    enc[half + i] = std::cos(t * freq);
  }
  return enc;
}

Mat DenoiserNet::assemble_input(const Mat& x_t, std::span<const int> timesteps,
                                const Mat& cond) const {
  const auto batch = x_t.cols();
  if (x_t.rows() != data_dim_ || cond.rows() != cond_dim_ ||
      cond.cols() != batch || static_cast<Eigen::Index>(timesteps.size()) != batch) {
    throw ValidationError("denoiser input shape mismatch: x_t " +
                          std::to_string(x_t.rows()) + "x" +
                          std::to_string(x_t.cols()) + ", cond " +
                          std::to_string(cond.rows()) + "x" +
                          std::to_string(cond.cols()));
  }
  Mat input(widths_.front(), batch);
  input.topRows(data_dim_) = x_t;
  for (Eigen::Index b = 0; b < batch; ++b) {
    input.col(b).segment(data_dim_, time_dim_) = timestep_encoding(timesteps[b]);
  }
  input.bottomRows(cond_dim_) = cond;
  return input;
}

Mat DenoiserNet::predict(const Mat& x_t, std::span<const int> timesteps,
                         const Mat& cond) const {
  Mat act = assemble_input(x_t, timesteps, cond);
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double* base = params_.data() + layer_offset(l);
    Eigen::Map<const Mat> w(base, out, in);
    Eigen::Map<const Vec> b(base + static_cast<std::ptrdiff_t>(out) * in, out);
    Mat z = w * act;
    z.colwise() += b;
    if (l + 1 < layers) silu_inplace(z);
    act = std::move(z);
  }
  return act;
}

double DenoiserNet::loss_and_gradient(const Mat& x_t,
                                      std::span<const int> timesteps,
                                      const Mat& cond, const Mat& eps,
                                      std::vector<double>* grad) const {
  require(eps.rows() == x_t.rows() && eps.cols() == x_t.cols(),
          "loss: eps shape mismatch");
  require(x_t.cols() >= 1, "loss: empty batch");
  const std::size_t layers = widths_.size() - 1;
  const double batch = static_cast<double>(x_t.cols());

  // Forward, keeping pre-activations for the backward pass.
  std::vector<Mat> inputs(layers);
  std::vector<Mat> pre(layers);
  Mat act = assemble_input(x_t, timesteps, cond);
  for (std::size_t l = 0; l < layers; ++l) {
    const double* base = params_.data() + layer_offset(l);
    Eigen::Map<const Mat> w(base, widths_[l + 1], widths_[l]);
    Eigen::Map<const Vec> b(
        base + static_cast<std::ptrdiff_t>(widths_[l + 1]) * widths_[l],
        widths_[l + 1]);
    inputs[l] = std::move(act);
    pre[l] = w * inputs[l];
    pre[l].colwise() += b;
    act = pre[l];
    if (l + 1 < layers) silu_inplace(act);
  }
  const Mat residual = act - eps;
  const double loss = residual.squaredNorm() / batch;
  if (grad == nullptr) return loss;

  std::vector<double, Eigen::aligned_allocator<double>> scratch(params_.size(), 0.0);
  Mat delta = (2.0 / batch) * residual;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    if (l + 1 < layers) delta = delta.cwiseProduct(silu_derivative(pre[l]));
    double* gbase = scratch.data() + layer_offset(l);
    Eigen::Map<Mat> gw(gbase, out, in);
    Eigen::Map<Vec> gb(gbase + static_cast<std::ptrdiff_t>(out) * in, out);
    gw.noalias() = delta * inputs[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const Mat> w(params_.data() + layer_offset(l), out, in);
      delta = w.transpose() * delta;
    }
  }
  grad->assign(scratch.begin(), scratch.end());
  return loss;
}

}  // namespace clid
