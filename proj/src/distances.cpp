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
#include "clid/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace clid {
namespace {

constexpr double kSingularRegularizer = 1e-6;

Mat sample_covariance(const Mat& samples, const Vec& mean) {
  const Mat centered = samples.colwise() - mean;
  return centered * centered.transpose() /
         static_cast<double>(samples.cols() - 1);
}

Mat symmetric_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  const Vec roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

void regularize_if_singular(Mat& cov) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-12) {
    cov.diagonal().array() += kSingularRegularizer;
  }
}

void require_same_dim(const Mat& a, const Mat& b) {
  require(a.cols() > 0 && b.cols() > 0, "distance: empty sample set");
  require(a.rows() == b.rows(), "distance: sample dimensions differ");
}

// Exact W1 between empirical 1-D distributions: integral of |F_a - F_b|.
double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    const double next = j >= b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) *
             (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
    prev = next;
  }
  return total;
}

Mat pooled(const Mat& a, const Mat& b) {
  Mat all(a.rows(), a.cols() + b.cols());
  all << a, b;
  return all;
}

Mat pairwise_squared_distances(const Mat& pts) {
  const Vec norms = pts.colwise().squaredNorm().transpose();
  Mat d = (-2.0 * pts.transpose() * pts).colwise() + norms;
  d.rowwise() += norms.transpose();
  return d.cwiseMax(0.0);
}

}  // namespace

double toy_fid(const Mat& samples_a, const Mat& samples_b) {
  require_same_dim(samples_a, samples_b);
  const auto dim = samples_a.rows();
  if (samples_a.cols() <= dim || samples_b.cols() <= dim) {
    throw ValidationError("toy_fid needs more samples than dimensions (" +
                          std::to_string(dim) + ")");
  }
  const Vec mu_a = samples_a.rowwise().mean();
  const Vec mu_b = samples_b.rowwise().mean();
  Mat cov_a = sample_covariance(samples_a, mu_a);
  Mat cov_b = sample_covariance(samples_b, mu_b);
  regularize_if_singular(cov_a);
  regularize_if_singular(cov_b);

  const Mat root_a = symmetric_sqrt(cov_a);
  Mat inner = root_a * cov_b * root_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(inner, Eigen::EigenvaluesOnly);
  const double trace_root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double fid = (mu_a - mu_b).squaredNorm() + cov_a.trace() +
                     cov_b.trace() - 2.0 * trace_root;
  return std::max(fid, 0.0);
}

double sliced_wasserstein(const Mat& samples_a, const Mat& samples_b,
                          int n_projections, std::uint64_t seed) {
  require_same_dim(samples_a, samples_b);
  require(n_projections >= 1, "sliced_wasserstein: need >= 1 projection");
  Rng rng(seed);
  const int dim = static_cast<int>(samples_a.rows());
  double total = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    Vec dir = standard_normal(dim, rng);
    while (dir.norm() == 0.0) dir = standard_normal(dim, rng);
    dir.normalize();
    const Vec pa = samples_a.transpose() * dir;
    const Vec pb = samples_b.transpose() * dir;
    total += wasserstein_1d({pa.data(), pa.data() + pa.size()},
                            {pb.data(), pb.data() + pb.size()});
  }
  return total / n_projections;
}

double kernel_mmd(const Mat& samples_a, const Mat& samples_b) {
  require_same_dim(samples_a, samples_b);
  const Mat d2 = pairwise_squared_distances(pooled(samples_a, samples_b));
  const auto n = d2.rows();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) dists.push_back(std::sqrt(d2(i, j)));
  }
  double bandwidth = 1.0;
  if (!dists.empty()) {
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    if (*mid > 0.0) bandwidth = *mid;
  }
  const Mat k = (-d2 / (2.0 * bandwidth * bandwidth)).array().exp().matrix();
  const auto na = samples_a.cols();
  const auto nb = samples_b.cols();
  const double kaa = k.topLeftCorner(na, na).mean();
  const double kbb = k.bottomRightCorner(nb, nb).mean();
  const double kab = k.topRightCorner(na, nb).mean();
  return std::max(kaa + kbb - 2.0 * kab, 0.0);
}

double one_nn_accuracy(const Mat& samples_a, const Mat& samples_b) {
  require_same_dim(samples_a, samples_b);
  const Mat d2 = pairwise_squared_distances(pooled(samples_a, samples_b));
  const auto n = d2.rows();
  const auto na = samples_a.cols();
  require(n >= 2, "one_nn_accuracy: need at least two samples");
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && d2(j, i) < best_d) {
        best_d = d2(j, i);
        best = j;
      }
    }
    correct += (best < na) == (i < na) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kToyFid: return "toy_fid";
    case DistanceKind::kSlicedWasserstein: return "sliced_wasserstein";
    case DistanceKind::kKernelMmd: return "kernel_mmd";
    case DistanceKind::kOneNn: return "one_nn";
  }
  return "toy_fid";
}

DistanceKind distance_kind_from_string(const std::string& name) {
  if (name == "toy_fid") return DistanceKind::kToyFid;
  if (name == "sliced_wasserstein") return DistanceKind::kSlicedWasserstein;
  if (name == "kernel_mmd") return DistanceKind::kKernelMmd;
  if (name == "one_nn") return DistanceKind::kOneNn;
  throw ValidationError("unknown distance metric '" + name + "'");
}

double sample_distance(DistanceKind kind, const Mat& samples_a,
                       const Mat& samples_b) {
  switch (kind) {
    case DistanceKind::kToyFid: return toy_fid(samples_a, samples_b);
    case DistanceKind::kSlicedWasserstein:
      return sliced_wasserstein(samples_a, samples_b);
    case DistanceKind::kKernelMmd: return kernel_mmd(samples_a, samples_b);
    case DistanceKind::kOneNn: return one_nn_accuracy(samples_a, samples_b);
  }
  return 0.0;
}

}  // namespace clid
