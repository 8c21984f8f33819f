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
#ifndef CLID_DISTANCES_HPP_
#define CLID_DISTANCES_HPP_

#include <cstdint>
#include <string>

#include "clid/common.hpp"

namespace clid {

// Sample sets are data_dim x n matrices, one sample per column.

// Frechet distance between Gaussian fits:
//   ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2).
// Square roots come from symmetric eigendecompositions with negative
// eigenvalues clamped at zero; a singular covariance gets +1e-6 on the
// diagonal. Requires more samples than dimensions in each set.
double toy_fid(const Mat& samples_a, const Mat& samples_b);

// Mean exact 1-D Wasserstein-1 distance over random unit projections.
double sliced_wasserstein(const Mat& samples_a, const Mat& samples_b,
                          int n_projections = 64,
                          std::uint64_t seed = 0x51CEDULL);

// Biased MMD^2 with an RBF kernel; bandwidth = median pooled pairwise distance.
double kernel_mmd(const Mat& samples_a, const Mat& samples_b);

// Leave-one-out 1-nearest-neighbour two-sample accuracy; 0.5 means
// indistinguishable. Ties go to the lowest pooled index (set a first).
double one_nn_accuracy(const Mat& samples_a, const Mat& samples_b);

enum class DistanceKind { kToyFid, kSlicedWasserstein, kKernelMmd, kOneNn };

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& name);

double sample_distance(DistanceKind kind, const Mat& samples_a,
                       const Mat& samples_b);

}  // namespace clid

#endif  // CLID_DISTANCES_HPP_
