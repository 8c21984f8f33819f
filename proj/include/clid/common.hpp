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
#ifndef CLID_COMMON_HPP_
#define CLID_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clid {

// Data vectors are columns; batches are d x B matrices.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using TokenSequence = std::vector<int>;

using Rng = std::mt19937_64;

// Invalid input or configuration. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure while running a valid request (divergence, NaN, I/O, broken
// internal accounting). The CLI maps this to exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; used to derive independent seeds from (seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named sub-streams so seeds for different pipeline stages never collide.
enum class SeedStream : std::uint64_t {
  kWorld = 1,
  kDataset = 2,
  kSplit = 3,
  kEmbedder = 4,
  kShadowInit = 5,
  kShadowTrain = 6,
  kTargetInit = 7,
  kTargetTrain = 8,
  kShadowNoise = 9,
  kTargetNoise = 10,
  kDefense = 11,
  kSampling = 12,
  kReduction = 13,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  return mix_seed(seed, static_cast<std::uint64_t>(stream) << 32);
}

inline Vec standard_normal(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace clid

#endif  // CLID_COMMON_HPP_
