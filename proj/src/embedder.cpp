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
#include "clid/embedder.hpp"

#include <string>

namespace clid {

ConditionEmbedder::ConditionEmbedder(Mat table) : table_(std::move(table)) {
  require(table_.cols() >= 1 && table_.rows() >= 1,
          "embedder table must be non-empty");
  require(table_.col(kPadToken).isZero(0.0), "pad token row must be zero");
}

ConditionEmbedder ConditionEmbedder::random(int vocabulary_size,
                                            int embedding_dim,
                                            std::uint64_t seed) {
  require(vocabulary_size >= 2, "vocabulary_size must be >= 2");
  require(embedding_dim >= 1, "embedding_dim must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat table(embedding_dim, vocabulary_size);
  for (int j = 0; j < vocabulary_size; ++j) {
    for (int i = 0; i < embedding_dim; ++i) {
      table(i, j) = j == kPadToken ? 0.0 : normal(rng);
    }
  }
  return ConditionEmbedder(std::move(table));
}

Vec ConditionEmbedder::embed(std::span<const int> tokens) const {
  Vec out = Vec::Zero(embedding_dim());
  if (tokens.empty()) return out;
  for (int token : tokens) {
    if (token < 0 || token >= vocabulary_size()) {
      throw ValidationError("token id " + std::to_string(token) +
                            " outside vocabulary");
    }
    out += table_.col(token);
  }
  return out / static_cast<double>(tokens.size());
}

}  // namespace clid
