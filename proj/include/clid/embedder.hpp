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
#ifndef CLID_EMBEDDER_HPP_
#define CLID_EMBEDDER_HPP_

#include <cstdint>
#include <span>

#include "clid/common.hpp"

namespace clid {

// Frozen random token table standing in for a text encoder. A condition is
// embedded as the mean of its token rows; the pad row is zero and the empty
// (null) sequence maps to the zero vector.
class ConditionEmbedder {
 public:
  static constexpr int kPadToken = 0;

  ConditionEmbedder() = default;
  ConditionEmbedder(Mat table);

  static ConditionEmbedder random(int vocabulary_size, int embedding_dim,
                                  std::uint64_t seed);

  int vocabulary_size() const { return static_cast<int>(table_.cols()); }
  int embedding_dim() const { return static_cast<int>(table_.rows()); }
  int pad_token_id() const { return kPadToken; }

  // embedding_dim x vocabulary_size; column j is token j.
  const Mat& table() const { return table_; }

  Vec embed(std::span<const int> tokens) const;

 private:
  Mat table_;
};

}  // namespace clid

#endif  // CLID_EMBEDDER_HPP_
