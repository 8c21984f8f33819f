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
#ifndef CLID_CHECKPOINT_HPP_
#define CLID_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "clid/training.hpp"

namespace clid {

// Versioned little-endian binary container; layout in docs/FORMATS.md.
inline constexpr char kCheckpointMagic[9] = "CLIDCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const ModelCheckpoint& ckpt);
ModelCheckpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path,
                     const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace clid

#endif  // CLID_CHECKPOINT_HPP_
