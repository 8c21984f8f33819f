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
#ifndef CLID_MANIFEST_HPP_
#define CLID_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clid/io.hpp"

namespace clid {

struct ArtifactRecord {
  std::string path;  // relative to the run directory, '/' separated
  std::string sha256;
};

struct StageRecord {
  std::vector<ArtifactRecord> inputs;
  std::vector<ArtifactRecord> outputs;
};

// Content-addressed record of a run directory. Wall-clock timings are kept
// in a separate timings.json so the manifest is reproducible.
class RunManifest {
 public:
  static constexpr const char* kFileName = "manifest.json";
  static constexpr const char* kTimingsFileName = "timings.json";

  RunManifest() = default;
  RunManifest(std::string config_hash, std::string tool_version, std::uint64_t seed);

  // Loads the directory's manifest. A missing manifest, or one written for a
  // different config or seed, yields a fresh manifest.
  static RunManifest open(const std::filesystem::path& run_dir,
                          const std::string& config_hash, std::uint64_t seed);

  // Throws ValidationError unless every path exists, was produced by a
  // recorded stage, and still matches its recorded hash.
  void verify_inputs(const std::filesystem::path& run_dir,
                     const std::vector<std::string>& paths) const;

  // Replaces the stage entry, hashing the given files as they are now.
  void record_stage(const std::filesystem::path& run_dir, const std::string& stage,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

  // Checks every recorded output against the files on disk.
  std::vector<std::string> integrity_errors(const std::filesystem::path& run_dir) const;

  void save(const std::filesystem::path& run_dir) const;

  const std::map<std::string, StageRecord>& stages() const { return stages_; }
  const std::string& config_hash() const { return config_hash_; }

  Json to_json() const;
  static RunManifest from_json(const Json& j);

 private:
  std::string config_hash_;
  std::string tool_version_;
  std::uint64_t seed_ = 0;
  std::map<std::string, StageRecord> stages_;
};

// Adds or replaces one stage's wall-clock seconds in timings.json.
void record_timing(const std::filesystem::path& run_dir, const std::string& stage,
                   double seconds);

}  // namespace clid

#endif  // CLID_MANIFEST_HPP_
