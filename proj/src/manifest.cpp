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
#include "clid/manifest.hpp"

namespace clid {

namespace fs = std::filesystem;

RunManifest::RunManifest(std::string config_hash, std::string tool_version,
                         std::uint64_t seed)
    : config_hash_(std::move(config_hash)), tool_version_(std::move(tool_version)), seed_(seed) {}

RunManifest RunManifest::open(const fs::path& run_dir, const std::string& config_hash,
                              std::uint64_t seed) {
  RunManifest fresh(config_hash, CLID_VERSION, seed);
  const fs::path path = run_dir / kFileName;
  if (!fs::exists(path)) return fresh;
  RunManifest existing = from_json(read_json_file(path));
  if (existing.config_hash_ != config_hash || existing.seed_ != seed) return fresh;
  return existing;
}

void RunManifest::verify_inputs(const fs::path& run_dir,
                                const std::vector<std::string>& paths) const {
  for (const auto& p : paths) {
    const ArtifactRecord* found = nullptr;
    for (const auto& [name, stage] : stages_) {
      for (const auto& out : stage.outputs) {
        if (out.path == p) found = &out;
      }
    }
    if (found == nullptr) {
      throw ValidationError("missing artifact " + p +
                            ": no recorded stage produced it for this config and seed");
    }
    if (!fs::exists(run_dir / p)) throw ValidationError("missing artifact " + p);
    if (sha256_file(run_dir / p) != found->sha256) {
      throw ValidationError("artifact " + p + " does not match its manifest hash");
    }
  }
}

void RunManifest::record_stage(const fs::path& run_dir, const std::string& stage,
                               const std::vector<std::string>& inputs,
                               const std::vector<std::string>& outputs) {
  StageRecord record;
  for (const auto& p : inputs) record.inputs.push_back({p, sha256_file(run_dir / p)});
  for (const auto& p : outputs) record.outputs.push_back({p, sha256_file(run_dir / p)});
  stages_[stage] = std::move(record);
}

std::vector<std::string> RunManifest::integrity_errors(const fs::path& run_dir) const {
  std::vector<std::string> errors;
  for (const auto& [name, stage] : stages_) {
    for (const auto& out : stage.outputs) {
      if (!fs::exists(run_dir / out.path)) {
        errors.push_back(name + ": missing " + out.path);
      } else if (sha256_file(run_dir / out.path) != out.sha256) {
        errors.push_back(name + ": hash mismatch for " + out.path);
      }
    }
  }
  return errors;
}

void RunManifest::save(const fs::path& run_dir) const {
  write_json_file(run_dir / kFileName, to_json());
}

namespace {

Json artifacts_json(const std::vector<ArtifactRecord>& list) {
  Json out = Json::array();
  for (const auto& a : list) out.push_back({{"path", a.path}, {"sha256", a.sha256}});
  return out;
}

std::vector<ArtifactRecord> artifacts_from(const Json& j) {
  std::vector<ArtifactRecord> out;
  for (const auto& a : j) {
    out.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

Json RunManifest::to_json() const {
  Json stages = Json::object();
  for (const auto& [name, stage] : stages_) {
    stages[name] = {{"inputs", artifacts_json(stage.inputs)},
                    {"outputs", artifacts_json(stage.outputs)}};
  }
  return {{"config_hash", config_hash_},
          {"tool_version", tool_version_},
          {"seed", seed_},
          {"stages", stages}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m(j.at("config_hash").get<std::string>(),
                j.at("tool_version").get<std::string>(), j.at("seed").get<std::uint64_t>());
  for (const auto& [name, stage] : j.at("stages").items()) {
    m.stages_[name] = {artifacts_from(stage.at("inputs")), artifacts_from(stage.at("outputs"))};
  }
  return m;
}

void record_timing(const fs::path& run_dir, const std::string& stage, double seconds) {
  const fs::path path = run_dir / RunManifest::kTimingsFileName;
  Json timings = fs::exists(path) ? read_json_file(path) : Json::object();
  timings[stage] = seconds;
  write_json_file(path, timings);
}

}  // namespace clid
