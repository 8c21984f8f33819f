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
#include "clid/config.hpp"

#include <cmath>
#include <sstream>

namespace clid {

namespace {

const Json& resolve_ref(const Json& node, const Json& root) {
  if (!node.contains("$ref")) return node;
  const std::string ref = node.at("$ref").get<std::string>();
  const std::string prefix = "#/$defs/";
  if (ref.rfind(prefix, 0) != 0) throw ValidationError("unsupported schema ref " + ref);
  return root.at("$defs").at(ref.substr(prefix.size()));
}

bool type_matches(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  return false;
}

void check(const Json& value, const Json& node, const Json& root, const std::string& path,
           std::vector<std::string>& errors) {
  const Json& schema = resolve_ref(node, root);
  const std::string where = path.empty() ? "<root>" : path;
  if (schema.contains("type") && !type_matches(value, schema["type"].get<std::string>())) {
    errors.push_back(where + ": expected " + schema["type"].get<std::string>());
    return;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& option : schema["enum"]) found = found || option == value;
    if (!found) errors.push_back(where + ": " + value.dump() + " is not one of " + schema["enum"].dump());
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>()) {
      errors.push_back(where + ": must be >= " + schema["minimum"].dump());
    }
    if (schema.contains("maximum") && v > schema["maximum"].get<double>()) {
      errors.push_back(where + ": must be <= " + schema["maximum"].dump());
    }
    if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>()) {
      errors.push_back(where + ": must be > " + schema["exclusiveMinimum"].dump());
    }
    if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>()) {
      errors.push_back(where + ": must be < " + schema["exclusiveMaximum"].dump());
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      errors.push_back(where + ": needs at least " + schema["minItems"].dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check(value[i], schema["items"], root, path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
  if (value.is_object()) {
    const Json empty = Json::object();
    const Json& props = schema.contains("properties") ? schema["properties"] : empty;
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(where + ": missing required key '" + key.get<std::string>() + "'");
        }
      }
    }
    for (const auto& [key, child] : value.items()) {
      const std::string child_path = path.empty() ? key : path + "." + key;
      if (props.contains(key)) {
        check(child, props[key], root, child_path, errors);
      } else if (schema.value("additionalProperties", true) == false) {
        errors.push_back(child_path + ": unknown key");
      }
    }
  }
}

template <typename T>
void read(const Json& section, const char* key, T& target) {
  if (section.contains(key)) target = section[key].get<T>();
}

AugmentationPolicy parse_augmentation(const Json& j) {
  AugmentationPolicy a;
  read(j, "enabled", a.enabled);
  read(j, "flip_prob", a.flip_prob);
  read(j, "crop_mask_fraction", a.crop_mask_fraction);
  read(j, "jitter_stddev", a.jitter_stddev);
  return a;
}

Json augmentation_json(const AugmentationPolicy& a) {
  return {{"enabled", a.enabled},
          {"flip_prob", a.flip_prob},
          {"crop_mask_fraction", a.crop_mask_fraction},
          {"jitter_stddev", a.jitter_stddev}};
}

}  // namespace

std::vector<std::string> schema_errors(const Json& value, const Json& schema) {
  std::vector<std::string> errors;
  check(value, schema, schema, "", errors);
  return errors;
}

void ExperimentConfig::validate() const {
  const auto total = static_cast<std::size_t>(world.n_components) *
                     static_cast<std::size_t>(world.per_component);
  const std::size_t requested =
      world.member_n + world.holdout_n + world.aux_member_n + world.aux_holdout_n;
  if (requested > total) {
    throw ValidationError("schema error: split sizes sum to " + std::to_string(requested) +
                          " but the dataset has " + std::to_string(total) + " points");
  }
  if (world.vocabulary_size / 2 - (world.n_components + 1) < 1) {
    throw ValidationError("schema error: world.vocabulary_size " +
                          std::to_string(world.vocabulary_size) + " too small for " +
                          std::to_string(world.n_components) + " components");
  }
  if (!(model.beta_start < model.beta_end)) {
    throw ValidationError("schema error: model.beta_start must be < model.beta_end");
  }
  if (attack.share_noise && attack.m_draws != attack.n_draws) {
    throw ValidationError("schema error: shared noise requires plan.m_draws == plan.n_draws");
  }
  for (const auto* list : {&attack.candidate_timesteps, &attack.fixed_window}) {
    for (int t : *list) {
      if (t > model.total_steps) {
        throw ValidationError("schema error: timestep " + std::to_string(t) +
                              " exceeds model.total_steps");
      }
    }
  }
  bool has_full = false;
  bool has_null = false;
  for (double l : evaluation.truncation_levels) {
    has_full = has_full || l == 1.0;
    has_null = has_null || l == 0.0;
  }
  if (!has_full || !has_null) {
    throw ValidationError("schema error: evaluation.truncation_levels must include 1 and 0");
  }
  for (const auto& d : defenses) d.policy.validate();
  training_for(ModelRole::kShadow).validate();
}

TrainingConfig ExperimentConfig::training_for(ModelRole role) const {
  TrainingConfig cfg = role_training_config(training, seed, role);
  if (step_ratio) {
    const std::size_t n = role == ModelRole::kShadow ? world.aux_member_n : world.member_n;
    cfg.total_steps = std::llround(*step_ratio * static_cast<double>(n));
  }
  return cfg;
}

ExperimentConfig parse_config(const Json& value) {
  const Json schema = Json::parse(config_schema_text());
  const auto errors = schema_errors(value, schema);
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "schema error: config has " << errors.size() << " problem(s)";
    for (const auto& e : errors) msg << "\n  " << e;
    throw ValidationError(msg.str());
  }
  ExperimentConfig c;
  const Json empty = Json::object();
  auto section = [&](const char* key) -> const Json& {
    return value.contains(key) ? value[key] : empty;
  };
  read(value, "seed", c.seed);
  read(value, "output_dir", c.output_dir);

  const Json& w = section("world");
  read(w, "n_components", c.world.n_components);
  read(w, "dim", c.world.dim);
  read(w, "stddev", c.world.stddev);
  read(w, "per_component", c.world.per_component);
  read(w, "vocabulary_size", c.world.vocabulary_size);
  read(w, "embedding_dim", c.world.embedding_dim);
  read(w, "member_n", c.world.member_n);
  read(w, "holdout_n", c.world.holdout_n);
  read(w, "aux_member_n", c.world.aux_member_n);
  read(w, "aux_holdout_n", c.world.aux_holdout_n);

  const Json& m = section("model");
  read(m, "hidden_widths", c.model.hidden_widths);
  read(m, "time_dim", c.model.time_dim);
  read(m, "total_steps", c.model.total_steps);
  read(m, "beta_start", c.model.beta_start);
  read(m, "beta_end", c.model.beta_end);
  if (m.contains("sigma_mode")) c.model.sigma_mode = sigma_mode_from_string(m["sigma_mode"]);

  const Json& t = section("training");
  read(t, "learning_rate", c.training.learning_rate);
  read(t, "batch_size", c.training.batch_size);
  read(t, "total_steps", c.training.total_steps);
  read(t, "checkpoint_every", c.training.checkpoint_every);
  read(t, "condition_dropout", c.training.condition_dropout);
  if (t.contains("step_ratio")) c.step_ratio = t["step_ratio"].get<double>();
  if (t.contains("step_ratio") && t.contains("total_steps")) {
    throw ValidationError("schema error: training.step_ratio and training.total_steps are exclusive");
  }
  if (t.contains("augmentation")) c.training.augmentation = parse_augmentation(t["augmentation"]);

  const Json& r = section("reduction");
  if (r.contains("strategy")) {
    c.attack.reduction.strategy = reduction_strategy_from_string(r["strategy"]);
  }
  read(r, "proportions", c.attack.reduction.proportions);
  read(r, "scales", c.attack.reduction.scales);

  const Json& p = section("plan");
  read(p, "m_draws", c.attack.m_draws);
  read(p, "n_draws", c.attack.n_draws);
  read(p, "share_noise", c.attack.share_noise);
  read(p, "candidate_timesteps", c.attack.candidate_timesteps);
  read(p, "window_width", c.attack.window_width);
  read(p, "fixed_window", c.attack.fixed_window);

  const Json& a = section("attacks");
  read(a, "names", c.attack.attacks);
  if (a.contains("scaler_center")) {
    c.attack.scaler_center = scaler_center_from_string(a["scaler_center"]);
  }
  read(a, "pseudo_caption", c.attack.pseudo_caption);
  if (a.contains("boosting")) {
    const Json& b = a["boosting"];
    read(b, "n_trees", c.attack.boosting.n_trees);
    read(b, "max_depth", c.attack.boosting.max_depth);
    read(b, "learning_rate", c.attack.boosting.learning_rate);
    read(b, "min_leaf", c.attack.boosting.min_leaf);
    read(b, "l2", c.attack.boosting.l2);
  }

  const Json& e = section("evaluation");
  read(e, "truncation_levels", c.evaluation.truncation_levels);
  if (e.contains("metrics")) {
    c.evaluation.metrics.clear();
    for (const auto& name : e["metrics"]) {
      c.evaluation.metrics.push_back(distance_kind_from_string(name));
    }
  }
  read(e, "samples_per_condition", c.evaluation.samples_per_condition);

  const Json& d = section("defense");
  if (d.contains("policies")) {
    for (const auto& pj : d["policies"]) {
      NamedDefense nd;
      nd.name = pj.at("name").get<std::string>();
      nd.policy.kind = defense_kind_from_string(pj.at("kind"));
      read(pj, "delete_fraction", nd.policy.delete_fraction);
      read(pj, "shuffle_fraction", nd.policy.shuffle_fraction);
      if (nd.policy.kind == DefenseKind::kRephrase) {
        nd.policy.synonym_map = default_synonym_map(c.world.vocabulary_size);
      }
      if (pj.contains("augmentation")) nd.augmentation = parse_augmentation(pj["augmentation"]);
      c.defenses.push_back(std::move(nd));
    }
  }

  const Json& o = section("output");
  read(o, "write_svg", c.output.write_svg);
  read(o, "write_roc_csv", c.output.write_roc_csv);
  read(o, "loader_log", c.output.loader_log);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path));
}

Json to_json(const ExperimentConfig& c) {
  Json training{{"learning_rate", c.training.learning_rate},
                {"batch_size", c.training.batch_size},
                {"checkpoint_every", c.training.checkpoint_every},
                {"condition_dropout", c.training.condition_dropout},
                {"augmentation", augmentation_json(c.training.augmentation)}};
  if (c.step_ratio) {
    training["step_ratio"] = *c.step_ratio;
  } else {
    training["total_steps"] = c.training.total_steps;
  }
  std::vector<std::string> metrics;
  for (auto k : c.evaluation.metrics) metrics.push_back(to_string(k));
  Json policies = Json::array();
  for (const auto& d : c.defenses) {
    Json pj{{"name", d.name},
            {"kind", to_string(d.policy.kind)},
            {"delete_fraction", d.policy.delete_fraction},
            {"shuffle_fraction", d.policy.shuffle_fraction}};
    if (d.augmentation) pj["augmentation"] = augmentation_json(*d.augmentation);
    policies.push_back(pj);
  }
  return {
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"world",
       {{"n_components", c.world.n_components},
        {"dim", c.world.dim},
        {"stddev", c.world.stddev},
        {"per_component", c.world.per_component},
        {"vocabulary_size", c.world.vocabulary_size},
        {"embedding_dim", c.world.embedding_dim},
        {"member_n", c.world.member_n},
        {"holdout_n", c.world.holdout_n},
        {"aux_member_n", c.world.aux_member_n},
        {"aux_holdout_n", c.world.aux_holdout_n}}},
      {"model",
       {{"hidden_widths", c.model.hidden_widths},
        {"time_dim", c.model.time_dim},
        {"total_steps", c.model.total_steps},
        {"beta_start", c.model.beta_start},
        {"beta_end", c.model.beta_end},
        {"sigma_mode", to_string(c.model.sigma_mode)}}},
      {"training", training},
      {"reduction",
       {{"strategy", to_string(c.attack.reduction.strategy)},
        {"proportions", c.attack.reduction.proportions},
        {"scales", c.attack.reduction.scales}}},
      {"plan",
       {{"m_draws", c.attack.m_draws},
        {"n_draws", c.attack.n_draws},
        {"share_noise", c.attack.share_noise},
        {"candidate_timesteps", c.attack.candidate_timesteps},
        {"window_width", c.attack.window_width},
        {"fixed_window", c.attack.fixed_window}}},
      {"attacks",
       {{"names", c.attack.attacks},
        {"scaler_center", to_string(c.attack.scaler_center)},
        {"pseudo_caption", c.attack.pseudo_caption},
        {"boosting",
         {{"n_trees", c.attack.boosting.n_trees},
          {"max_depth", c.attack.boosting.max_depth},
          {"learning_rate", c.attack.boosting.learning_rate},
          {"min_leaf", c.attack.boosting.min_leaf},
          {"l2", c.attack.boosting.l2}}}}},
      {"evaluation",
       {{"truncation_levels", c.evaluation.truncation_levels},
        {"metrics", metrics},
        {"samples_per_condition", c.evaluation.samples_per_condition}}},
      {"defense", {{"policies", policies}}},
      {"output",
       {{"write_svg", c.output.write_svg},
        {"write_roc_csv", c.output.write_roc_csv},
        {"loader_log", c.output.loader_log}}}};
}

}  // namespace clid
