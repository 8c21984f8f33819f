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
#include "clid/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "clid/checkpoint.hpp"
#include "clid/plot.hpp"

namespace clid {

namespace fs = std::filesystem;

namespace paths {

std::string checkpoint_dir(ModelRole role) { return "checkpoints/" + to_string(role); }

std::string checkpoint_file(ModelRole role, std::int64_t step) {
  char name[40];
  std::snprintf(name, sizeof(name), "/step_%010lld.ckpt", static_cast<long long>(step));
  return checkpoint_dir(role) + name;
}

std::string loader_log(ModelRole role) { return checkpoint_dir(role) + "/loader_log.jsonl"; }

std::string indicators(ModelRole role) {
  return "attack/indicators_" + to_string(role) + ".jsonl";
}

std::string attack_model(const std::string& attack_name) {
  return "attack/models/" + attack_name + ".json";
}

std::string roc_csv(const std::string& attack_name) {
  return "reports/roc_" + attack_name + ".csv";
}

}  // namespace paths

namespace {

const std::vector<std::string> kWorldFiles{paths::kWorld, paths::kEmbedder, paths::kDataset,
                                           paths::kSplit};

class StageTimer {
 public:
  StageTimer(fs::path run_dir, std::string stage)
      : run_dir_(std::move(run_dir)), stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}

  void finish() const {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    record_timing(run_dir_, stage_, secs);
  }

 private:
  fs::path run_dir_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

std::ostream& out(const RunContext& ctx) {
  static std::ostringstream sink;
  return ctx.summary != nullptr ? *ctx.summary : sink;
}

RunManifest open_manifest(const RunContext& ctx) {
  return RunManifest::open(ctx.run_dir, config_hash(ctx.config), ctx.config.seed);
}

std::string stage_name(ModelRole role) { return "train_" + to_string(role); }

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

void print_reports(std::ostream& os, const std::vector<MetricsReport>& reports) {
  os << "  attack        auc     asr     tpr@1%fpr  queries\n";
  for (const auto& r : reports) {
    os << "  " << std::left << std::setw(12) << r.attack_name << std::right << "  "
       << fixed(r.auc) << "  " << fixed(r.asr) << "  " << fixed(r.tpr_at_1pct_fpr)
       << "     " << r.queries_per_point << "\n";
  }
}

std::vector<std::int64_t> segment_boundaries(std::int64_t start, std::int64_t total,
                                             std::int64_t every) {
  std::vector<std::int64_t> out;
  if (every > 0) {
    for (std::int64_t s = (start / every + 1) * every; s < total; s += every) out.push_back(s);
  }
  if (total > start) out.push_back(total);
  return out;
}

std::int64_t step_of(const std::string& path) {
  const auto pos = path.rfind("step_");
  return std::stoll(path.substr(pos + 5, 10));
}

// Drops loader-log lines past the resumed step; they belong to work that
// will be redone.
void trim_loader_log(const fs::path& file, std::int64_t keep_through) {
  if (!fs::exists(file)) return;
  std::istringstream in(read_text_file(file));
  std::string kept;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (Json::parse(line).at("step").get<std::int64_t>() <= keep_through) kept += line + "\n";
  }
  write_text_file(file, kept);
}

void train_one(const RunContext& ctx, const AuditWorld& world, ModelRole role,
               RunManifest& manifest) {
  const ExperimentConfig& cfg = ctx.config;
  const TrainingConfig tcfg = cfg.training_for(role);
  tcfg.validate();
  const fs::path dir = ctx.run_dir / paths::checkpoint_dir(role);
  const fs::path log_path = ctx.run_dir / paths::loader_log(role);

  std::vector<std::int64_t> existing;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("step_", 0) == 0 && entry.path().extension() == ".ckpt") {
        existing.push_back(step_of(name));
      }
    }
  }
  std::sort(existing.begin(), existing.end());

  ModelCheckpoint current;
  bool resumed = false;
  if (ctx.resume && !existing.empty()) {
    for (auto it = existing.rbegin(); it != existing.rend(); ++it) {
      if (*it > tcfg.total_steps) continue;
      ModelCheckpoint candidate = load_checkpoint(ctx.run_dir / paths::checkpoint_file(role, *it));
      if (candidate.seeds.world_seed == world.seed && candidate.seeds.train_seed == tcfg.rng_seed) {
        current = std::move(candidate);
        resumed = true;
        break;
      }
    }
  }
  if (!resumed) {
    fs::remove_all(dir);
    current = initial_model(world, cfg.model, role);
    current.seeds.train_seed = tcfg.rng_seed;
    save_checkpoint(ctx.run_dir / paths::checkpoint_file(role, 0), current);
    if (cfg.output.loader_log) write_text_file(log_path, "");
  } else {
    for (std::int64_t s : existing) {
      if (s > current.step) fs::remove(ctx.run_dir / paths::checkpoint_file(role, s));
    }
    if (cfg.output.loader_log) trim_loader_log(log_path, current.step);
  }
  const std::int64_t resumed_from = current.step;

  const auto& train_indices = world.training_indices(role);
  std::vector<double> recent_losses;
  for (const std::int64_t boundary :
       segment_boundaries(current.step, tcfg.total_steps, tcfg.checkpoint_every)) {
    TrainingConfig seg = tcfg;
    seg.total_steps = boundary;
    seg.checkpoint_every = 0;
    std::string log_lines;
    BatchObserver observer;
    if (cfg.output.loader_log) {
      observer = [&](std::int64_t step, std::span<const std::size_t> batch, double) {
        std::vector<std::size_t> global(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) global[i] = train_indices[batch[i]];
        log_lines += Json{{"step", step}, {"indices", global}}.dump() + "\n";
      };
    }
    TrainingRun run = train_role(world, current, seg, role, DefensePolicy{}, observer);
    current = std::move(run.checkpoints.back());
    current.seeds.train_seed = tcfg.rng_seed;
    recent_losses.insert(recent_losses.end(), run.losses.begin(), run.losses.end());
    if (recent_losses.size() > 100) {
      recent_losses.erase(recent_losses.begin(), recent_losses.end() - 100);
    }
    if (cfg.output.loader_log) {
      std::ofstream log(log_path, std::ios::app);
      log << log_lines;
      if (!log) throw RuntimeFailure("cannot append to " + log_path.string());
    }
    save_checkpoint(ctx.run_dir / paths::checkpoint_file(role, current.step), current);
  }

  std::vector<std::string> outputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".ckpt") {
      outputs.push_back(paths::checkpoint_dir(role) + "/" + entry.path().filename().string());
    }
  }
  std::sort(outputs.begin(), outputs.end());
  if (cfg.output.loader_log) outputs.push_back(paths::loader_log(role));
  manifest.record_stage(ctx.run_dir, stage_name(role), kWorldFiles, outputs);

  out(ctx) << "train " << to_string(role) << ": " << tcfg.total_steps << " steps on "
           << train_indices.size()
           << (role == ModelRole::kShadow ? " aux_member" : " member") << " points";
  if (resumed) out(ctx) << " (resumed at step " << resumed_from << ")";
  if (!recent_losses.empty()) {
    const double mean = std::accumulate(recent_losses.begin(), recent_losses.end(), 0.0) /
                        static_cast<double>(recent_losses.size());
    out(ctx) << ", recent loss " << fixed(mean);
  }
  out(ctx) << ", " << (outputs.size() - (cfg.output.loader_log ? 1 : 0)) << " checkpoints\n";
}

ModelCheckpoint load_final(const RunContext& ctx, const RunManifest& manifest, ModelRole role) {
  const auto list = checkpoint_paths(manifest, role);
  if (list.empty()) {
    throw ValidationError("no " + to_string(role) + " checkpoints; run 'train' first");
  }
  manifest.verify_inputs(ctx.run_dir, {list.back()});
  return load_checkpoint(ctx.run_dir / list.back());
}

AttackConfig attack_config(const RunContext& ctx) {
  AttackConfig a = ctx.config.attack;
  a.jobs = ctx.jobs;
  return a;
}

std::vector<NamedDefense> default_defenses() {
  std::vector<NamedDefense> out;
  out.push_back({"none", DefensePolicy{}, std::nullopt});
  AugmentationPolicy aug;
  aug.enabled = true;
  out.push_back({"augmentation", DefensePolicy{}, aug});
  return out;
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) {
  Json j = to_json(config);
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

AuditWorld load_world(const fs::path& run_dir, const RunManifest& manifest,
                      std::uint64_t seed) {
  manifest.verify_inputs(run_dir, kWorldFiles);
  AuditWorld w;
  w.seed = seed;
  w.world = world_from_json(read_json_file(run_dir / paths::kWorld));
  w.embedder = embedder_from_json(read_json_file(run_dir / paths::kEmbedder));
  w.dataset = dataset_from_jsonl(read_text_file(run_dir / paths::kDataset));
  w.split = split_from_json(read_json_file(run_dir / paths::kSplit));
  return w;
}

std::vector<std::string> checkpoint_paths(const RunManifest& manifest, ModelRole role) {
  std::vector<std::string> out;
  const auto it = manifest.stages().find(stage_name(role));
  if (it == manifest.stages().end()) return out;
  for (const auto& a : it->second.outputs) {
    if (a.path.size() > 5 && a.path.substr(a.path.size() - 5) == ".ckpt") out.push_back(a.path);
  }
  std::sort(out.begin(), out.end(),
            [](const std::string& a, const std::string& b) { return step_of(a) < step_of(b); });
  return out;
}

void cmd_world(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "world");
  const AuditWorld w = build_world(ctx.config.world, ctx.config.seed);
  write_json_file(ctx.run_dir / paths::kWorld, to_json(w.world));
  write_json_file(ctx.run_dir / paths::kEmbedder, to_json(w.embedder));
  write_text_file(ctx.run_dir / paths::kDataset, dataset_to_jsonl(w.dataset));
  write_json_file(ctx.run_dir / paths::kSplit, to_json(w.split));
  RunManifest manifest = open_manifest(ctx);
  manifest.record_stage(ctx.run_dir, "world", {}, kWorldFiles);
  manifest.save(ctx.run_dir);
  timer.finish();
  out(ctx) << "world: " << w.dataset.points.size() << " points, dim " << w.world.dim << ", "
           << w.world.components.size() << " components, seed " << ctx.config.seed << "\n"
           << "split: member " << w.split.member.size() << ", holdout " << w.split.holdout.size()
           << ", aux_member " << w.split.aux_member.size() << ", aux_holdout "
           << w.split.aux_holdout.size() << "\n";
}

void cmd_train(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "train");
  RunManifest manifest = open_manifest(ctx);
  const AuditWorld world = load_world(ctx.run_dir, manifest, ctx.config.seed);
  std::vector<ModelRole> roles{ModelRole::kShadow, ModelRole::kTarget};
  if (ctx.role) roles = {*ctx.role};
  for (const ModelRole role : roles) {
    train_one(ctx, world, role, manifest);
    manifest.save(ctx.run_dir);
  }
  timer.finish();
}

void cmd_attack(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "attack");
  RunManifest manifest = open_manifest(ctx);
  const AuditWorld world = load_world(ctx.run_dir, manifest, ctx.config.seed);
  const ModelCheckpoint shadow = load_final(ctx, manifest, ModelRole::kShadow);
  const ModelCheckpoint target = load_final(ctx, manifest, ModelRole::kTarget);
  const AttackConfig acfg = attack_config(ctx);
  const AttackOutcome o = run_attack(world, shadow, target, acfg, ctx.config.seed);

  std::vector<std::string> outputs{paths::kWindow, paths::indicators(ModelRole::kShadow),
                                   paths::indicators(ModelRole::kTarget)};
  write_json_file(ctx.run_dir / paths::kWindow, to_json(o.window));
  write_text_file(ctx.run_dir / paths::indicators(ModelRole::kShadow),
                  indicators_to_jsonl(o.shadow, ModelRole::kShadow));
  write_text_file(ctx.run_dir / paths::indicators(ModelRole::kTarget),
                  indicators_to_jsonl(o.target, ModelRole::kTarget));
  for (std::size_t i = 0; i < o.reports.size(); ++i) {
    const std::string& name = o.reports[i].attack_name;
    Json model;
    if (name == "clid_th") {
      model = to_json(o.threshold, acfg.scaler_center);
    } else if (name == "clid_vec") {
      model = to_json(o.vector);
    } else {
      model = {{"kind", name}, {"tau", o.reports[i].tau}};
    }
    write_json_file(ctx.run_dir / paths::attack_model(name), model);
    outputs.push_back(paths::attack_model(name));
    if (ctx.config.output.write_roc_csv) {
      const RocResult roc = compute_roc_auc(o.report_scores[i]);
      write_text_file(ctx.run_dir / paths::roc_csv(name), roc_to_csv(roc.curve));
      outputs.push_back(paths::roc_csv(name));
    }
  }
  Json reports = Json::array();
  for (const auto& r : o.reports) reports.push_back(to_json(r));
  Json extra = Json::array();
  for (const auto& r : o.extra_reports) extra.push_back(to_json(r));
  const auto n_shadow = static_cast<double>(std::max<std::size_t>(o.shadow.indices.size(), 1));
  const auto n_target = static_cast<double>(std::max<std::size_t>(o.target.indices.size(), 1));
  write_json_file(ctx.run_dir / paths::kMetrics,
                  {{"seed", ctx.config.seed},
                   {"shadow_step", shadow.step},
                   {"target_step", target.step},
                   {"window", o.plan_timesteps},
                   {"reports", reports},
                   {"informational", extra},
                   {"importance_queries_per_point",
                    {{"shadow", static_cast<double>(o.shadow.importance_queries) / n_shadow},
                     {"target", static_cast<double>(o.target.importance_queries) / n_target}}}});
  outputs.push_back(paths::kMetrics);

  std::vector<std::string> inputs = kWorldFiles;
  inputs.push_back(checkpoint_paths(manifest, ModelRole::kShadow).back());
  inputs.push_back(checkpoint_paths(manifest, ModelRole::kTarget).back());
  manifest.record_stage(ctx.run_dir, "attack", inputs, outputs);
  manifest.save(ctx.run_dir);
  timer.finish();

  out(ctx) << "attack: target step " << target.step << ", window";
  for (int t : o.plan_timesteps) out(ctx) << " " << t;
  out(ctx) << (o.window.fallback ? " (fallback)" : "") << ", " << o.target.indices.size()
           << " audited points\n";
  print_reports(out(ctx), o.reports);
}

void cmd_trajectory(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "trajectory");
  RunManifest manifest = open_manifest(ctx);
  const AuditWorld world = load_world(ctx.run_dir, manifest, ctx.config.seed);
  const auto shadow_paths = checkpoint_paths(manifest, ModelRole::kShadow);
  const auto target_paths = checkpoint_paths(manifest, ModelRole::kTarget);
  if (shadow_paths.empty() || target_paths.empty()) {
    throw ValidationError("trajectory needs shadow and target checkpoints; run 'train' first");
  }
  std::vector<ModelCheckpoint> shadow;
  std::vector<ModelCheckpoint> target;
  std::vector<std::string> inputs = kWorldFiles;
  for (const auto& p : target_paths) {
    const std::int64_t step = step_of(p);
    const auto match = std::find_if(shadow_paths.begin(), shadow_paths.end(),
                                    [&](const std::string& s) { return step_of(s) == step; });
    if (match == shadow_paths.end()) continue;
    manifest.verify_inputs(ctx.run_dir, {*match, p});
    shadow.push_back(load_checkpoint(ctx.run_dir / *match));
    target.push_back(load_checkpoint(ctx.run_dir / p));
    inputs.push_back(*match);
    inputs.push_back(p);
  }
  if (target.empty()) throw ValidationError("shadow and target checkpoints share no steps");
  const auto points = trajectory(world, shadow, target, attack_config(ctx), ctx.config.seed);

  Json rows = Json::array();
  for (const auto& p : points) {
    Json reports = Json::array();
    for (const auto& r : p.reports) reports.push_back(to_json(r));
    rows.push_back({{"step", p.step}, {"reports", reports}});
  }
  write_json_file(ctx.run_dir / paths::kTrajectoryJson, {{"points", rows}});
  write_text_file(ctx.run_dir / paths::kTrajectoryCsv, trajectory_to_csv(points));
  std::vector<std::string> outputs{paths::kTrajectoryJson, paths::kTrajectoryCsv};
  if (ctx.config.output.write_svg) {
    std::vector<PlotSeries> series;
    for (const auto& name : ctx.config.attack.attacks) {
      PlotSeries s{name, {}, {}};
      for (const auto& p : points) {
        for (const auto& r : p.reports) {
          if (r.attack_name == name) {
            s.x.push_back(static_cast<double>(p.step));
            s.y.push_back(r.auc);
          }
        }
      }
      series.push_back(std::move(s));
    }
    write_text_file(ctx.run_dir / paths::kTrajectorySvg,
                    line_chart_svg("Attack AUC over training", "training step", "AUC", series));
    outputs.push_back(paths::kTrajectorySvg);
  }
  manifest.record_stage(ctx.run_dir, "trajectory", inputs, outputs);
  manifest.save(ctx.run_dir);
  timer.finish();

  out(ctx) << "trajectory: " << points.size() << " checkpoints\n  step";
  for (const auto& name : ctx.config.attack.attacks) out(ctx) << "  " << name;
  out(ctx) << "\n";
  for (const auto& p : points) {
    out(ctx) << "  " << p.step;
    for (const auto& r : p.reports) out(ctx) << "  " << fixed(r.auc);
    out(ctx) << "\n";
  }
}

void cmd_validate_assumption(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "validate_assumption");
  RunManifest manifest = open_manifest(ctx);
  const AuditWorld world = load_world(ctx.run_dir, manifest, ctx.config.seed);
  const ModelCheckpoint target = load_final(ctx, manifest, ModelRole::kTarget);
  const auto& ev = ctx.config.evaluation;
  const AssumptionReport report =
      validate_assumption(target, world.dataset, world.split.member, world.split.holdout,
                          ev.truncation_levels, ev.metrics, ev.samples_per_condition,
                          ctx.config.seed);
  write_json_file(ctx.run_dir / paths::kAssumptionJson, to_json(report));
  write_text_file(ctx.run_dir / paths::kAssumptionCsv, assumption_to_csv(report));
  std::vector<std::string> inputs = kWorldFiles;
  inputs.push_back(checkpoint_paths(manifest, ModelRole::kTarget).back());
  manifest.record_stage(ctx.run_dir, "validate_assumption", inputs,
                        {paths::kAssumptionJson, paths::kAssumptionCsv});
  manifest.save(ctx.run_dir);
  timer.finish();

  out(ctx) << "validate-assumption: target step " << target.step << "\n"
           << "  level   metric              member     holdout    difference\n";
  for (const auto& r : report.rows) {
    out(ctx) << "  " << fixed(r.level, 3) << "   " << std::left << std::setw(18)
             << to_string(r.metric) << std::right << "  " << fixed(r.member_distance)
             << "  " << fixed(r.holdout_distance) << "  " << fixed(r.difference()) << "\n";
  }
}

std::vector<DefenseRun> run_defenses(const ExperimentConfig& config,
                                     const std::vector<NamedDefense>& policies, int jobs) {
  std::vector<NamedDefense> list = policies.empty() ? default_defenses() : policies;
  const bool has_baseline = std::any_of(list.begin(), list.end(), [](const NamedDefense& d) {
    return d.policy.kind == DefenseKind::kNone &&
           (!d.augmentation || !d.augmentation->enabled);
  });
  if (!has_baseline) list.insert(list.begin(), {"none", DefensePolicy{}, std::nullopt});

  const AuditWorld world = build_world(config.world, config.seed);
  AttackConfig acfg = config.attack;
  acfg.jobs = jobs;
  std::vector<DefenseRun> runs;
  for (const auto& d : list) {
    auto trained = [&](ModelRole role) {
      TrainingConfig tcfg = config.training_for(role);
      if (d.augmentation) tcfg.augmentation = *d.augmentation;
      tcfg.checkpoint_every = 0;
      const ModelCheckpoint start = initial_model(world, config.model, role);
      return std::move(train_role(world, start, tcfg, role, d.policy).checkpoints.back());
    };
    const ModelCheckpoint shadow = trained(ModelRole::kShadow);
    const ModelCheckpoint target = trained(ModelRole::kTarget);
    AttackOutcome o = run_attack(world, shadow, target, acfg, config.seed);
    runs.push_back({d.name, d.policy, d.augmentation, std::move(o.reports),
                    generation_utility_fid(target, world, config.seed)});
  }
  return runs;
}

void cmd_defense(const RunContext& ctx) {
  StageTimer timer(ctx.run_dir, "defense");
  const auto runs = run_defenses(ctx.config, ctx.config.defenses, ctx.jobs);
  const DefenseRun* baseline = nullptr;
  for (const auto& r : runs) {
    if (r.policy.kind == DefenseKind::kNone && (!r.augmentation || !r.augmentation->enabled)) {
      baseline = &r;
      break;
    }
  }
  Json entries = Json::array();
  std::string csv = "defense,attack,auc,asr,tpr_at_1pct_fpr,delta_auc,delta_asr,"
                    "delta_tpr_at_1pct_fpr,toy_fid,delta_toy_fid\n";
  for (const auto& r : runs) {
    Json reports = Json::array();
    for (std::size_t i = 0; i < r.reports.size(); ++i) {
      const MetricsReport& m = r.reports[i];
      const MetricsReport& b = baseline->reports[i];
      Json j = to_json(m);
      j["delta_auc"] = m.auc - b.auc;
      j["delta_asr"] = m.asr - b.asr;
      j["delta_tpr_at_1pct_fpr"] = m.tpr_at_1pct_fpr - b.tpr_at_1pct_fpr;
      reports.push_back(j);
      std::ostringstream row;
      row << std::setprecision(17) << r.name << "," << m.attack_name << "," << m.auc << ","
          << m.asr << "," << m.tpr_at_1pct_fpr << "," << m.auc - b.auc << ","
          << m.asr - b.asr << "," << m.tpr_at_1pct_fpr - b.tpr_at_1pct_fpr << ","
          << r.utility_fid << "," << r.utility_fid - baseline->utility_fid << "\n";
      csv += row.str();
    }
    Json entry{{"name", r.name},
               {"kind", to_string(r.policy.kind)},
               {"delete_fraction", r.policy.delete_fraction},
               {"shuffle_fraction", r.policy.shuffle_fraction},
               {"augmentation", r.augmentation.has_value() && r.augmentation->enabled},
               {"toy_fid", r.utility_fid},
               {"delta_toy_fid", r.utility_fid - baseline->utility_fid},
               {"reports", reports}};
    entries.push_back(entry);
  }
  write_json_file(ctx.run_dir / paths::kDefenseJson,
                  {{"seed", ctx.config.seed}, {"baseline", baseline->name}, {"runs", entries}});
  write_text_file(ctx.run_dir / paths::kDefenseCsv, csv);
  RunManifest manifest = open_manifest(ctx);
  manifest.record_stage(ctx.run_dir, "defense", {}, {paths::kDefenseJson, paths::kDefenseCsv});
  manifest.save(ctx.run_dir);
  timer.finish();

  out(ctx) << "defense: baseline '" << baseline->name << "', seed " << ctx.config.seed << "\n";
  for (const auto& r : runs) {
    out(ctx) << "  " << r.name << ": toy_fid " << fixed(r.utility_fid) << " (delta "
             << fixed(r.utility_fid - baseline->utility_fid) << ")\n";
    for (std::size_t i = 0; i < r.reports.size(); ++i) {
      out(ctx) << "    " << std::left << std::setw(12) << r.reports[i].attack_name << std::right
               << " auc " << fixed(r.reports[i].auc) << " (delta "
               << fixed(r.reports[i].auc - baseline->reports[i].auc) << ")\n";
    }
  }
}

void run_pipeline(const RunContext& ctx) {
  cmd_world(ctx);
  RunContext train_ctx = ctx;
  train_ctx.role.reset();
  cmd_train(train_ctx);
  cmd_attack(ctx);
}

}  // namespace clid
