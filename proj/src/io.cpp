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
#include "clid/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace clid {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw RuntimeFailure("cannot create directory " + path.parent_path().string() +
                           ": " + ec.message());
    }
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out << content;
    if (!out) throw RuntimeFailure("write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw RuntimeFailure("cannot move " + tmp.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const fs::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw RuntimeFailure("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec vec_from_json(const Json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json to_json(const GaussianMixtureWorld& world) {
  Json comps = Json::array();
  for (const auto& c : world.components) {
    comps.push_back({{"mean", to_json(c.mean)}, {"stddev", c.stddev}, {"canonical", c.canonical}});
  }
  return {{"dim", world.dim},
          {"vocabulary_size", world.vocabulary_size},
          {"seed", world.seed},
          {"components", comps}};
}

GaussianMixtureWorld world_from_json(const Json& j) {
  GaussianMixtureWorld w;
  w.dim = j.at("dim").get<int>();
  w.vocabulary_size = j.at("vocabulary_size").get<int>();
  w.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("components")) {
    MixtureComponent comp;
    comp.mean = vec_from_json(c.at("mean"));
    comp.stddev = c.at("stddev").get<double>();
    comp.canonical = c.at("canonical").get<TokenSequence>();
    w.components.push_back(std::move(comp));
  }
  return w;
}

std::string dataset_to_jsonl(const ToyDataset& dataset) {
  std::string out;
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const Json line{{"id", i}, {"x", to_json(dataset.points[i].x)}, {"c", dataset.points[i].c}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

ToyDataset dataset_from_jsonl(const std::string& text) {
  ToyDataset ds;
  std::istringstream in(text);
  std::string line;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    if (j.at("id").get<std::size_t>() != expected) {
      throw ValidationError("dataset: ids must be consecutive from 0");
    }
    ++expected;
    DataPoint p{vec_from_json(j.at("x")), j.at("c").get<TokenSequence>()};
    if (ds.points.empty()) ds.dim = static_cast<int>(p.x.size());
    if (p.x.size() != ds.dim) throw ValidationError("dataset: inconsistent dimension");
    ds.points.push_back(std::move(p));
  }
  return ds;
}

Json to_json(const SplitSpec& split) {
  return {{"seed", split.seed},
          {"member", split.member},
          {"holdout", split.holdout},
          {"aux_member", split.aux_member},
          {"aux_holdout", split.aux_holdout}};
}

SplitSpec split_from_json(const Json& j) {
  SplitSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.member = j.at("member").get<std::vector<std::size_t>>();
  s.holdout = j.at("holdout").get<std::vector<std::size_t>>();
  s.aux_member = j.at("aux_member").get<std::vector<std::size_t>>();
  s.aux_holdout = j.at("aux_holdout").get<std::vector<std::size_t>>();
  return s;
}

Json to_json(const ConditionEmbedder& embedder) {
  const Mat& t = embedder.table();
  Json cols = Json::array();
  for (Eigen::Index c = 0; c < t.cols(); ++c) cols.push_back(to_json(Vec(t.col(c))));
  return {{"vocabulary_size", t.cols()}, {"embedding_dim", t.rows()}, {"table", cols}};
}

ConditionEmbedder embedder_from_json(const Json& j) {
  const auto vocab = j.at("vocabulary_size").get<Eigen::Index>();
  const auto dim = j.at("embedding_dim").get<Eigen::Index>();
  const Json& cols = j.at("table");
  require(static_cast<Eigen::Index>(cols.size()) == vocab, "embedder: table width mismatch");
  Mat t(dim, vocab);
  for (Eigen::Index c = 0; c < vocab; ++c) {
    const Vec col = vec_from_json(cols[static_cast<std::size_t>(c)]);
    require(col.size() == dim, "embedder: table height mismatch");
    t.col(c) = col;
  }
  return ConditionEmbedder(std::move(t));
}

std::string indicators_to_jsonl(const ScoredSet& set, ModelRole role) {
  const bool shadow = role == ModelRole::kShadow;
  std::string out;
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    const auto& e = set.estimates[i];
    std::string label = set.labels[i] ? "member" : "holdout";
    if (shadow) label = "aux_" + label;
    const Json line{{"point_id", set.indices[i]},
                    {"split_label", label},
                    {"discrepancies", e.discrepancies},
                    {"elbo_proxy", e.elbo_proxy},
                    {"query_count", e.query_count},
                    {"seed", mix_seed(set.noise_seed, set.indices[i])}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

Json to_json(const RobustScalerParams& scaler) {
  return {{"center", scaler.center}, {"iqr", scaler.iqr}};
}

RobustScalerParams scaler_from_json(const Json& j) {
  RobustScalerParams s;
  s.center = j.at("center").get<double>();
  s.iqr = j.at("iqr").get<double>();
  require(s.iqr > 0.0, "scaler iqr must be > 0");
  return s;
}

Json to_json(const ThresholdAttackModel& model, ScalerCenter center) {
  return {{"kind", "clid_th"},
          {"alpha", model.alpha},
          {"tau", model.tau},
          {"inverted", model.inverted},
          {"scaler_center", to_string(center)},
          {"scaler_d", to_json(model.scaler_d)},
          {"scaler_l", to_json(model.scaler_l)},
          {"shadow_auc", model.shadow_auc},
          {"shadow_accuracy", model.shadow_accuracy}};
}

ThresholdAttackModel threshold_model_from_json(const Json& j) {
  require(j.at("kind") == "clid_th", "not a clid_th model");
  ThresholdAttackModel m;
  m.alpha = j.at("alpha").get<double>();
  m.tau = j.at("tau").get<double>();
  m.inverted = j.at("inverted").get<bool>();
  m.scaler_d = scaler_from_json(j.at("scaler_d"));
  m.scaler_l = scaler_from_json(j.at("scaler_l"));
  m.shadow_auc = j.at("shadow_auc").get<double>();
  m.shadow_accuracy = j.at("shadow_accuracy").get<double>();
  return m;
}

Json to_json(const VectorAttackModel& model) {
  Json trees = Json::array();
  for (const auto& tree : model.classifier.trees()) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"split", n.split},
                       {"left", n.left},
                       {"right", n.right},
                       {"leaf_weight", n.leaf_weight}});
    }
    trees.push_back(nodes);
  }
  return {{"kind", "clid_vec"},
          {"tau", model.tau},
          {"learning_rate", model.classifier.learning_rate()},
          {"initial_score", model.classifier.initial_score()},
          {"trees", trees}};
}

VectorAttackModel vector_model_from_json(const Json& j) {
  require(j.at("kind") == "clid_vec", "not a clid_vec model");
  std::vector<RegressionTree> trees;
  for (const auto& nodes : j.at("trees")) {
    RegressionTree tree;
    for (const auto& n : nodes) {
      TreeNode node;
      node.feature = n.at("feature").get<int>();
      node.split = n.at("split").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      node.leaf_weight = n.at("leaf_weight").get<double>();
      tree.nodes.push_back(node);
    }
    trees.push_back(std::move(tree));
  }
  VectorAttackModel m;
  m.classifier = BoostedTreeEnsemble(std::move(trees), j.at("learning_rate").get<double>(),
                                     j.at("initial_score").get<double>());
  m.tau = j.at("tau").get<double>();
  return m;
}

Json to_json(const MetricsReport& r) {
  return {{"attack_name", r.attack_name},
          {"asr", r.asr},
          {"auc", r.auc},
          {"tpr_at_1pct_fpr", r.tpr_at_1pct_fpr},
          {"n_member", r.n_member},
          {"n_holdout", r.n_holdout},
          {"queries_per_point", r.queries_per_point},
          {"tau", r.tau}};
}

MetricsReport metrics_report_from_json(const Json& j) {
  MetricsReport r;
  r.attack_name = j.at("attack_name").get<std::string>();
  r.asr = j.at("asr").get<double>();
  r.auc = j.at("auc").get<double>();
  r.tpr_at_1pct_fpr = j.at("tpr_at_1pct_fpr").get<double>();
  r.n_member = j.at("n_member").get<std::size_t>();
  r.n_holdout = j.at("n_holdout").get<std::size_t>();
  r.queries_per_point = j.at("queries_per_point").get<std::int64_t>();
  r.tau = j.at("tau").get<double>();
  return r;
}

Json to_json(const AssumptionReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    const AssumptionRow& full = report.row(1.0, r.metric);
    rows.push_back({{"level", r.level},
                    {"metric", to_string(r.metric)},
                    {"member", r.member_distance},
                    {"holdout", r.holdout_distance},
                    {"difference", r.difference()},
                    {"member_change_from_full", r.member_distance - full.member_distance},
                    {"holdout_change_from_full", r.holdout_distance - full.holdout_distance}});
  }
  return {{"rows", rows}};
}

Json to_json(const TimestepWindow& window) {
  return {{"timesteps", window.timesteps},
          {"fallback", window.fallback},
          {"candidates", window.candidates},
          {"candidate_auc", window.candidate_auc}};
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

}  // namespace

std::string roc_to_csv(const RocCurve& roc) {
  std::string out = "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) {
    out += format_double(roc.thresholds[i]) + "," + format_double(roc.fpr[i]) + "," +
           format_double(roc.tpr[i]) + "\n";
  }
  return out;
}

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& points) {
  std::string out = "step,attack,auc,asr,tpr_at_1pct_fpr\n";
  for (const auto& p : points) {
    for (const auto& r : p.reports) {
      out += std::to_string(p.step) + "," + r.attack_name + "," + format_double(r.auc) +
             "," + format_double(r.asr) + "," + format_double(r.tpr_at_1pct_fpr) + "\n";
    }
  }
  return out;
}

std::string assumption_to_csv(const AssumptionReport& report) {
  std::string out = "level,metric,member,holdout,difference\n";
  for (const auto& r : report.rows) {
    out += format_double(r.level) + "," + to_string(r.metric) + "," +
           format_double(r.member_distance) + "," + format_double(r.holdout_distance) +
           "," + format_double(r.difference()) + "\n";
  }
  return out;
}

}  // namespace clid
