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
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "clid/config.hpp"
#include "clid/harness.hpp"
#include "clid/io.hpp"
#include "clid/metrics.hpp"
#include "clid/schedule.hpp"
#include "clid/theorem.hpp"

namespace py = pybind11;

namespace {

std::vector<clid::LabeledScore> labeled(const std::vector<double>& scores,
                                        const std::vector<bool>& members) {
  if (scores.size() != members.size()) {
    throw py::value_error("scores and members must have the same length");
  }
  std::vector<clid::LabeledScore> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i, scores[i], members[i]});
  return out;
}

clid::DiscreteJointDistribution joint(const std::vector<std::vector<double>>& rows) {
  clid::DiscreteJointDistribution d;
  d.n_x = static_cast<int>(rows.size());
  d.n_c = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != d.n_c) throw py::value_error("ragged distribution table");
    d.mass.insert(d.mass.end(), row.begin(), row.end());
  }
  d.validate();
  return d;
}

py::dict roc_auc(const std::vector<double>& scores, const std::vector<bool>& members) {
  const auto s = labeled(scores, members);
  const clid::RocResult r = clid::compute_roc_auc(s);
  py::dict out;
  out["auc"] = r.auc;
  out["fpr"] = r.curve.fpr;
  out["tpr"] = r.curve.tpr;
  out["thresholds"] = r.curve.thresholds;
  out["tpr_at_1pct_fpr"] = clid::tpr_at_fpr(r.curve, 0.01);
  return out;
}

double tpr_at_fpr(const std::vector<double>& scores, const std::vector<bool>& members,
                  double target_fpr) {
  const auto s = labeled(scores, members);
  return clid::tpr_at_fpr(clid::compute_roc_auc(s).curve, target_fpr);
}

py::dict theorem_check(const std::vector<std::vector<double>>& q_mem,
                       const std::vector<std::vector<double>>& q_out,
                       const std::vector<std::vector<double>>& p) {
  const clid::TheoremCheck c = clid::verify_theorem_equivalence(joint(q_mem), joint(q_out), joint(p));
  py::dict out;
  out["form_a"] = c.form_a;
  out["form_b"] = c.form_b;
  out["indicator_gap"] = c.indicator_gap;
  out["delta_h"] = c.delta_h;
  out["equal"] = c.equal;
  return out;
}

std::string canonical_config(const std::filesystem::path& path) {
  return clid::to_json(clid::load_config(path)).dump(2);
}

std::string run_pipeline(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                         std::optional<std::uint64_t> seed, int jobs) {
  clid::RunContext ctx;
  ctx.config = clid::load_config(config_path);
  if (seed) ctx.config.seed = *seed;
  ctx.config.validate();
  ctx.run_dir = out_dir;
  ctx.config.output_dir = out_dir.string();
  ctx.jobs = jobs;
  std::ostringstream summary;
  ctx.summary = &summary;
  {
    py::gil_scoped_release release;
    clid::run_pipeline(ctx);
  }
  return summary.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Membership-inference audit of toy conditional diffusion models";

  py::register_exception<clid::RuntimeFailure>(m, "RuntimeFailure");

  py::class_<clid::NoiseSchedule>(m, "NoiseSchedule")
      .def_readonly("total_steps", &clid::NoiseSchedule::total_steps)
      .def_readonly("betas", &clid::NoiseSchedule::betas)
      .def_readonly("alpha_bars", &clid::NoiseSchedule::alpha_bars)
      .def_readonly("sigmas", &clid::NoiseSchedule::sigmas)
      .def("beta", &clid::NoiseSchedule::beta, py::arg("t"))
      .def("alpha_bar", &clid::NoiseSchedule::alpha_bar, py::arg("t"))
      .def("sigma", &clid::NoiseSchedule::sigma, py::arg("t"));

  m.def(
      "linear_schedule",
      [](int total_steps, double beta_start, double beta_end) {
        return clid::make_linear_schedule(total_steps, beta_start, beta_end);
      },
      py::arg("total_steps") = 100, py::arg("beta_start") = 1e-4, py::arg("beta_end") = 0.05);

  m.def(
      "forward_diffuse",
      [](const std::vector<double>& x0, int t, const std::vector<double>& eps,
         const clid::NoiseSchedule& schedule) {
        if (x0.size() != eps.size()) throw py::value_error("x0 and eps must have the same length");
        const clid::Vec a = Eigen::Map<const clid::Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
        const clid::Vec e = Eigen::Map<const clid::Vec>(eps.data(), static_cast<Eigen::Index>(eps.size()));
        const clid::Vec xt = clid::forward_diffuse(a, t, e, schedule);
        return std::vector<double>(xt.data(), xt.data() + xt.size());
      },
      py::arg("x0"), py::arg("t"), py::arg("eps"), py::arg("schedule"));

  m.def("roc_auc", &roc_auc, py::arg("scores"), py::arg("members"));
  m.def("tpr_at_fpr", &tpr_at_fpr, py::arg("scores"), py::arg("members"), py::arg("target_fpr") = 0.01);
  m.def("theorem_check", &theorem_check, py::arg("q_mem"), py::arg("q_out"), py::arg("p"));
  m.def("sha256_hex", &clid::sha256_hex, py::arg("data"));
  m.def("canonical_config", &canonical_config, py::arg("path"));
  m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none(),
        py::arg("jobs") = 1);
}
