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
#include "clid/theorem.hpp"

#include <cmath>
#include <string>

namespace clid {
namespace {

double kl(const std::vector<double>& q, const std::vector<double>& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) total += q[i] * std::log(q[i] / p[i]);
  }
  return total;
}

// sum q log q
double neg_entropy(const std::vector<double>& q) {
  double total = 0.0;
  for (double v : q) {
    if (v > 0.0) total += v * std::log(v);
  }
  return total;
}

std::vector<double> conditional_of(const DiscreteJointDistribution& d, int c) {
  return d.conditional_x(c);
}

double expected_conditional_kl(const DiscreteJointDistribution& q,
                               const DiscreteJointDistribution& p) {
  const auto qc = q.marginal_c();
  double total = 0.0;
  for (int c = 0; c < q.n_c; ++c) {
    if (qc[c] > 0.0) total += qc[c] * kl(conditional_of(q, c), conditional_of(p, c));
  }
  return total;
}

double expected_conditional_neg_entropy(const DiscreteJointDistribution& q) {
  const auto qc = q.marginal_c();
  double total = 0.0;
  for (int c = 0; c < q.n_c; ++c) {
    if (qc[c] > 0.0) total += qc[c] * neg_entropy(conditional_of(q, c));
  }
  return total;
}

// E_q[log p(x|c) - log p(x)]
double expected_indicator(const DiscreteJointDistribution& q,
                          const DiscreteJointDistribution& p) {
  const auto px = p.marginal_x();
  const auto pc = p.marginal_c();
  double total = 0.0;
  for (int x = 0; x < q.n_x; ++x) {
    for (int c = 0; c < q.n_c; ++c) {
      const double w = q.at(x, c);
      if (w > 0.0) total += w * (std::log(p.at(x, c) / pc[c]) - std::log(px[x]));
    }
  }
  return total;
}

}  // namespace

std::vector<double> DiscreteJointDistribution::marginal_x() const {
  std::vector<double> out(static_cast<std::size_t>(n_x), 0.0);
  for (int x = 0; x < n_x; ++x) {
    for (int c = 0; c < n_c; ++c) out[x] += at(x, c);
  }
  return out;
}

std::vector<double> DiscreteJointDistribution::marginal_c() const {
  std::vector<double> out(static_cast<std::size_t>(n_c), 0.0);
  for (int x = 0; x < n_x; ++x) {
    for (int c = 0; c < n_c; ++c) out[c] += at(x, c);
  }
  return out;
}

std::vector<double> DiscreteJointDistribution::conditional_x(int c) const {
  std::vector<double> out(static_cast<std::size_t>(n_x), 0.0);
  double total = 0.0;
  for (int x = 0; x < n_x; ++x) total += at(x, c);
  if (total <= 0.0) return out;
  for (int x = 0; x < n_x; ++x) out[x] = at(x, c) / total;
  return out;
}

void DiscreteJointDistribution::validate() const {
  require(n_x >= 1 && n_c >= 1, "distribution grid must be non-empty");
  require(mass.size() == static_cast<std::size_t>(n_x) * n_c,
          "distribution mass does not match grid size");
  double total = 0.0;
  for (double v : mass) {
    require(std::isfinite(v) && v >= 0.0, "distribution mass must be non-negative");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, "distribution mass must sum to 1");
}

TheoremCheck verify_theorem_equivalence(const DiscreteJointDistribution& q_mem,
                                        const DiscreteJointDistribution& q_out,
                                        const DiscreteJointDistribution& p) {
  q_mem.validate();
  q_out.validate();
  p.validate();
  if (q_mem.n_x != p.n_x || q_out.n_x != p.n_x || q_mem.n_c != p.n_c ||
      q_out.n_c != p.n_c) {
    throw ValidationError("distributions must share the same support grid");
  }
  for (std::size_t i = 0; i < p.mass.size(); ++i) {
    if ((q_mem.mass[i] > 0.0 || q_out.mass[i] > 0.0) && p.mass[i] <= 0.0) {
      throw ValidationError("p is zero where q has mass (cell " +
                            std::to_string(i) + ")");
    }
  }

  const auto p_x = p.marginal_x();
  const double out_term =
      expected_conditional_kl(q_out, p) - kl(q_out.marginal_x(), p_x);
  const double mem_term =
      expected_conditional_kl(q_mem, p) - kl(q_mem.marginal_x(), p_x);

  TheoremCheck check;
  check.form_a = out_term - mem_term;
  check.indicator_gap = expected_indicator(q_mem, p) - expected_indicator(q_out, p);
  check.delta_h = neg_entropy(q_out.marginal_x()) +
                  expected_conditional_neg_entropy(q_mem) -
                  neg_entropy(q_mem.marginal_x()) -
                  expected_conditional_neg_entropy(q_out);
  check.delta_h_shannon = -check.delta_h;
  check.form_b = check.indicator_gap - check.delta_h;
  check.equal = std::abs(check.form_a - check.form_b) < kTheoremTolerance;
  return check;
}

}  // namespace clid
