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
#ifndef CLID_THEOREM_HPP_
#define CLID_THEOREM_HPP_

#include <vector>

#include "clid/common.hpp"

namespace clid {

// Joint distribution over a finite (x-bin, condition) grid. mass is
// row-major over x: mass[x * n_c + c].
struct DiscreteJointDistribution {
  int n_x = 0;
  int n_c = 0;
  std::vector<double> mass;

  double at(int x, int c) const {
    return mass[static_cast<std::size_t>(x) * n_c + c];
  }
  std::vector<double> marginal_x() const;
  std::vector<double> marginal_c() const;
  // q(x | c); zero vector when q(c) == 0.
  std::vector<double> conditional_x(int c) const;

  void validate() const;
};

struct TheoremCheck {
  // [E_c KL(q_out(x|c)||p(x|c)) - KL(q_out(x)||p(x))]
  //   - [E_c KL(q_mem(x|c)||p(x|c)) - KL(q_mem(x)||p(x))]
  double form_a = 0.0;
  // E_mem[log p(x|c) - log p(x)] - E_out[log p(x|c) - log p(x)] - delta_h
  double form_b = 0.0;
  // Indicator gap E_mem[I] - E_out[I].
  double indicator_gap = 0.0;
  // Entropy correction with H(q) = sum q log q, the convention under which
  // KL(q||p) = -E_q[log p] + H(q).
  double delta_h = 0.0;
  // Same correction with Shannon entropy -sum q log q (= -delta_h).
  double delta_h_shannon = 0.0;
  bool equal = false;
};

inline constexpr double kTheoremTolerance = 1e-9;

TheoremCheck verify_theorem_equivalence(const DiscreteJointDistribution& q_mem,
                                        const DiscreteJointDistribution& q_out,
                                        const DiscreteJointDistribution& p);

}  // namespace clid

#endif  // CLID_THEOREM_HPP_
