// Copyright 2026 The chronoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "chronoscope/causal.hpp"

#include <array>
#include <vector>

namespace chronoscope {

// Residuals of the zero-influence conditions for q -> x at lag tau, indexed
// [3 (alpha - 1) + (beta - 1)] with entries {diagonal balance, off-diagonal}.
struct TheoremReport {
  std::array<std::array<double, 2>, 9> residuals{};
  double p1 = 1.0;
  double p2 = 0.0;
  bool degenerate = false;  // |p1 - p2| < 1e-10, Schmidt basis not unique
  bool rank_one = false;    // no second Schmidt vector; off-diagonal entries unused
  // Max residual in randomly rotated bases of a degenerate Schmidt space.
  std::vector<double> rotated_max;
  double tolerance = 1e-10;
  bool verdict = false;
  // CI implied by the residuals: (1/30) sum [r_d^2 / 2 + 2 p1 p2 r_o^2].
  double implied_ci = 0.0;

  double max_residual() const;
};

// Residuals from a rank-2 sector built on the Schmidt vectors of sp.
TheoremReport theorem_report(const HeisenbergSector& sector, const SchmidtPair& sp, double tol = 1e-10,
                             std::uint64_t seed = 1);
TheoremReport theorem_check(const StateVector& state, Site q, Site x, const Propagator& U, double tau,
                            double tol = 1e-10, std::uint64_t seed = 1);
TheoremReport theorem_check(const StateVector& state, Site q, Site x, const HamiltonianSpec& H, double tau,
                            double tol = 1e-10, std::uint64_t seed = 1);

// (|0>_q |phi_1> + |1>_q |phi_2>)/sqrt 2 with
// phi_{1,2} = |+/->_{x'} (e^{+/- i X tau}|0>)_x |0...0>.
StateVector build_ising_acausal_state(int n, double tau, Site q, Site x, Site x_prime);
// Single branch |0>_q |phi_1> (branch 1) or |1>_q |phi_2> (branch 2).
StateVector ising_acausal_branch(int n, double tau, Site q, Site x, Site x_prime, int branch);

}  // namespace chronoscope
