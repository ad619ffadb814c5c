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

#include "chronoscope/acausal.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chronoscope;

namespace {

HamiltonianSpec xx_chain(int n) { return build_ising(n, 1.0, 0.0, 0.0); }

}  // namespace

TEST(AcausalState, SchmidtWeightsAndZeroTime) {
  for (double tau : {0.0, 0.3, 1.1}) {
    const auto psi = build_ising_acausal_state(6, tau, 2, 3, 4);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
    const auto sp = schmidt_split(psi, 2);
    EXPECT_NEAR(sp.p1, 0.5, 1e-12);
    EXPECT_NEAR(sp.p2, 0.5, 1e-12);
  }
  // tau = 0: x and the rest stay in |0>, q and x' form (|0+> + |1->)/sqrt 2.
  const auto psi0 = build_ising_acausal_state(5, 0.0, 1, 2, 3);
  for (Site s : {0, 2, 4}) EXPECT_NEAR(purity(partial_trace(psi0, {s})), 1.0, 1e-14);
  EXPECT_NEAR(purity(partial_trace(psi0, {1, 3})), 1.0, 1e-14);
  EXPECT_NEAR(purity(partial_trace(psi0, {1})), 0.5, 1e-14);
  EXPECT_THROW(build_ising_acausal_state(5, 0.1, 1, 1, 3), QcoreError);
  EXPECT_THROW(build_ising_acausal_state(2, 0.1, 0, 1, 1), QcoreError);
}

TEST(TheoremCheck, ZeroTime) {
  Rng rng(61);
  const auto psi = StateVector::random(5, rng);
  const auto rep = theorem_check(psi, 1, 3, build_ising(5, 1.0, 0.2, 0.3), 0.0);
  EXPECT_TRUE(rep.verdict);
  EXPECT_LE(rep.max_residual(), 1e-14);
}

TEST(TheoremCheck, EngineeredStateIsAcausal) {
  const int n = 6;
  const double tau = 0.3;
  const auto H = xx_chain(n);
  Propagator U(H);
  const auto psi = build_ising_acausal_state(n, tau, 2, 3, 4);
  const auto rep = theorem_check(psi, 2, 3, U, tau);
  EXPECT_TRUE(rep.verdict);
  EXPECT_LE(rep.max_residual(), 1e-10);
  EXPECT_TRUE(rep.degenerate);
  ASSERT_EQ(rep.rotated_max.size(), 2U);
  for (double m : rep.rotated_max) EXPECT_LE(m, 1e-10);
  EXPECT_LE(ci_exact(psi, U, 2, 3, tau).value, 1e-9);
  // mirrored placement
  const auto mirror = build_ising_acausal_state(n, tau, 4, 3, 2);
  EXPECT_LE(theorem_check(mirror, 4, 3, U, tau).max_residual(), 1e-10);
}

TEST(TheoremCheck, BranchesRestoreInfluence) {
  const int n = 6;
  const double tau = 0.3;
  Propagator U(xx_chain(n));
  for (int branch : {1, 2}) {
    const auto psi = ising_acausal_branch(n, tau, 2, 3, 4, branch);
    const auto rep = theorem_check(psi, 2, 3, U, tau);
    EXPECT_TRUE(rep.rank_one);
    EXPECT_FALSE(rep.verdict);
    const double ci = ci_exact(psi, U, 2, 3, tau).value;
    EXPECT_GE(ci, 1e-4);
    EXPECT_NEAR(rep.implied_ci, ci, 1e-12);
  }
}

TEST(TheoremCheck, ImpliedCiMatchesExactOnRandomStates) {
  Rng rng(62);
  int false_verdicts = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = StateVector::random(5, rng);
    HamiltonianSpec H = build_ising(5, 1.0, 0.4, -0.3);
    Propagator U(H);
    const double tau = 0.2 + 0.1 * trial;
    const auto rep = theorem_check(psi, 1, 2, U, tau);
    const double ci = ci_exact(psi, U, 1, 2, tau).value;
    EXPECT_NEAR(rep.implied_ci, ci, 1e-12);
    if (!rep.verdict) {
      ++false_verdicts;
      EXPECT_GT(ci, 1e-8);
    } else {
      EXPECT_LE(ci, 10 * rep.tolerance);
    }
  }
  EXPECT_EQ(false_verdicts, 10);
}
