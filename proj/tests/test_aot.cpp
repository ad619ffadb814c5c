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

#include "chronoscope/aot.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace chronoscope;

namespace {

const HamiltonianSpec& fig_ising8() {
  static const HamiltonianSpec H = build_ising(8, 1.0, 0.01, -0.21);
  return H;
}

}  // namespace

TEST(Neighborhood, Counts) {
  const SpacetimeLattice L(build_ising(4, 1, 0, 0), StateVector::product("0000"), 0.1, 3);
  EXPECT_EQ(neighborhood(1, 1, L).size(), 8U);
  EXPECT_EQ(neighborhood(0, 0, L).size(), 3U);
  EXPECT_EQ(neighborhood(3, 3, L).size(), 3U);
  EXPECT_EQ(neighborhood(2, 0, L).size(), 5U);
  EXPECT_EQ(neighborhood(0, 2, L).size(), 5U);
  EXPECT_THROW(neighborhood(4, 0, L), QcoreError);
  EXPECT_THROW(neighborhood(0, -1, L), QcoreError);
  for (const auto& nb : neighborhood(1, 1, L)) {
    const bool equal_time = nb.index == 4 || nb.index == 8;
    EXPECT_EQ(equal_time, nb.t == 1);
    EXPECT_DOUBLE_EQ(nb.v_t, (1 - nb.t) * 0.1);
    EXPECT_DOUBLE_EQ(nb.v_x, static_cast<double>(1 - nb.x));
  }
}

TEST(Lattice, SlicesFollowEvolution) {
  const auto H = build_ising(5, 1.0, 0.3, -0.2);
  const auto psi = StateVector::product("01+0-");
  const SpacetimeLattice L(H, psi, 0.05, 4);
  EXPECT_EQ(L.n_slices(), 5);
  for (int k = 1; k < 5; ++k) {
    const Vec expect = evolve_dense(psi.amplitudes(), H, k * 0.05);
    EXPECT_LT((L.slice(k).amplitudes() - expect).norm(), 1e-11);
  }
  EXPECT_THROW(SpacetimeLattice(H, psi, 0.0, 2), QcoreError);
  EXPECT_THROW(SpacetimeLattice(H, StateVector::product("00"), 0.1, 2), QcoreError);
}

TEST(AotVector, ZeroHamiltonian) {
  Rng rng(51);
  const SpacetimeLattice L(HamiltonianSpec(4), StateVector::random(4, rng), 0.1, 2);
  const auto f = aot_field(L);
  for (const auto& v : f.vectors) {
    // boundary slices only see one side of the same-site pair
    if (v.t == 1) EXPECT_LT(std::abs(v.v_t), 1e-14);
    EXPECT_LT(std::abs(v.v_x), 1e-14);
  }
}

TEST(AotVector, SumIsExactAndSpacelikeZero) {
  Rng rng(52);
  const auto H = build_ising(6, 1.0, 0.01, -0.21);
  const SpacetimeLattice L(H, StateVector::random(6, rng), 0.05, 3);
  const auto f = aot_field(L, 2);
  for (const auto& v : f.vectors) {
    double vt = 0.0;
    double vx = 0.0;
    for (const auto& c : v.contributions) {
      vt += c.ci * c.neighbor.v_t;
      vx += c.ci * c.neighbor.v_x;
      EXPECT_GE(c.ci, -1e-12);
      if (c.neighbor.index == 4 || c.neighbor.index == 8) EXPECT_LT(std::abs(c.ci), 1e-13);
    }
    EXPECT_EQ(vt, v.v_t);
    EXPECT_EQ(vx, v.v_x);
  }
}

TEST(AotVector, MirrorAntisymmetry) {
  const int n = 6;
  HamiltonianSpec H = build_ising(n, 1.0, 0.3, -0.4);
  const auto psi = StateVector::product("+0110+");
  const SpacetimeLattice L(H, psi, 0.05, 4);
  const auto f = aot_field(L);
  for (int k = 0; k < L.n_slices(); ++k) {
    for (Site x = 0; x < n; ++x) {
      EXPECT_NEAR(f.at(k, x).v_x, -f.at(k, n - 1 - x).v_x, 1e-13);
      EXPECT_NEAR(f.at(k, x).v_t, f.at(k, n - 1 - x).v_t, 1e-13);
    }
  }
}

TEST(AotVector, TranslationInvariantBulk) {
  const auto H = build_ising(10, 1.0, 0.2, -0.3);
  const SpacetimeLattice L(H, StateVector::product("0000000000"), 0.02, 2);
  const auto a = aot_vector(L, 1, 4);
  const auto b = aot_vector(L, 1, 5);
  EXPECT_GT(std::abs(a.v_t), 1e-9);
  EXPECT_NEAR(a.v_t, b.v_t, 1e-6 * std::abs(a.v_t));
  EXPECT_NEAR(a.v_x, -b.v_x, 1e-6 * std::abs(a.v_t));  // mirror pair about the chain center
}

TEST(EntropyMap, Bounds) {
  Rng rng(53);
  const SpacetimeLattice L(build_ising(5, 1.0, 0.3, 0.1), StateVector::random(5, rng), 0.1, 3);
  const auto m = entropy_map(L);
  for (std::size_t i = 0; i < m.renyi2.size(); ++i) {
    EXPECT_GE(m.von_neumann[i], -1e-12);
    EXPECT_LE(m.von_neumann[i], std::log(2.0) + 1e-12);
    EXPECT_GE(m.renyi2[i], -1e-12);
    EXPECT_LE(m.renyi2[i], m.von_neumann[i] + 1e-12);
  }
}

TEST(AotLeading, StationaryAndDirection) {
  const auto& H = fig_ising8();
  Eigen::SelfAdjointEigenSolver<Mat> es(H.dense());
  const StateVector ground(8, es.eigenvectors().col(0));
  Propagator U(H);
  EXPECT_LT(std::abs(aot_leading(ground, U, 3, 0.005).v_t), 1e-14);
  // From a product state entropy increases: leading component points to +t.
  const auto v = aot_leading(StateVector::product("00000000"), U, 3, 0.005);
  EXPECT_GT(v.v_t, 0.0);
  EXPECT_EQ(v.v_x, 0.0);
}

TEST(AotLeading, AgreesWithExactTemporalComponent) {
  const auto& H = fig_ising8();
  Propagator U(H);
  const auto psi = U.apply(StateVector::product("00000000"), -0.5);
  for (double dt : {0.005, 0.0025}) {
    const SpacetimeLattice L(H, U.apply(psi, -dt), dt, 2);
    for (Site x : {2, 5}) {
      const auto exact = aot_vector(L, 1, x);
      const auto lead = aot_leading(L.slice(1), U, x, dt);
      EXPECT_LT(std::abs(lead.v_t - exact.v_t), 0.05 * std::abs(exact.v_t));
      EXPECT_LT(exact.v_t, 0.0);  // approaching the low-entropy fringe
    }
  }
}
