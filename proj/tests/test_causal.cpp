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

#include "chronoscope/causal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace chronoscope;

namespace {

HamiltonianSpec random_local_hamiltonian(int n, Rng& rng) {
  std::normal_distribution<double> g;
  HamiltonianSpec H(n);
  for (Site j = 0; j < n; ++j) {
    for (Pauli p : kNontrivial) H.add(g(rng), PauliString::single(n, j, p));
  }
  for (Site j = 0; j + 1 < n; ++j) {
    for (Pauli a : kNontrivial) {
      for (Pauli b : kNontrivial) {
        PauliString s(n);
        s.set(j, a);
        s.set(j + 1, b);
        H.add(0.5 * g(rng), s);
      }
    }
  }
  return H;
}

HamiltonianSpec xz_pair(double J) {
  HamiltonianSpec H(2);
  H.add(J, PauliString::from_string("XZ"));
  return H;
}

StateVector zero_plus_i() {
  Vec v = Vec::Zero(4);
  v[0] = 1.0 / std::sqrt(2.0);
  v[1] = cplx(0, 1.0 / std::sqrt(2.0));
  return {2, v};
}

}  // namespace

TEST(Moments, Identities) {
  for (int D : {2, 3, 4, 8, 16}) {
    const auto m = MomentCoefficients::of(D);
    EXPECT_NEAR(m.a * D * D + m.b * D, 1.0, 1e-15);
    EXPECT_NEAR(m.a * D + m.b * D * D, 2.0 * D / (D * D + 1.0), 1e-15);
  }
}

TEST(Moments, HsSecondMomentMatchesSampling) {
  // E[O_ij O_kl] = a delta_ij delta_kl + b delta_il delta_jk for HS densities.
  Rng rng(31);
  const int D = 3;
  const auto m = MomentCoefficients::of(D);
  const int N = 60000;
  double e0000 = 0.0;
  double e0011 = 0.0;
  double e0110 = 0.0;
  for (int k = 0; k < N; ++k) {
    const Mat O = hs_random_observable(D, rng);
    e0000 += std::norm(O(0, 0));
    e0011 += (O(0, 0) * O(1, 1)).real();
    e0110 += (O(0, 1) * O(1, 0)).real();
  }
  EXPECT_NEAR(e0000 / N, m.a + m.b, 3e-3);
  EXPECT_NEAR(e0011 / N, m.a, 3e-3);
  EXPECT_NEAR(e0110 / N, m.b, 3e-3);
}

TEST(Theta, BellSpectrum) {
  Vec v = Vec::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  const auto th = theta(StateVector(2, v), 0);
  EXPECT_NEAR(th.eigenvalues[0], 0.0, 1e-14);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(th.eigenvalues[k], 1.0 / 3.0, 1e-14);
}

TEST(Theta, ProductQuadraticForm) {
  const auto psi = StateVector::product("0+1");
  const auto th = theta(psi, 1);
  EXPECT_NEAR(th.eigenvalues[0], 0.0, 1e-14);
  EXPECT_NEAR(th.eigenvalues[1], 0.0, 1e-14);
  EXPECT_NEAR(th.eigenvalues[2], 0.0, 1e-14);
  // rho_c = |phi1><phi1|, so (xi|Theta|xi) = |xi_00|^2 / 3 with xi in normalized HS units
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Matrix2cd xi = Eigen::Matrix2cd::Random();
    const double expect = std::norm(xi(0, 0)) / 3.0;
    EXPECT_NEAR(th.quadratic_form(xi), expect, 1e-12);
  }
}

TEST(Theta, TableOnRandomStates) {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 3;
    const auto psi = StateVector::random(n, rng);
    const Site A = trial % n;
    const auto sp = schmidt_split(psi, A);
    const auto th = theta(psi, A);
    const double d = std::ldexp(1.0, n);
    const double P = sp.p1 * sp.p1 + sp.p2 * sp.p2;
    std::vector<double> expect = {0.0, d * sp.p1 * sp.p2 / 3.0, d * sp.p1 * sp.p2 / 3.0, d / 3.0 * P / 2.0};
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(th.eigenvalues[k], expect[static_cast<std::size_t>(k)], 1e-9);
    EXPECT_GE(th.eigenvalues[0], -1e-12);
    EXPECT_NEAR(th.trace(), d / 3.0 * (1.0 - P / 2.0), 1e-9);
    // null vector p2 |phi1><phi1| + p1 |phi2><phi2|
    Eigen::Vector4cd nv(sp.p2, 0, 0, sp.p1);
    EXPECT_LT((th.matrix * nv).norm(), 1e-10);
  }
}

TEST(Gamma, TwoQubitExample) {
  const double J = 0.8;
  const auto H = xz_pair(J);
  const Eigen::Matrix2cd X = pauli_matrix(Pauli::X);
  const Eigen::Matrix2cd Z = pauli_matrix(Pauli::Z);
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = std::numbers::pi * k / 200.0;
    const Mat g = gamma_pauli(H, X, 0, 1, t);
    Mat expect = Mat::Zero(4, 4);  // complement Pauli basis I, X, Y, Z
    expect(2, 2) = std::pow(std::sin(2 * J * t), 2);
    worst = std::max(worst, (g - expect).cwiseAbs().maxCoeff());
    EXPECT_LT(gamma_pauli(H, Z, 0, 1, t).norm(), 1e-13);
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Gamma, ZeroTimeVanishes) {
  Rng rng(34);
  const auto H = random_local_hamiltonian(5, rng);
  const auto psi = StateVector::random(5, rng);
  Propagator U(H);
  const auto g = gamma(psi, U, pauli_matrix(Pauli::X), 1, 3, 0.0);
  EXPECT_LT(g.matrix.norm(), 1e-13);
}

TEST(CiExact, ZeroTime) {
  Rng rng(35);
  const auto H = random_local_hamiltonian(5, rng);
  const auto psi = StateVector::random(5, rng);
  EXPECT_NEAR(ci_exact(psi, H, 1, 3, 0.0).value, 0.0, 1e-13);
  const auto prod = StateVector::product("01+10");
  EXPECT_NEAR(ci_exact(prod, H, 2, 2, 0.0).value, 1.0 / 20.0, 1e-13);
  // maximally mixed A: (P - 1/2)/10 = 0
  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(ci_exact(StateVector(2, bell), xz_pair(1.0), 0, 0, 0.0).value, 0.0, 1e-14);
}

TEST(CiExact, TwoQubitExample) {
  const double J = 0.7;
  const auto H = xz_pair(J);
  const auto psi = zero_plus_i();
  const auto zero = StateVector::product("00");
  for (double t : {0.0, 0.2, 0.5, 1.1, -0.4}) {
    const auto ci = ci_exact(psi, H, 0, 1, t);
    EXPECT_NEAR(ci.value, std::pow(std::sin(2 * J * t), 2) / 60.0, 1e-12);
    EXPECT_NEAR(ci.spectral, ci.value, 1e-12);
    EXPECT_NEAR(ci_exact(zero, H, 0, 1, t).value, 0.0, 1e-14);
  }
}

TEST(CiExact, RoutesAgree) {
  Rng rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 3;
    const auto H = random_local_hamiltonian(n, rng);
    const auto psi = StateVector::random(n, rng);
    std::uniform_int_distribution<int> site(0, n - 1);
    const Site A = site(rng);
    const Site B = site(rng);
    const double t = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    Propagator U(H);
    const auto ci = ci_exact(psi, U, A, B, t);
    EXPECT_GE(ci.value, -1e-12);
    EXPECT_NEAR(ci.spectral, ci.value, 1e-10);
    EXPECT_NEAR(ci_four_trace_dense(psi, H, A, B, t).value, ci.value, 1e-10);
    EXPECT_NEAR(ci_response(psi, U, A, B, t).value, ci.value, 1e-10);
  }
}

TEST(CiExact, RankOneState) {
  Rng rng(37);
  const auto H = random_local_hamiltonian(4, rng);
  const auto psi = StateVector::product("0+1-");
  Propagator U(H);
  for (Site B : {0, 2}) {
    const auto ci = ci_exact(psi, U, 1, B, 0.6);
    EXPECT_NEAR(ci.value, ci_four_trace_dense(psi, H, 1, B, 0.6).value, 1e-10);
    EXPECT_NEAR(ci.spectral, ci.value, 1e-10);
  }
}

TEST(MonteCarlo, MatchesExactTwoQubit) {
  const double J = 0.7;
  const double t = 0.5;
  const auto psi = zero_plus_i();
  Propagator U(xz_pair(J));
  const auto mc = ci_monte_carlo(psi, U, 0, 1, t, 20000, 99);
  const double exact = std::pow(std::sin(2 * J * t), 2) / 60.0;
  EXPECT_GT(mc.std_error, 0.0);
  EXPECT_LT(std::abs(mc.value - exact), 3.5 * mc.std_error);
  const auto again = ci_monte_carlo(psi, U, 0, 1, t, 20000, 99);
  EXPECT_EQ(again.value, mc.value);
  EXPECT_THROW(ci_monte_carlo(psi, U, 0, 1, t, 50, 1), QcoreError);
}

TEST(MonteCarlo, ConstantObservableAndZeroHamiltonian) {
  Rng rng(38);
  const auto psi = StateVector::random(3, rng);
  const auto H = random_local_hamiltonian(3, rng);
  Propagator U(H);
  const auto rt = response_tensor(psi, U, 0, 2, 0.4);
  const Mat half = Mat::Identity(2, 2) / 2.0;
  EXPECT_LT(rt.ci_monte_carlo(200, 5, half).value, 1e-28);
  EXPECT_LT(std::abs(rt.variance_exact(half)), 1e-14);
  Propagator zero(HamiltonianSpec(3));
  const auto mc = ci_monte_carlo(psi, zero, 0, 2, 0.4, 400, 7);
  EXPECT_LT(mc.value, 1e-28);
}

TEST(MonteCarlo, WeingartenMoment) {
  // E|V_00|^4 = 2/(d(d+1))
  for (int d : {2, 3}) {
    EXPECT_NEAR(haar_moment4(d, 0, 0, 0, 0, 0, 0, 0, 0), 2.0 / (d * (d + 1.0)), 1e-15);
    EXPECT_NEAR(haar_moment4(d, 0, 0, 1, 1, 0, 0, 1, 1), 1.0 / (d * d - 1.0), 1e-15);
  }
}

TEST(SpectralOverlap, NullVectorAlignment) {
  const auto th = theta_from_weights(0.7, 0.3, 8.0);
  GammaOperator g;
  Eigen::Vector4cd nv(0.3, 0, 0, 0.7);
  g.matrix = nv * nv.adjoint();
  g.finalize();
  EXPECT_NEAR(spectral_overlap(th, g), 0.0, 1e-14);
  GammaOperator other;
  other.matrix = Eigen::Matrix4cd::Identity();
  other.finalize();
  EXPECT_NEAR(spectral_overlap(th, other), th.trace(), 1e-13);
}

TEST(ShortTimeSame, ConstantTerm) {
  Rng rng(39);
  const auto H = random_local_hamiltonian(4, rng);
  EXPECT_NEAR(ci_short_time_same(StateVector::product("0+10"), H, 1, 0.0).value, 1.0 / 20.0, 1e-14);
  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(ci_short_time_same(StateVector(2, bell), xz_pair(1.0), 0, 0.0).value, 0.0, 1e-14);
}

TEST(ShortTimeSame, SecondOrderAccurate) {
  Rng rng(40);
  const auto H = random_local_hamiltonian(5, rng);
  const auto psi = StateVector::random(5, rng);
  Propagator U(H);
  const auto coef = short_time_same_coefficients(psi, H, 2);
  for (double sign : {1.0, -1.0}) {
    const double dt = sign * 0.01;
    const double e1 = std::abs(coef.at(dt) - ci_exact(psi, U, 2, 2, dt).value);
    const double e2 = std::abs(coef.at(dt / 2) - ci_exact(psi, U, 2, 2, dt / 2).value);
    // remainder is O(dt^3)
    EXPECT_GT(e1 / e2, 7.0);
    EXPECT_LT(e1 / e2, 9.0);
  }
}

TEST(ShortTimeDiff, IsingNeighborsLimit) {
  const auto H = build_ising(6, 1.0, 0.4, -0.3);
  Rng rng(41);
  const auto psi = StateVector::random(6, rng);
  Propagator U(H);
  const auto c = short_time_diff_coefficient(psi, H, 2, 3);
  EXPECT_TRUE(c.simplified);
  EXPECT_NEAR(short_time_diff_coefficient(psi, H, 2, 3, true).c2, c.c2, 1e-12);
  double prev = 1.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    const double r = ci_short_time_diff(psi, H, 2, 3, dt).value / ci_exact(psi, U, 2, 3, dt).value;
    EXPECT_LT(std::abs(r - 1.0), prev);
    prev = std::abs(r - 1.0);
  }
  EXPECT_LT(prev, 0.05);
}

TEST(ShortTimeDiff, GeneralRouteWithThreeBodyTerm) {
  Rng rng(42);
  auto H = random_local_hamiltonian(5, rng);
  H.add(0.6, PauliString::from_string("IXYZI"));
  const auto psi = StateVector::random(5, rng);
  Propagator U(H);
  const auto c = short_time_diff_coefficient(psi, H, 1, 2);
  EXPECT_FALSE(c.simplified);
  const double dt = 0.002;
  EXPECT_NEAR(c.c2 * dt * dt / ci_exact(psi, U, 1, 2, dt).value, 1.0, 0.02);
}

TEST(ShortTimeDiff, CommutingAndTwoQubit) {
  HamiltonianSpec H(3);
  H.add(1.0, PauliString::from_string("ZZI"));
  H.add(0.5, PauliString::from_string("IZZ"));
  const auto psi = StateVector::product("+0+");
  EXPECT_NEAR(short_time_diff_coefficient(psi, H, 0, 2).c2, 0.0, 1e-15);
  const double J = 0.9;
  const auto c = short_time_diff_coefficient(zero_plus_i(), xz_pair(J), 0, 1);
  // sin^2(2 J dt)/60 -> (2J)^2 dt^2 / 60
  EXPECT_NEAR(c.c2, 4 * J * J / 60.0, 1e-13);
}
