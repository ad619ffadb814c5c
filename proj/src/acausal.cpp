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

#include <algorithm>
#include <cmath>

namespace chronoscope {

namespace {

struct Residuals {
  std::array<std::array<double, 2>, 9> r{};
  double implied = 0.0;
};

cplx element(const Mat& g, Pauli beta, int a, int b) {
  const Eigen::Matrix2cd& sb = pauli_matrix(beta);
  cplx s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) s += sb(j, i) * g(2 * i + a, 2 * j + b);
  }
  return 0.5 * s;
}

Residuals residuals_for(const std::array<Mat, 3>& grams, double p1, double p2) {
  Residuals out;
  for (Pauli alpha : kNontrivial) {
    const Mat& g = grams[static_cast<std::size_t>(alpha) - 1];
    for (Pauli beta : kNontrivial) {
      const double diag = std::abs(p1 * element(g, beta, 0, 0) - p2 * element(g, beta, 1, 1));
      const double off = std::abs(element(g, beta, 0, 1));
      const auto i = static_cast<std::size_t>(3 * (static_cast<int>(alpha) - 1) + static_cast<int>(beta) - 1);
      out.r[i] = {diag, off};
      out.implied += 0.5 * diag * diag + 2.0 * p1 * p2 * off * off;
    }
  }
  out.implied /= 30.0;
  return out;
}

void check_distinct(int n, std::initializer_list<Site> sites) {
  std::vector<Site> v(sites);
  for (Site s : v) {
    if (s < 0 || s >= n) throw QcoreError("site index out of range");
  }
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw QcoreError("sites must be distinct");
}

Vec branch_vector(int n, double tau, Site q, Site x, Site xp, int branch) {
  const double s = branch == 1 ? 1.0 : -1.0;
  Vec psi = Vec::Zero(Eigen::Index{1} << n);
  psi[0] = 1.0;
  // rotate x by e^{+/- i X tau}, set x' to |+/->, q to |0>/|1>
  Eigen::Matrix2cd rot;
  rot << std::cos(tau), cplx(0, s * std::sin(tau)), cplx(0, s * std::sin(tau)), std::cos(tau);
  apply_1q(psi, n, x, rot);
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd prep;  // |0> -> |+> or |->
  prep << h, h, s * h, -s * h;
  apply_1q(psi, n, xp, prep);
  if (branch == 2) apply_1q(psi, n, q, pauli_matrix(Pauli::X));
  return psi;
}

}  // namespace

double TheoremReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max({m, r[0], r[1]});
  return m;
}

TheoremReport theorem_report(const HeisenbergSector& sector, const SchmidtPair& sp, double tol, std::uint64_t seed) {
  if (sector.rank() != 2) throw QcoreError("theorem check needs a two-vector Schmidt basis");
  const std::array<Mat, 3> grams = {sector.gram(Pauli::X), sector.gram(Pauli::Y), sector.gram(Pauli::Z)};
  TheoremReport rep;
  rep.tolerance = tol;
  rep.p1 = sp.p1;
  rep.p2 = sp.p2;
  rep.degenerate = sp.degenerate;
  rep.rank_one = sp.rank == 1;
  const Residuals base = residuals_for(grams, sp.p1, sp.p2);
  rep.residuals = base.r;
  rep.implied_ci = base.implied;
  if (rep.rank_one) {
    for (auto& r : rep.residuals) r[1] = 0.0;
  }
  rep.verdict = rep.max_residual() <= tol;
  if (rep.degenerate) {
    Rng rng(seed);
    for (int k = 0; k < 2; ++k) {
      // phi'_a = sum_b V_ba phi_b, so G' = W^dag G W with W = 1 (x) V.
      const Mat V = haar_unitary(2, rng);
      Mat W = Mat::Zero(4, 4);
      W.block(0, 0, 2, 2) = V;
      W.block(2, 2, 2, 2) = V;
      std::array<Mat, 3> rotated;
      for (std::size_t a = 0; a < 3; ++a) rotated[a] = W.adjoint() * grams[a] * W;
      const Residuals rot = residuals_for(rotated, sp.p1, sp.p2);
      double m = 0.0;
      for (const auto& r : rot.r) m = std::max({m, r[0], r[1]});
      rep.rotated_max.push_back(m);
    }
  }
  return rep;
}

TheoremReport theorem_check(const StateVector& state, Site q, Site x, const Propagator& U, double tau, double tol,
                            std::uint64_t seed) {
  if (x < 0 || x >= state.n_qubits()) throw QcoreError("site index out of range");
  const SchmidtPair sp = schmidt_split(state, q);
  const HeisenbergSector sector(U, x, q, tau, {sp.phi1, sp.phi2});
  return theorem_report(sector, sp, tol, seed);
}

TheoremReport theorem_check(const StateVector& state, Site q, Site x, const HamiltonianSpec& H, double tau, double tol,
                            std::uint64_t seed) {
  return theorem_check(state, q, x, Propagator(H), tau, tol, seed);
}

StateVector build_ising_acausal_state(int n, double tau, Site q, Site x, Site x_prime) {
  if (n < 3) throw QcoreError("acausal construction needs n >= 3");
  check_distinct(n, {q, x, x_prime});
  const Vec psi = (branch_vector(n, tau, q, x, x_prime, 1) + branch_vector(n, tau, q, x, x_prime, 2)) / std::sqrt(2.0);
  return {n, psi};
}

StateVector ising_acausal_branch(int n, double tau, Site q, Site x, Site x_prime, int branch) {
  if (n < 3) throw QcoreError("acausal construction needs n >= 3");
  if (branch != 1 && branch != 2) throw QcoreError("branch must be 1 or 2");
  check_distinct(n, {q, x, x_prime});
  return {n, branch_vector(n, tau, q, x, x_prime, branch)};
}

}  // namespace chronoscope
