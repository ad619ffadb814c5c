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

#include "chronoscope/qcore.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace chronoscope {

class EvolutionError : public QcoreError {
 public:
  using QcoreError::QcoreError;
};

struct HamTerm {
  double coef;
  PauliString string;
};

// Real-weighted sum of Pauli strings. Off-diagonal terms are grouped by their
// X mask so that apply() touches each amplitude once per group.
class HamiltonianSpec {
 public:
  HamiltonianSpec() = default;
  explicit HamiltonianSpec(int n_qubits);

  // Strings carrying a sign phase fold it into the coefficient; an imaginary
  // phase would make the term anti-Hermitian and is rejected.
  void add(double coef, const PauliString& s);

  int n_qubits() const { return n_; }
  const std::vector<HamTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  PauliSum as_sum() const;
  Mat dense() const;
  Vec apply(const Vec& in) const;
  double expectation(const Vec& psi) const { return psi.dot(apply(psi)).real(); }

  // Terms whose support intersects every listed site set.
  HamiltonianSpec restricted_to_touching(std::span<const Site> a, std::span<const Site> b) const;

 private:
  struct Group {
    std::uint64_t x = 0;
    std::vector<std::pair<cplx, std::uint64_t>> zs;  // coefficient incl. i^#Y, z mask
  };
  int n_ = 0;
  std::vector<HamTerm> terms_;
  std::vector<Group> groups_;
};

HamiltonianSpec build_ising(int n, double J, double hx, double hz);
HamiltonianSpec build_pxp(int n);

struct EvolutionResult {
  StateVector state;
  double time = 0.0;
  double residual_estimate = 0.0;
  int substeps = 0;
};

// e^{-iHt}|psi> by adaptive Lanczos time stepping.
EvolutionResult evolve(const StateVector& state, const HamiltonianSpec& H, double t, double tol = 1e-12);
// Reference path through a full eigendecomposition of H.
Vec evolve_dense(const Vec& psi, const HamiltonianSpec& H, double t);

// Reusable e^{-iHt} action. Small systems cache the eigendecomposition of H,
// larger ones fall back to Krylov stepping.
class Propagator {
 public:
  static constexpr int kDefaultDenseMax = 8;

  explicit Propagator(HamiltonianSpec H, double tol = 1e-12, int dense_max = kDefaultDenseMax);

  Vec apply(const Vec& psi, double t) const;
  StateVector apply(const StateVector& psi, double t) const { return {psi.n_qubits(), apply(psi.amplitudes(), t)}; }
  const HamiltonianSpec& hamiltonian() const { return H_; }
  int n_qubits() const { return H_.n_qubits(); }
  bool is_dense() const { return dense_; }
  double tol() const { return tol_; }

 private:
  HamiltonianSpec H_;
  double tol_;
  bool dense_ = false;
  Mat evecs_;
  Eigen::VectorXd evals_;
};

// Full dense decomposition of sigma^alpha_x(tau) = U(tau)^dag sigma U(tau) as
// 1_q x nu^{alpha 0} + sum_b sigma^b_q x nu^{alpha b}, operators on q^c with
// sites in increasing order.
struct SiteDecomposition {
  int n_qubits = 0;
  Site q = 0;
  Mat nu0;
  std::array<Mat, 3> nu;  // X, Y, Z

  const Mat& part(Pauli beta) const { return beta == Pauli::I ? nu0 : nu[static_cast<int>(beta) - 1]; }
  Mat reconstruct() const;
};

inline constexpr int kMaxDenseHeisenberg = 10;

SiteDecomposition heisenberg_site_decomposition(const HamiltonianSpec& H, Pauli alpha, Site x, Site q, double tau);
Mat heisenberg_dense(const HamiltonianSpec& H, Pauli alpha, Site x, double tau);

// Matrix-free variant: matrix elements <phi_a| nu^{alpha beta} |phi_b> against
// supplied complement vectors. G^alpha_{(i a),(j b)} = <U w_ia| sigma^alpha_x |U w_jb>
// with w_ia = |i>_q |phi_a>, row index i*r + a.
class HeisenbergSector {
 public:
  HeisenbergSector(const Propagator& U, Site x, Site q, double tau, std::vector<Vec> complement);
  // Reuses already evolved vectors U w_ia (row order i*r + a).
  HeisenbergSector(int n_qubits, Site x, std::vector<Vec> evolved, int rank);
  // Arbitrary observables in place of sigma^alpha_x, one per alpha = X, Y, Z.
  using VecOperator = std::function<Vec(const Vec&)>;
  HeisenbergSector(std::vector<Vec> evolved, int rank, const std::array<VecOperator, 3>& observables);

  int rank() const { return rank_; }
  const Mat& gram(Pauli alpha) const { return gram_[static_cast<int>(alpha) - 1]; }
  cplx element(Pauli alpha, Pauli beta, int a, int b) const;
  // r x r block of nu^{alpha beta} in the supplied basis.
  Mat block(Pauli alpha, Pauli beta) const;
  const std::vector<Vec>& evolved() const { return evolved_; }

 private:
  void build_grams(int n_qubits, Site x);
  void build_grams(const std::array<VecOperator, 3>& observables);
  int rank_ = 0;
  std::vector<Vec> evolved_;
  std::array<Mat, 3> gram_;
};

}  // namespace chronoscope
