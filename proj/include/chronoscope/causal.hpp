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

#include "chronoscope/hamlib.hpp"

#include <optional>
#include <vector>

namespace chronoscope {

// Second-moment weights of the Hilbert-Schmidt measure on D x D densities:
// E[tr(O R1) tr(O R2)] = a tr R1 tr R2 + b tr(R1 R2).
struct MomentCoefficients {
  int dim = 2;
  double a = 0.2;
  double b = 0.1;

  static MomentCoefficients of(int D) {
    const double d = D;
    const double a = 1.0 / (d * d + 1.0);
    return {D, a, a / d};
  }
};

enum class CiMethod { kExact, kMonteCarlo, kShortTime, kResponse, kDense };

const char* to_string(CiMethod m);

struct CiValue {
  double value = 0.0;
  CiMethod method = CiMethod::kExact;
  double std_error = 0.0;   // Monte Carlo only
  double spectral = 0.0;    // exact only: spectral-overlap route
};

// Theta restricted to span{|phi_a><phi_b|}, dyad index 2a + b. d is the full
// Hilbert-space dimension; d_c = d/2 is the complement dimension.
struct ThetaOperator {
  double d = 0.0;
  double p1 = 1.0;
  double p2 = 0.0;
  Eigen::Matrix4cd matrix;
  Eigen::Vector4d eigenvalues;   // ascending
  Eigen::Matrix4cd eigenvectors; // columns

  double trace() const { return matrix.trace().real(); }
  // (xi|Theta|xi) for xi given by its Schmidt-basis block <phi_a|xi|phi_b>.
  double quadratic_form(const Eigen::Matrix2cd& xi_block) const;
};

ThetaOperator theta_from_weights(double p1, double p2, double d);
ThetaOperator theta(const StateVector& state, Site A);

// gamma in the same dyad basis: sum_l |u_l)(u_l| with u_l the Schmidt-basis
// blocks of the components of P_A O_B(t), scaled by 1/sqrt(d_c).
struct GammaOperator {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
  std::vector<double> weights;
  std::vector<Eigen::Vector4cd> vectors;

  void finalize();  // eigen-decomposes matrix into weights/vectors
};

// O_B is a 2x2 single-site operator; its identity component is dropped.
GammaOperator gamma(const HeisenbergSector& sector, const Eigen::Matrix2cd& O_B, double d);
GammaOperator gamma(const StateVector& state, const Propagator& U, const Eigen::Matrix2cd& O_B, Site A, Site B,
                    double t);
// Dense gamma on all of A^c as a matrix in the normalized Pauli basis of A^c
// (string index with the lowest complement site most significant).
Mat gamma_pauli(const HamiltonianSpec& H, const Eigen::Matrix2cd& O_B, Site A, Site B, double t);

double spectral_overlap(const ThetaOperator& theta, const GammaOperator& gamma);

// Schmidt factors at A evolved for tau: U(tau)|i>_A|phi_a>, row order 2i + a.
struct EvolvedSchmidt {
  int n_qubits = 0;
  Site A = 0;
  double tau = 0.0;
  SchmidtPair schmidt;
  std::vector<Vec> evolved;
};

EvolvedSchmidt evolve_schmidt(const StateVector& state, Site A, const Propagator& U, double tau);

// (1/3){tr Y^2 - 1/2 tr(tr_c Y)^2 - 1/2 tr(tr_A Y)^2 + 1/4 (tr Y)^2}, Y = X (1 x rho_c),
// on the compressed A (x) span{phi} space with rho_c = diag(p).
double ci_single_observable(const Mat& X, const Eigen::VectorXd& p);

CiValue ci_from_evolved(const EvolvedSchmidt& ev, Site B);
// Single-qubit target given by the sector's observables; d is the full dimension.
CiValue ci_from_sector(const HeisenbergSector& sector, double p1, double p2, double d);
CiValue ci_exact(const StateVector& state, const Propagator& U, Site A, Site B, double t);
CiValue ci_exact(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double t);
// Full-matrix four-trace evaluation, n <= 10.
CiValue ci_four_trace_dense(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double t);

// Output of a linear-in-(V, V^*) map on a d-level source:
// out(V) = sum_{p,q} V_p V_q^* T_{pq} with p = i d + j indexing V_ij.
// T must be Hermitian-paired (T_qp = T_pq^dag) and out(V) a density for unitary V.
// With d_embed > 0 the blocks are the leading corner of a d_embed-level target
// whose remaining rows and columns vanish.
class ChannelResponse {
 public:
  ChannelResponse(std::vector<Mat> blocks, int d_source, int d_embed = 0);

  int d_source() const { return d_; }
  int d_target() const { return D_; }
  const Mat& block(int p, int q) const { return T_[static_cast<std::size_t>(p * d_ * d_ + q)]; }
  Mat output(const Mat& V) const;
  Mat mean_output() const;
  // E_O Var_V tr(O out(V)), O Hilbert-Schmidt random on the target, V Haar.
  double ci_exact() const;
  double variance_exact(const Mat& O) const;
  CiValue ci_monte_carlo(long n_samples, std::uint64_t seed, const std::optional<Mat>& fixed_observable = {}) const;

 private:
  int d_;
  int D_;
  int m_;
  std::vector<Mat> T_;
};

// Linear response of a target system to a Haar perturbation V on a d_A-level
// source: R(V) = M(V) M(V)^dag with M(V) = sum_ij V_ij F_ij.
class ResponseTensor {
 public:
  ResponseTensor(std::vector<Mat> features, int d_source);

  int d_source() const { return dA_; }
  int d_target() const { return D_; }
  Mat response(const Mat& V) const;
  // HS average over the target observable, exact Haar second moments over V.
  double ci_exact() const;
  // Variance over V for one fixed observable O, exact Haar moments.
  double variance_exact(const Mat& O) const;
  CiValue ci_monte_carlo(long n_samples, std::uint64_t seed, const std::optional<Mat>& fixed_observable = {}) const;
  ChannelResponse channel() const;

 private:
  int dA_;
  int D_;
  std::vector<Mat> F_;
};

// Features F_ij = reshape_B(U(t) E_ij|Psi>) for single sites A, B.
ResponseTensor response_tensor(const StateVector& state, const Propagator& U, Site A, Site B, double t);
CiValue ci_response(const StateVector& state, const Propagator& U, Site A, Site B, double t);
CiValue ci_monte_carlo(const StateVector& state, const Propagator& U, Site A, Site B, double t, long n_samples,
                       std::uint64_t seed);

// Exact Haar second moment E[V_{i1 j1} V_{i2 j2} V*_{k1 l1} V*_{k2 l2}].
double haar_moment4(int d, int i1, int j1, int i2, int j2, int k1, int l1, int k2, int l2);
Mat hs_random_observable(int D, Rng& rng);

// Taylor expansion of CI_AA to second order in signed dt.
struct ShortTimeSame {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double at(double dt) const { return c0 + c1 * dt + c2 * dt * dt; }
};
ShortTimeSame short_time_same_coefficients(const StateVector& state, const HamiltonianSpec& H, Site A);
CiValue ci_short_time_same(const StateVector& state, const HamiltonianSpec& H, Site A, double dt);

// Leading dt^2 term of CI_AB for disjoint single sites.
struct ShortTimeDiff {
  double c2 = 0.0;
  bool simplified = false;  // no term couples A, B and a third site
};
ShortTimeDiff short_time_diff_coefficient(const StateVector& state, const HamiltonianSpec& H, Site A, Site B,
                                          bool force_general = false);
CiValue ci_short_time_diff(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double dt);

}  // namespace chronoscope
