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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chronoscope {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Rng = std::mt19937_64;
using Site = int;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kSchmidtTol = 1e-12;
inline constexpr int kMaxQubits = 24;
inline constexpr int kMaxDenseSites = 12;

class QcoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bit position of a site inside an amplitude index. Site 0 is the most
// significant bit.
inline constexpr int site_bit(int n, Site s) { return n - 1 - s; }

class StateVector {
 public:
  StateVector() = default;
  StateVector(int n_qubits, Vec amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);
  // One character per site: 0 1 + - r (|0>+i|1>)/sqrt2, l (|0>-i|1>)/sqrt2.
  static StateVector product(std::string_view letters);
  static StateVector random(int n_qubits, Rng& rng);

  int n_qubits() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
  const Vec& amplitudes() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amp_.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
  StateVector normalized() const;
  cplx inner(const StateVector& other) const { return amp_.dot(other.amp_); }

 private:
  int n_ = 0;
  Vec amp_;
};

class DenseOperator {
 public:
  DenseOperator() = default;
  DenseOperator(std::vector<Site> support, Mat matrix);

  const std::vector<Site>& support() const { return support_; }
  const Mat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-12) const;

 private:
  std::vector<Site> support_;
  Mat m_;
};

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);
const Eigen::Matrix2cd& pauli_matrix(Pauli p);
inline constexpr Pauli kPaulis[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
inline constexpr Pauli kNontrivial[3] = {Pauli::X, Pauli::Y, Pauli::Z};

// phase i^k times a tensor product of letters, stored as x/z bit masks in
// amplitude-index bit positions.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits) : n_(n_qubits) { check_n(); }
  static PauliString from_string(std::string_view letters, int phase_power = 0);
  static PauliString single(int n_qubits, Site site, Pauli p);

  int n_qubits() const { return n_; }
  Pauli letter(Site s) const;
  void set(Site s, Pauli p);
  int phase_power() const { return phase_; }
  cplx phase() const;
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  int weight() const;
  std::vector<Site> support() const;
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool acts_trivially_on(std::span<const Site> sites) const;

  bool commutes_with(const PauliString& other) const;
  PauliString operator*(const PauliString& other) const;
  PauliString with_phase(int phase_power) const;
  PauliString dropped_phase() const { return with_phase(0); }
  bool same_letters(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }
  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && phase_ == o.phase_;
  }

  // out = P in; in and out must not alias.
  void apply(const Vec& in, Vec& out) const;
  Vec apply(const Vec& in) const;
  cplx expectation(const Vec& psi) const;
  Mat dense() const;
  std::string to_string() const;

 private:
  void check_n() const;
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int phase_ = 0;
};

struct PauliTerm {
  cplx coef;
  PauliString string;  // phase folded into coef, string phase is 0
};

class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_(n_qubits) {}
  PauliSum(int n_qubits, std::vector<PauliTerm> terms);
  static PauliSum from(const PauliString& s, cplx coef = 1.0);
  static PauliSum from_dense(const Mat& m, int n_qubits);

  int n_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(cplx coef, const PauliString& s);
  PauliSum& simplify(double eps = 1e-15);
  PauliSum operator+(const PauliSum& o) const;
  PauliSum operator-(const PauliSum& o) const;
  PauliSum operator*(const PauliSum& o) const;
  PauliSum operator*(cplx c) const;
  PauliSum commutator(const PauliSum& o) const;
  PauliSum adjoint() const;

  double norm1() const;
  Vec apply(const Vec& in) const;
  cplx expectation(const Vec& psi) const;
  Mat dense() const;

 private:
  int n_ = 0;
  std::vector<PauliTerm> terms_;
};

struct SchmidtPair {
  Site q_site = 0;
  double p1 = 1.0;
  double p2 = 0.0;
  Eigen::Vector2cd psi1;
  Eigen::Vector2cd psi2;
  Vec phi1;  // on the complement, sites in increasing order without q
  Vec phi2;
  int rank = 1;
  bool degenerate = false;

  StateVector reconstruct(int n_qubits) const;
};

DenseOperator partial_trace(const StateVector& state, std::span<const Site> keep);
DenseOperator partial_trace(const StateVector& state, std::initializer_list<Site> keep);
// Cross reduced operator tr_{keep^c}(|a><b|).
Mat partial_trace_cross(const Vec& a, const Vec& b, int n_qubits, std::span<const Site> keep);
SchmidtPair schmidt_split(const StateVector& state, Site q);

double purity(const DenseOperator& rho);
double renyi2_entropy(const DenseOperator& rho);
double von_neumann_entropy(const DenseOperator& rho);
cplx hs_inner(const DenseOperator& a, const DenseOperator& b);
cplx hs_inner(const Mat& a, const Mat& b);
PauliSum project_nontrivial(const PauliSum& op, std::span<const Site> sites);

// Tensor-insert a single-qubit vector at site q into a vector on the complement.
Vec insert_qubit(const Vec& complement, int n_qubits, Site q, const Eigen::Vector2cd& local);
// (<bra|_q tensor 1) psi.
Vec contract_qubit(const Vec& psi, int n_qubits, Site q, const Eigen::Vector2cd& bra);
void apply_1q(Vec& psi, int n_qubits, Site s, const Eigen::Matrix2cd& u);
Mat embed_operator(const Mat& local, std::span<const Site> support, int n_qubits);
// tr_{keep^c} of an operator on all n sites.
Mat partial_trace_operator(const Mat& m, int n_qubits, std::span<const Site> keep);
// Matrix whose rows are indexed by `rows` sites and columns by the rest.
Mat reshape_sites(const Vec& psi, int n_qubits, std::span<const Site> rows);

Mat haar_unitary(int dim, Rng& rng);
Mat hs_random_density(int dim, Rng& rng);
Vec random_gaussian_vector(Eigen::Index dim, Rng& rng);

}  // namespace chronoscope
