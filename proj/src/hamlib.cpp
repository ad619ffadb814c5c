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

#include "chronoscope/hamlib.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace chronoscope {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::uint64_t with_bit(std::uint64_t rest, int b, std::uint64_t i) {
  const std::uint64_t low = (std::uint64_t{1} << b) - 1;
  return ((rest >> b) << (b + 1)) | (i << b) | (rest & low);
}

using ApplyFn = std::function<Vec(const Vec&)>;

// Adaptive Lanczos propagation of e^{-iHt} v. Local error per substep is kept
// below tol * |h| / |t| using the standard a posteriori estimate.
Vec krylov_expm(const ApplyFn& apply, const Vec& v0, double t, double tol, double* residual, int* substeps) {
  constexpr int kMaxKrylov = 40;
  constexpr int kMaxSubsteps = 200000;
  constexpr int kMaxHalvings = 60;
  Vec v = v0;
  double remaining = t;
  double err_total = 0.0;
  int steps = 0;
  const double scale = v0.norm();
  if (t == 0.0 || scale == 0.0) {
    if (residual) *residual = 0.0;
    if (substeps) *substeps = 0;
    return v;
  }
  const int m_max = static_cast<int>(std::min<Eigen::Index>(kMaxKrylov, v.size()));
  double h_hint = t;
  while (remaining != 0.0) {
    if (++steps > kMaxSubsteps) throw EvolutionError("Krylov evolution exceeded the substep cap");
    const double nv = v.norm();
    std::vector<Vec> basis;
    basis.reserve(static_cast<std::size_t>(m_max) + 1);
    basis.push_back(v / nv);
    Eigen::VectorXd alpha(m_max), beta(m_max);
    int m = 0;
    bool breakdown = false;
    for (int j = 0; j < m_max; ++j) {
      Vec w = apply(basis[static_cast<std::size_t>(j)]);
      alpha[j] = basis[static_cast<std::size_t>(j)].dot(w).real();
      for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k <= j; ++k) w -= basis[static_cast<std::size_t>(k)] * basis[static_cast<std::size_t>(k)].dot(w);
      }
      beta[j] = w.norm();
      m = j + 1;
      if (beta[j] <= 1e-13 * std::max(1.0, std::abs(alpha[j]))) {
        breakdown = true;
        break;
      }
      basis.push_back(w / beta[j]);
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& S = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();
    auto coeffs = [&](double h) {
      Vec c(m);
      Eigen::VectorXcd d(m);
      for (int k = 0; k < m; ++k) d[k] = std::exp(cplx(0.0, -lam[k] * h)) * S(0, k);
      c = S.cast<cplx>() * d;
      return c;
    };
    double h = std::abs(h_hint) < std::abs(remaining) ? h_hint : remaining;
    Vec c;
    double err = 0.0;
    int halvings = 0;
    for (;;) {
      c = coeffs(h);
      err = breakdown ? 0.0 : nv * beta[m - 1] * std::abs(c[m - 1]);
      if (err <= tol * std::abs(h) / std::abs(t)) break;
      if (++halvings > kMaxHalvings) throw EvolutionError("Krylov step size underflow");
      h *= 0.5;
    }
    Vec next = Vec::Zero(v.size());
    for (int k = 0; k < m; ++k) next += c[k] * basis[static_cast<std::size_t>(k)];
    v = next * (nv / next.norm());
    err_total += err;
    remaining -= h;
    if (std::abs(remaining) <= 1e-15 * std::abs(t)) remaining = 0.0;
    h_hint = (halvings == 0) ? 2.0 * h : h;
  }
  if (residual) *residual = err_total;
  if (substeps) *substeps = steps;
  return v;
}

}  // namespace

// ----------------------------------------------------------- HamiltonianSpec

HamiltonianSpec::HamiltonianSpec(int n_qubits) : n_(n_qubits) {
  if (n_ < 1 || n_ > kMaxQubits) throw QcoreError("qubit count out of range");
}

void HamiltonianSpec::add(double coef, const PauliString& s) {
  if (s.n_qubits() != n_) throw QcoreError("term length does not match Hamiltonian");
  if (s.phase_power() % 2 != 0) throw QcoreError("imaginary phase makes the term non-Hermitian");
  const double c = s.phase_power() == 2 ? -coef : coef;
  const PauliString bare = s.dropped_phase();
  terms_.push_back({c, bare});
  const int ny = std::popcount(bare.x_mask() & bare.z_mask());
  const cplx gc = c * kIPow[ny % 4];
  auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& g) { return g.x == bare.x_mask(); });
  if (it == groups_.end()) {
    groups_.push_back({bare.x_mask(), {}});
    it = groups_.end() - 1;
  }
  it->zs.emplace_back(gc, bare.z_mask());
}

PauliSum HamiltonianSpec::as_sum() const {
  PauliSum s(n_);
  for (const auto& t : terms_) s.add(t.coef, t.string);
  return s.simplify();
}

Mat HamiltonianSpec::dense() const {
  if (n_ > kMaxDenseSites) throw QcoreError("dense budget exceeded");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(dim, dim);
  Vec e = Vec::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e.setZero();
    e[c] = 1.0;
    m.col(c) = apply(e);
  }
  return m;
}

Vec HamiltonianSpec::apply(const Vec& in) const {
  const std::uint64_t dim = std::uint64_t{1} << n_;
  if (static_cast<std::uint64_t>(in.size()) != dim) throw QcoreError("vector length mismatch in Hamiltonian apply");
  Vec out = Vec::Zero(in.size());
  for (const auto& g : groups_) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      cplx amp = 0.0;
      for (const auto& [c, z] : g.zs) amp += (std::popcount(b & z) & 1) ? -c : c;
      out[static_cast<Eigen::Index>(b ^ g.x)] += amp * in[static_cast<Eigen::Index>(b)];
    }
  }
  return out;
}

HamiltonianSpec HamiltonianSpec::restricted_to_touching(std::span<const Site> a, std::span<const Site> b) const {
  HamiltonianSpec out(n_);
  for (const auto& t : terms_) {
    if (!t.string.acts_trivially_on(a) && !t.string.acts_trivially_on(b)) out.add(t.coef, t.string);
  }
  return out;
}

HamiltonianSpec build_ising(int n, double J, double hx, double hz) {
  if (n < 2) throw QcoreError("Ising chain needs n >= 2");
  HamiltonianSpec H(n);
  for (Site j = 0; j + 1 < n; ++j) {
    PauliString s(n);
    s.set(j, Pauli::X);
    s.set(j + 1, Pauli::X);
    if (J != 0.0) H.add(J, s);
  }
  if (hx != 0.0) {
    for (Site j = 0; j < n; ++j) H.add(hx, PauliString::single(n, j, Pauli::X));
  }
  if (hz != 0.0) {
    for (Site j = 0; j < n; ++j) H.add(hz, PauliString::single(n, j, Pauli::Z));
  }
  return H;
}

HamiltonianSpec build_pxp(int n) {
  if (n < 3) throw QcoreError("PXP chain needs n >= 3");
  HamiltonianSpec H(n);
  for (Site i = 0; i < n; ++i) {
    std::vector<Site> nbrs;
    if (i > 0) nbrs.push_back(i - 1);
    if (i + 1 < n) nbrs.push_back(i + 1);
    const double w = 1.0 / static_cast<double>(1 << nbrs.size());
    for (unsigned mask = 0; mask < (1U << nbrs.size()); ++mask) {
      PauliString s = PauliString::single(n, i, Pauli::X);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        if (mask & (1U << k)) s.set(nbrs[k], Pauli::Z);
      }
      H.add(w, s);
    }
  }
  return H;
}

// ------------------------------------------------------------------ evolution

EvolutionResult evolve(const StateVector& state, const HamiltonianSpec& H, double t, double tol) {
  if (!(tol > 1e-14 && tol < 1e-4)) throw EvolutionError("evolution tolerance must lie in (1e-14, 1e-4)");
  if (H.n_qubits() != state.n_qubits()) throw EvolutionError("state and Hamiltonian sizes differ");
  EvolutionResult r;
  r.time = t;
  Vec out = krylov_expm([&H](const Vec& v) { return H.apply(v); }, state.amplitudes(), t, tol, &r.residual_estimate,
                        &r.substeps);
  r.state = StateVector(state.n_qubits(), std::move(out));
  return r;
}

Vec evolve_dense(const Vec& psi, const HamiltonianSpec& H, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H.dense());
  const Mat& V = es.eigenvectors();
  Vec c = V.adjoint() * psi;
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(cplx(0.0, -es.eigenvalues()[k] * t));
  return V * c;
}

Propagator::Propagator(HamiltonianSpec H, double tol, int dense_max) : H_(std::move(H)), tol_(tol) {
  if (H_.n_qubits() <= dense_max) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H_.dense());
    evecs_ = es.eigenvectors();
    evals_ = es.eigenvalues();
    dense_ = true;
  }
}

Vec Propagator::apply(const Vec& psi, double t) const {
  if (t == 0.0) return psi;
  if (dense_) {
    Vec c = evecs_.adjoint() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(cplx(0.0, -evals_[k] * t));
    return evecs_ * c;
  }
  return krylov_expm([this](const Vec& v) { return H_.apply(v); }, psi, t, tol_, nullptr, nullptr);
}

// ------------------------------------------------------- Heisenberg picture

Mat heisenberg_dense(const HamiltonianSpec& H, Pauli alpha, Site x, double tau) {
  const int n = H.n_qubits();
  if (n > kMaxDenseHeisenberg) throw QcoreError("support overflow: dense Heisenberg budget exceeded");
  Eigen::SelfAdjointEigenSolver<Mat> es(H.dense());
  const Mat& V = es.eigenvectors();
  Eigen::VectorXcd ph(V.cols());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph[k] = std::exp(cplx(0.0, -es.eigenvalues()[k] * tau));
  const Mat U = V * ph.asDiagonal() * V.adjoint();
  const Mat s = PauliString::single(n, x, alpha).dense();
  return U.adjoint() * s * U;
}

SiteDecomposition heisenberg_site_decomposition(const HamiltonianSpec& H, Pauli alpha, Site x, Site q, double tau) {
  const int n = H.n_qubits();
  if (n < 2) throw QcoreError("decomposition needs at least two qubits");
  if (q < 0 || q >= n || x < 0 || x >= n) throw QcoreError("site index out of range");
  if (alpha == Pauli::I) throw QcoreError("alpha must be a nontrivial Pauli");
  const Mat X = heisenberg_dense(H, alpha, x, tau);
  const int b = site_bit(n, q);
  const Eigen::Index dc = Eigen::Index{1} << (n - 1);
  SiteDecomposition d;
  d.n_qubits = n;
  d.q = q;
  for (int beta = 0; beta < 4; ++beta) {
    const Eigen::Matrix2cd& sb = pauli_matrix(static_cast<Pauli>(beta));
    Mat nu = Mat::Zero(dc, dc);
    for (std::uint64_t i = 0; i < 2; ++i) {
      for (std::uint64_t j = 0; j < 2; ++j) {
        const cplx w = 0.5 * sb(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        if (w == 0.0) continue;
        for (Eigen::Index r = 0; r < dc; ++r) {
          const auto fr = static_cast<Eigen::Index>(with_bit(static_cast<std::uint64_t>(r), b, i));
          for (Eigen::Index c = 0; c < dc; ++c) {
            nu(r, c) += w * X(fr, static_cast<Eigen::Index>(with_bit(static_cast<std::uint64_t>(c), b, j)));
          }
        }
      }
    }
    if (beta == 0) d.nu0 = std::move(nu);
    else d.nu[static_cast<std::size_t>(beta - 1)] = std::move(nu);
  }
  return d;
}

Mat SiteDecomposition::reconstruct() const {
  const int b = site_bit(n_qubits, q);
  const Eigen::Index dc = nu0.rows();
  Mat out = Mat::Zero(2 * dc, 2 * dc);
  for (int beta = 0; beta < 4; ++beta) {
    const Eigen::Matrix2cd& sb = pauli_matrix(static_cast<Pauli>(beta));
    const Mat& nu = part(static_cast<Pauli>(beta));
    for (std::uint64_t i = 0; i < 2; ++i) {
      for (std::uint64_t j = 0; j < 2; ++j) {
        const cplx w = sb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (w == 0.0) continue;
        for (Eigen::Index r = 0; r < dc; ++r) {
          const auto fr = static_cast<Eigen::Index>(with_bit(static_cast<std::uint64_t>(r), b, i));
          for (Eigen::Index c = 0; c < dc; ++c) {
            out(fr, static_cast<Eigen::Index>(with_bit(static_cast<std::uint64_t>(c), b, j))) += w * nu(r, c);
          }
        }
      }
    }
  }
  return out;
}

HeisenbergSector::HeisenbergSector(const Propagator& U, Site x, Site q, double tau, std::vector<Vec> complement) {
  const int n = U.n_qubits();
  if (complement.empty()) throw QcoreError("no complement vectors supplied");
  rank_ = static_cast<int>(complement.size());
  evolved_.resize(static_cast<std::size_t>(2 * rank_));
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2cd e = Eigen::Vector2cd::Zero();
    e[i] = 1.0;
    for (int a = 0; a < rank_; ++a) {
      evolved_[static_cast<std::size_t>(i * rank_ + a)] =
          U.apply(insert_qubit(complement[static_cast<std::size_t>(a)], n, q, e), tau);
    }
  }
  build_grams(n, x);
}

HeisenbergSector::HeisenbergSector(int n_qubits, Site x, std::vector<Vec> evolved, int rank)
    : rank_(rank), evolved_(std::move(evolved)) {
  if (rank_ < 1 || evolved_.size() != static_cast<std::size_t>(2 * rank_)) {
    throw QcoreError("evolved vector count must be twice the rank");
  }
  build_grams(n_qubits, x);
}

HeisenbergSector::HeisenbergSector(std::vector<Vec> evolved, int rank, const std::array<VecOperator, 3>& observables)
    : rank_(rank), evolved_(std::move(evolved)) {
  if (rank_ < 1 || evolved_.size() != static_cast<std::size_t>(2 * rank_)) {
    throw QcoreError("evolved vector count must be twice the rank");
  }
  build_grams(observables);
}

void HeisenbergSector::build_grams(int n, Site x) {
  std::array<VecOperator, 3> ops;
  for (Pauli alpha : kNontrivial) {
    ops[static_cast<std::size_t>(alpha) - 1] = [s = PauliString::single(n, x, alpha)](const Vec& v) { return s.apply(v); };
  }
  build_grams(ops);
}

void HeisenbergSector::build_grams(const std::array<VecOperator, 3>& observables) {
  const int m = 2 * rank_;
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<Vec> sw;
    sw.reserve(evolved_.size());
    for (const auto& v : evolved_) sw.push_back(observables[a](v));
    Mat g(m, m);
    for (int p = 0; p < m; ++p) {
      for (int c = 0; c < m; ++c) g(p, c) = evolved_[static_cast<std::size_t>(p)].dot(sw[static_cast<std::size_t>(c)]);
    }
    gram_[a] = std::move(g);
  }
}

cplx HeisenbergSector::element(Pauli alpha, Pauli beta, int a, int b) const {
  const Mat& g = gram(alpha);
  const Eigen::Matrix2cd& sb = pauli_matrix(beta);
  const int r = rank();
  cplx s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) s += sb(j, i) * g(i * r + a, j * r + b);
  }
  return 0.5 * s;
}

Mat HeisenbergSector::block(Pauli alpha, Pauli beta) const {
  const int r = rank();
  Mat m(r, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) m(a, b) = element(alpha, beta, a, b);
  }
  return m;
}

}  // namespace chronoscope
