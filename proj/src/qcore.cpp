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

#include "chronoscope/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace chronoscope {

namespace {

void check_site(int n, Site s) {
  if (s < 0 || s >= n) {
    throw QcoreError("site index " + std::to_string(s) + " out of range for " +
                     std::to_string(n) + " qubits");
  }
}

void check_sites(int n, std::span<const Site> sites) {
  if (sites.empty()) throw QcoreError("empty site list");
  std::vector<Site> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    check_site(n, sorted[i]);
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw QcoreError("duplicate site " + std::to_string(sorted[i]));
    }
  }
}

// Splits an amplitude index into (index over `rows` in list order, index over
// the remaining sites in increasing order).
struct IndexSplit {
  std::vector<int> row_bits;
  std::vector<int> rest_bits;

  IndexSplit(int n, std::span<const Site> rows) {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Site s : rows) {
      row_bits.push_back(site_bit(n, s));
      used[static_cast<std::size_t>(s)] = true;
    }
    for (Site s = 0; s < n; ++s) {
      if (!used[static_cast<std::size_t>(s)]) rest_bits.push_back(site_bit(n, s));
    }
  }

  static std::uint64_t gather(std::uint64_t idx, const std::vector<int>& bits) {
    std::uint64_t out = 0;
    for (int b : bits) out = (out << 1) | ((idx >> b) & 1U);
    return out;
  }
  std::uint64_t row(std::uint64_t idx) const { return gather(idx, row_bits); }
  std::uint64_t rest(std::uint64_t idx) const { return gather(idx, rest_bits); }
};

int letter_code(std::uint64_t x, std::uint64_t z, int b) {
  const int xb = static_cast<int>((x >> b) & 1U);
  const int zb = static_cast<int>((z >> b) & 1U);
  if (xb && zb) return 2;
  if (xb) return 1;
  if (zb) return 3;
  return 0;
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(int n_qubits, Vec amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
  if (n_ < 1 || n_ > kMaxQubits) throw QcoreError("qubit count out of range");
  if (amp_.size() != (Eigen::Index{1} << n_)) {
    throw QcoreError("amplitude array length must be 2^n");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw QcoreError("qubit count out of range");
  Vec v = Vec::Zero(Eigen::Index{1} << n_qubits);
  if (index >= static_cast<std::uint64_t>(v.size())) throw QcoreError("basis index out of range");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {n_qubits, std::move(v)};
}

StateVector StateVector::product(std::string_view letters) {
  const int n = static_cast<int>(letters.size());
  if (n < 1 || n > kMaxQubits) throw QcoreError("product state length out of range");
  const double r = 1.0 / std::sqrt(2.0);
  Vec v = Vec::Ones(1);
  for (char c : letters) {
    Eigen::Vector2cd q;
    switch (c) {
      case '0': q << 1.0, 0.0; break;
      case '1': q << 0.0, 1.0; break;
      case '+': q << r, r; break;
      case '-': q << r, -r; break;
      case 'r': q << r, cplx(0.0, r); break;
      case 'l': q << r, cplx(0.0, -r); break;
      default: throw QcoreError(std::string("unknown product-state letter '") + c + "'");
    }
    Vec next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next[2 * i] = v[i] * q[0];
      next[2 * i + 1] = v[i] * q[1];
    }
    v = std::move(next);
  }
  return {n, std::move(v)};
}

StateVector StateVector::random(int n_qubits, Rng& rng) {
  Vec v = random_gaussian_vector(Eigen::Index{1} << n_qubits, rng);
  v.normalize();
  return {n_qubits, std::move(v)};
}

StateVector StateVector::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) throw QcoreError("cannot normalize the zero vector");
  return {n_, amp_ / nrm};
}

// -------------------------------------------------------------- DenseOperator

DenseOperator::DenseOperator(std::vector<Site> support, Mat matrix)
    : support_(std::move(support)), m_(std::move(matrix)) {
  if (m_.rows() != m_.cols()) throw QcoreError("operator matrix must be square");
  if (support_.size() > 30 || m_.rows() != (Eigen::Index{1} << support_.size())) {
    throw QcoreError("operator dimension must be 2^|support|");
  }
}

bool DenseOperator::is_hermitian(double tol) const { return (m_ - m_.adjoint()).norm() <= tol; }

bool DenseOperator::is_unitary(double tol) const {
  return (m_.adjoint() * m_ - Mat::Identity(m_.rows(), m_.cols())).norm() <= tol;
}

// ---------------------------------------------------------------------- Pauli

char pauli_char(Pauli p) {
  static constexpr char kChars[4] = {'I', 'X', 'Y', 'Z'};
  return kChars[static_cast<int>(p)];
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': case '_': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw QcoreError(std::string("unknown Pauli letter '") + c + "'");
  }
}

const Eigen::Matrix2cd& pauli_matrix(Pauli p) {
  static const std::array<Eigen::Matrix2cd, 4> kMats = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -kI, kI, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return kMats[static_cast<std::size_t>(p)];
}

void PauliString::check_n() const {
  if (n_ < 1 || n_ > 62) throw QcoreError("Pauli string length out of range");
}

PauliString PauliString::from_string(std::string_view letters, int phase_power) {
  PauliString p(static_cast<int>(letters.size()));
  for (std::size_t s = 0; s < letters.size(); ++s) p.set(static_cast<Site>(s), pauli_from_char(letters[s]));
  p.phase_ = ((phase_power % 4) + 4) % 4;
  return p;
}

PauliString PauliString::single(int n_qubits, Site site, Pauli p) {
  PauliString out(n_qubits);
  out.set(site, p);
  return out;
}

Pauli PauliString::letter(Site s) const {
  check_site(n_, s);
  return static_cast<Pauli>(letter_code(x_, z_, site_bit(n_, s)));
}

void PauliString::set(Site s, Pauli p) {
  check_site(n_, s);
  const std::uint64_t bit = std::uint64_t{1} << site_bit(n_, s);
  x_ &= ~bit;
  z_ &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x_ |= bit;
  if (p == Pauli::Z || p == Pauli::Y) z_ |= bit;
}

cplx PauliString::phase() const {
  static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPow[phase_];
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

std::vector<Site> PauliString::support() const {
  std::vector<Site> out;
  for (Site s = 0; s < n_; ++s) {
    if (((x_ | z_) >> site_bit(n_, s)) & 1U) out.push_back(s);
  }
  return out;
}

bool PauliString::acts_trivially_on(std::span<const Site> sites) const {
  for (Site s : sites) {
    if (letter(s) != Pauli::I) return false;
  }
  return true;
}

bool PauliString::commutes_with(const PauliString& o) const {
  return (std::popcount((x_ & o.z_) ^ (z_ & o.x_)) % 2) == 0;
}

PauliString PauliString::operator*(const PauliString& o) const {
  if (n_ != o.n_) throw QcoreError("Pauli string length mismatch");
  PauliString out(n_);
  out.x_ = x_ ^ o.x_;
  out.z_ = z_ ^ o.z_;
  int ph = phase_ + o.phase_;
  std::uint64_t both = (x_ | z_) & (o.x_ | o.z_);
  while (both) {
    const int b = std::countr_zero(both);
    both &= both - 1;
    const int a = letter_code(x_, z_, b);
    const int c = letter_code(o.x_, o.z_, b);
    if (a == c) continue;
    // X*Y = iZ, Y*Z = iX, Z*X = iY with codes X=1, Y=2, Z=3
    ph += ((c - a + 3) % 3 == 1) ? 1 : 3;
  }
  out.phase_ = ph % 4;
  return out;
}

PauliString PauliString::with_phase(int phase_power) const {
  PauliString out = *this;
  out.phase_ = ((phase_power % 4) + 4) % 4;
  return out;
}

void PauliString::apply(const Vec& in, Vec& out) const {
  const std::uint64_t dim = static_cast<std::uint64_t>(in.size());
  if (dim != (std::uint64_t{1} << n_)) throw QcoreError("vector length mismatch in Pauli apply");
  out.resize(in.size());
  const int ny = std::popcount(x_ & z_);
  static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx ph = kPow[(phase_ + ny) % 4];
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx v = (std::popcount(b & z_) & 1) ? -in[static_cast<Eigen::Index>(b)] : in[static_cast<Eigen::Index>(b)];
    out[static_cast<Eigen::Index>(b ^ x_)] = ph * v;
  }
}

Vec PauliString::apply(const Vec& in) const {
  Vec out;
  apply(in, out);
  return out;
}

cplx PauliString::expectation(const Vec& psi) const { return psi.dot(apply(psi)); }

Mat PauliString::dense() const {
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

std::string PauliString::to_string() const {
  static const char* kPh[4] = {"+", "+i", "-", "-i"};
  std::string s = kPh[phase_];
  for (Site q = 0; q < n_; ++q) s.push_back(pauli_char(letter(q)));
  return s;
}

// ------------------------------------------------------------------- PauliSum

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
  for (auto& t : terms) add(t.coef, t.string);
}

PauliSum PauliSum::from(const PauliString& s, cplx coef) {
  PauliSum out(s.n_qubits());
  out.add(coef, s);
  return out;
}

PauliSum PauliSum::from_dense(const Mat& m, int n_qubits) {
  if (m.rows() != (Eigen::Index{1} << n_qubits)) throw QcoreError("dense size mismatch");
  PauliSum out(n_qubits);
  const std::uint64_t count = std::uint64_t{1} << (2 * n_qubits);
  const double inv = 1.0 / static_cast<double>(m.rows());
  for (std::uint64_t code = 0; code < count; ++code) {
    PauliString p(n_qubits);
    std::uint64_t c = code;
    for (Site s = n_qubits - 1; s >= 0; --s) {
      p.set(s, static_cast<Pauli>(c & 3U));
      c >>= 2;
    }
    const cplx coef = (p.dense().adjoint() * m).trace() * inv;
    if (std::abs(coef) > 1e-15) out.add(coef, p);
  }
  return out;
}

void PauliSum::add(cplx coef, const PauliString& s) {
  if (n_ == 0) n_ = s.n_qubits();
  if (s.n_qubits() != n_) throw QcoreError("Pauli sum length mismatch");
  terms_.push_back({coef * s.phase(), s.dropped_phase()});
}

PauliSum& PauliSum::simplify(double eps) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index;
  std::vector<PauliTerm> merged;
  for (const auto& t : terms_) {
    const auto key = std::make_pair(t.string.x_mask(), t.string.z_mask());
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, merged.size());
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  terms_.clear();
  for (auto& t : merged) {
    if (std::abs(t.coef) > eps) terms_.push_back(t);
  }
  return *this;
}

PauliSum PauliSum::operator+(const PauliSum& o) const {
  PauliSum out = *this;
  if (out.n_ == 0) out.n_ = o.n_;
  for (const auto& t : o.terms_) out.add(t.coef, t.string);
  return out.simplify();
}

PauliSum PauliSum::operator-(const PauliSum& o) const { return *this + o * cplx(-1.0); }

PauliSum PauliSum::operator*(const PauliSum& o) const {
  PauliSum out(n_ ? n_ : o.n_);
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) out.add(a.coef * b.coef, a.string * b.string);
  }
  return out.simplify();
}

PauliSum PauliSum::operator*(cplx c) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coef *= c;
  return out;
}

PauliSum PauliSum::commutator(const PauliSum& o) const { return (*this * o) - (o * *this); }

PauliSum PauliSum::adjoint() const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coef = std::conj(t.coef);
  return out;
}

double PauliSum::norm1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coef);
  return s;
}

Vec PauliSum::apply(const Vec& in) const {
  Vec out = Vec::Zero(in.size());
  Vec tmp;
  for (const auto& t : terms_) {
    t.string.apply(in, tmp);
    out += t.coef * tmp;
  }
  return out;
}

cplx PauliSum::expectation(const Vec& psi) const { return psi.dot(apply(psi)); }

Mat PauliSum::dense() const {
  if (n_ > kMaxDenseSites) throw QcoreError("dense budget exceeded");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coef * t.string.dense();
  return m;
}

// -------------------------------------------------------------------- Schmidt

StateVector SchmidtPair::reconstruct(int n_qubits) const {
  Vec v = std::sqrt(p1) * insert_qubit(phi1, n_qubits, q_site, psi1);
  if (p2 > 0.0) v += std::sqrt(p2) * insert_qubit(phi2, n_qubits, q_site, psi2);
  return {n_qubits, std::move(v)};
}

Mat reshape_sites(const Vec& psi, int n, std::span<const Site> rows) {
  check_sites(n, rows);
  IndexSplit split(n, rows);
  const Eigen::Index dr = Eigen::Index{1} << rows.size();
  const Eigen::Index dc = psi.size() / dr;
  Mat m(dr, dc);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    m(static_cast<Eigen::Index>(split.row(idx)), static_cast<Eigen::Index>(split.rest(idx))) =
        psi[static_cast<Eigen::Index>(idx)];
  }
  return m;
}

Mat partial_trace_operator(const Mat& m, int n, std::span<const Site> keep) {
  check_sites(n, keep);
  if (m.rows() != (Eigen::Index{1} << n) || m.cols() != m.rows()) throw QcoreError("operator size mismatch");
  IndexSplit split(n, keep);
  const Eigen::Index dk = Eigen::Index{1} << keep.size();
  Mat out = Mat::Zero(dk, dk);
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(m.rows()); ++r) {
    const auto rr = split.rest(r);
    const auto kr = static_cast<Eigen::Index>(split.row(r));
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(m.cols()); ++c) {
      if (split.rest(c) != rr) continue;
      out(kr, static_cast<Eigen::Index>(split.row(c))) += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

DenseOperator partial_trace(const StateVector& state, std::span<const Site> keep) {
  const Mat m = reshape_sites(state.amplitudes(), state.n_qubits(), keep);
  return {std::vector<Site>(keep.begin(), keep.end()), m * m.adjoint()};
}

DenseOperator partial_trace(const StateVector& state, std::initializer_list<Site> keep) {
  return partial_trace(state, std::span<const Site>(keep.begin(), keep.size()));
}

Mat partial_trace_cross(const Vec& a, const Vec& b, int n, std::span<const Site> keep) {
  return reshape_sites(a, n, keep) * reshape_sites(b, n, keep).adjoint();
}

SchmidtPair schmidt_split(const StateVector& state, Site q) {
  const int n = state.n_qubits();
  check_site(n, q);
  if (n < 2) throw QcoreError("Schmidt split needs at least two qubits");
  const Site rows[1] = {q};
  const Mat m = reshape_sites(state.amplitudes(), n, rows);
  const Eigen::Matrix2cd rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
  SchmidtPair sp;
  sp.q_site = q;
  double l1 = std::max(es.eigenvalues()[1], 0.0);
  double l2 = std::max(es.eigenvalues()[0], 0.0);
  sp.psi1 = es.eigenvectors().col(1);
  sp.psi2 = es.eigenvectors().col(0);
  sp.phi1 = m.transpose() * sp.psi1.conjugate();
  sp.phi1 /= sp.phi1.norm();
  if (std::sqrt(l2) <= kSchmidtTol) {
    sp.rank = 1;
    sp.p1 = 1.0;
    sp.p2 = 0.0;
    // any unit vector orthogonal to phi1
    Vec e = Vec::Zero(sp.phi1.size());
    Eigen::Index pick = 0;
    sp.phi1.cwiseAbs().minCoeff(&pick);
    e[pick] = 1.0;
    e -= sp.phi1 * sp.phi1.dot(e);
    sp.phi2 = e / e.norm();
  } else {
    sp.rank = 2;
    const double tot = l1 + l2;
    sp.p1 = l1 / tot;
    sp.p2 = l2 / tot;
    sp.phi2 = m.transpose() * sp.psi2.conjugate();
    sp.phi2 /= sp.phi2.norm();
    sp.degenerate = std::abs(sp.p1 - sp.p2) < 1e-10;
  }
  return sp;
}

// ------------------------------------------------------------------ entropies

double purity(const DenseOperator& rho) {
  const Mat& m = rho.matrix();
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) throw QcoreError("density operator trace deviates from 1");
  return (m * m).trace().real();
}

double renyi2_entropy(const DenseOperator& rho) { return -std::log(purity(rho)); }

double von_neumann_entropy(const DenseOperator& rho) {
  const Mat& m = rho.matrix();
  if (std::abs(m.trace().real() - 1.0) > 1e-8) throw QcoreError("density operator trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-300) s -= l * std::log(l);
  }
  return std::max(s, 0.0);
}

cplx hs_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw QcoreError("dimension mismatch in hs_inner");
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

cplx hs_inner(const DenseOperator& a, const DenseOperator& b) { return hs_inner(a.matrix(), b.matrix()); }

PauliSum project_nontrivial(const PauliSum& op, std::span<const Site> sites) {
  PauliSum out(op.n_qubits());
  for (const auto& t : op.terms()) {
    if (!t.string.acts_trivially_on(sites)) out.add(t.coef, t.string);
  }
  return out;
}

// -------------------------------------------------------------------- helpers

Vec insert_qubit(const Vec& complement, int n, Site q, const Eigen::Vector2cd& local) {
  check_site(n, q);
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (complement.size() * 2 != dim) throw QcoreError("complement length mismatch");
  const int b = site_bit(n, q);
  const std::uint64_t low = (std::uint64_t{1} << b) - 1;
  Vec out(dim);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(dim); ++idx) {
    const std::uint64_t rest = ((idx >> (b + 1)) << b) | (idx & low);
    out[static_cast<Eigen::Index>(idx)] = local[static_cast<Eigen::Index>((idx >> b) & 1U)] * complement[static_cast<Eigen::Index>(rest)];
  }
  return out;
}

Vec contract_qubit(const Vec& psi, int n, Site q, const Eigen::Vector2cd& bra) {
  check_site(n, q);
  const int b = site_bit(n, q);
  const std::uint64_t low = (std::uint64_t{1} << b) - 1;
  Vec out = Vec::Zero(psi.size() / 2);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    const std::uint64_t rest = ((idx >> (b + 1)) << b) | (idx & low);
    out[static_cast<Eigen::Index>(rest)] += std::conj(bra[static_cast<Eigen::Index>((idx >> b) & 1U)]) * psi[static_cast<Eigen::Index>(idx)];
  }
  return out;
}

void apply_1q(Vec& psi, int n, Site s, const Eigen::Matrix2cd& u) {
  check_site(n, s);
  const std::uint64_t bit = std::uint64_t{1} << site_bit(n, s);
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(psi.size()); ++idx) {
    if (idx & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(idx);
    const auto i1 = static_cast<Eigen::Index>(idx | bit);
    const cplx a = psi[i0];
    const cplx b = psi[i1];
    psi[i0] = u(0, 0) * a + u(0, 1) * b;
    psi[i1] = u(1, 0) * a + u(1, 1) * b;
  }
}

Mat embed_operator(const Mat& local, std::span<const Site> support, int n) {
  check_sites(n, support);
  if (n > kMaxDenseSites) throw QcoreError("dense budget exceeded");
  if (local.rows() != (Eigen::Index{1} << support.size())) throw QcoreError("local operator size mismatch");
  IndexSplit split(n, support);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat out = Mat::Zero(dim, dim);
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(dim); ++r) {
    const auto rr = split.rest(r);
    const auto kr = static_cast<Eigen::Index>(split.row(r));
    for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(dim); ++c) {
      if (split.rest(c) != rr) continue;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = local(kr, static_cast<Eigen::Index>(split.row(c)));
    }
  }
  return out;
}

Vec random_gaussian_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im) / std::sqrt(2.0);
  }
  return v;
}

Mat haar_unitary(int dim, Rng& rng) {
  Mat z(dim, dim);
  for (int c = 0; c < dim; ++c) z.col(c) = random_gaussian_vector(dim, rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0.0) ? d / a : cplx(1.0);
  }
  return q;
}

Mat hs_random_density(int dim, Rng& rng) {
  Mat q(dim, dim);
  for (int c = 0; c < dim; ++c) q.col(c) = random_gaussian_vector(dim, rng);
  q /= q.norm();
  return q.adjoint() * q;
}

}  // namespace chronoscope
