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

#include "chronoscope/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace chronoscope {

namespace {

std::vector<Site> complement_of(int n, Site A) {
  std::vector<Site> out;
  for (Site s = 0; s < n; ++s) {
    if (s != A) out.push_back(s);
  }
  return out;
}

Eigen::Vector2cd unit(int i) {
  Eigen::Vector2cd e = Eigen::Vector2cd::Zero();
  e[i] = 1.0;
  return e;
}

// u^beta block: 1/2 sum_ij sigma^beta_ji Z_{(i a),(j b)} on an r-dim span.
Mat partial_pauli_block(const Mat& Z, Pauli beta, int r) {
  const Eigen::Matrix2cd& s = pauli_matrix(beta);
  Mat u = Mat::Zero(r, r);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (s(j, i) == 0.0) continue;
      u += 0.5 * s(j, i) * Z.block(i * r, j * r, r, r);
    }
  }
  return u;
}

// B(u, v) = tr(u rho v rho) - 1/2 tr(rho u) tr(rho v), rho = diag(p).
double bilinear(const Mat& u, const Mat& v, const Eigen::VectorXd& p) {
  cplx s = 0.0;
  cplx tu = 0.0;
  cplx tv = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    tu += p[a] * u(a, a);
    tv += p[a] * v(a, a);
    for (Eigen::Index b = 0; b < p.size(); ++b) s += u(a, b) * p[b] * v(b, a) * p[a];
  }
  return (s - 0.5 * tu * tv).real();
}

// Z_{(i a),(j b)} = <i phi_a| op |j phi_b>.
Mat compressed_matrix(const PauliSum& op, const std::vector<Vec>& w) {
  const auto m = static_cast<Eigen::Index>(w.size());
  std::vector<Vec> ow;
  ow.reserve(w.size());
  for (const auto& v : w) ow.push_back(op.apply(v));
  Mat z(m, m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = 0; q < m; ++q) z(p, q) = w[static_cast<std::size_t>(p)].dot(ow[static_cast<std::size_t>(q)]);
  }
  return z;
}

std::vector<Vec> schmidt_product_vectors(const SchmidtPair& sp, int n) {
  std::vector<Vec> w(4);
  for (int i = 0; i < 2; ++i) {
    w[static_cast<std::size_t>(2 * i)] = insert_qubit(sp.phi1, n, sp.q_site, unit(i));
    w[static_cast<std::size_t>(2 * i + 1)] = insert_qubit(sp.phi2, n, sp.q_site, unit(i));
  }
  return w;
}

Eigen::VectorXd schmidt_weights(const SchmidtPair& sp) {
  Eigen::VectorXd p(2);
  p << sp.p1, sp.p2;
  return p;
}

}  // namespace

const char* to_string(CiMethod m) {
  switch (m) {
    case CiMethod::kExact: return "exact-closed-form";
    case CiMethod::kMonteCarlo: return "monte-carlo";
    case CiMethod::kShortTime: return "short-time";
    case CiMethod::kResponse: return "response-tensor";
    case CiMethod::kDense: return "dense-four-trace";
  }
  return "unknown";
}

// ---------------------------------------------------------------------- Theta

ThetaOperator theta_from_weights(double p1, double p2, double d) {
  ThetaOperator th;
  th.d = d;
  th.p1 = p1;
  th.p2 = p2;
  const double p[2] = {p1, p2};
  th.matrix.setZero();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int e = 0; e < 2; ++e) {
          double v = 0.0;
          if (a == c && b == e) v += p[a] * p[b];
          if (c == e && a == b) v -= 0.5 * p[c] * p[a];
          th.matrix(2 * a + b, 2 * c + e) = d / 3.0 * v;
        }
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(th.matrix);
  th.eigenvalues = es.eigenvalues();
  th.eigenvectors = es.eigenvectors();
  return th;
}

ThetaOperator theta(const StateVector& state, Site A) {
  const SchmidtPair sp = schmidt_split(state, A);
  return theta_from_weights(sp.p1, sp.p2, static_cast<double>(state.dim()));
}

double ThetaOperator::quadratic_form(const Eigen::Matrix2cd& xi_block) const {
  Eigen::Vector4cd v;
  const double s = 1.0 / std::sqrt(d / 2.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) v[2 * a + b] = xi_block(a, b) * s;
  }
  return v.dot(matrix * v).real();
}

// ---------------------------------------------------------------------- gamma

void GammaOperator::finalize() {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(matrix);
  weights.clear();
  vectors.clear();
  for (int k = 0; k < 4; ++k) {
    weights.push_back(std::max(es.eigenvalues()[k], 0.0));
    vectors.emplace_back(es.eigenvectors().col(k));
  }
}

namespace {

GammaOperator gamma_from_gram(const Mat& G, double d) {
  const double s = 1.0 / std::sqrt(d / 2.0);
  GammaOperator g;
  for (Pauli beta : kNontrivial) {
    const Mat u = partial_pauli_block(G, beta, 2);
    Eigen::Vector4cd v;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) v[2 * a + b] = u(a, b) * s;
    }
    g.matrix += v * v.adjoint();
  }
  g.finalize();
  return g;
}

}  // namespace

GammaOperator gamma(const HeisenbergSector& sector, const Eigen::Matrix2cd& O_B, double d) {
  if (sector.rank() != 2) throw QcoreError("gamma needs a two-vector Schmidt basis");
  Mat G = Mat::Zero(4, 4);
  for (Pauli alpha : kNontrivial) {
    const cplx c = 0.5 * (pauli_matrix(alpha) * O_B).trace();
    if (c != 0.0) G += c * sector.gram(alpha);
  }
  return gamma_from_gram(G, d);
}

GammaOperator gamma(const StateVector& state, const Propagator& U, const Eigen::Matrix2cd& O_B, Site A, Site B,
                    double t) {
  const SchmidtPair sp = schmidt_split(state, A);
  HeisenbergSector sector(U, B, A, t, {sp.phi1, sp.phi2});
  return gamma(sector, O_B, static_cast<double>(state.dim()));
}

Mat gamma_pauli(const HamiltonianSpec& H, const Eigen::Matrix2cd& O_B, Site A, Site B, double t) {
  const int n = H.n_qubits();
  const int nc = n - 1;
  if (nc < 1 || nc > 5) throw QcoreError("gamma_pauli supports 2..6 qubits");
  std::array<Mat, 3> u;
  for (auto& m : u) m = Mat::Zero(Eigen::Index{1} << nc, Eigen::Index{1} << nc);
  for (Pauli alpha : kNontrivial) {
    const cplx c = 0.5 * (pauli_matrix(alpha) * O_B).trace();
    if (c == 0.0) continue;
    const SiteDecomposition dec = heisenberg_site_decomposition(H, alpha, B, A, t);
    for (int beta = 0; beta < 3; ++beta) u[static_cast<std::size_t>(beta)] += c * dec.nu[static_cast<std::size_t>(beta)];
  }
  const std::uint64_t count = std::uint64_t{1} << (2 * nc);
  const double dc = static_cast<double>(Eigen::Index{1} << nc);
  Mat coeff(static_cast<Eigen::Index>(count), 3);
  for (std::uint64_t code = 0; code < count; ++code) {
    PauliString p(nc);
    std::uint64_t c = code;
    for (Site s = nc - 1; s >= 0; --s) {
      p.set(s, static_cast<Pauli>(c & 3U));
      c >>= 2;
    }
    const Mat pd = p.dense();
    for (int beta = 0; beta < 3; ++beta) {
      coeff(static_cast<Eigen::Index>(code), beta) = (pd.adjoint() * u[static_cast<std::size_t>(beta)]).trace() / dc;
    }
  }
  return coeff * coeff.adjoint();
}

double spectral_overlap(const ThetaOperator& th, const GammaOperator& g) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double lam = th.eigenvalues[k];
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      s += lam * g.weights[l] * std::norm(th.eigenvectors.col(k).dot(g.vectors[l]));
    }
  }
  return s;
}

// ------------------------------------------------------------------- CI exact

EvolvedSchmidt evolve_schmidt(const StateVector& state, Site A, const Propagator& U, double tau) {
  EvolvedSchmidt ev;
  ev.n_qubits = state.n_qubits();
  ev.A = A;
  ev.tau = tau;
  ev.schmidt = schmidt_split(state, A);
  ev.evolved = schmidt_product_vectors(ev.schmidt, ev.n_qubits);
  for (auto& v : ev.evolved) v = U.apply(v, tau);
  return ev;
}

double ci_single_observable(const Mat& X, const Eigen::VectorXd& p) {
  const auto r = p.size();
  Mat Y = X;
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index a = 0; a < r; ++a) Y.col(i * r + a) *= p[a];
  }
  const cplx t_yy = (Y * Y).trace();
  Eigen::Matrix2cd yc = Eigen::Matrix2cd::Zero();
  Mat ya = Mat::Zero(r, r);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      for (Eigen::Index a = 0; a < r; ++a) yc(i, j) += Y(i * r + a, j * r + a);
    }
    ya += Y.block(i * r, i * r, r, r);
  }
  const cplx ty = Y.trace();
  const cplx v = t_yy - 0.5 * (yc * yc).trace() - 0.5 * (ya * ya).trace() + 0.25 * ty * ty;
  return v.real() / 3.0;
}

CiValue ci_from_sector(const HeisenbergSector& sector, double p1, double p2, double d) {
  Eigen::VectorXd p(2);
  p << p1, p2;
  const ThetaOperator th = theta_from_weights(p1, p2, d);
  CiValue out;
  out.method = CiMethod::kExact;
  for (Pauli alpha : kNontrivial) {
    out.value += ci_single_observable(sector.gram(alpha), p);
    out.spectral += spectral_overlap(th, gamma_from_gram(sector.gram(alpha), d));
  }
  out.value /= 20.0;
  out.spectral /= 20.0;
  return out;
}

CiValue ci_from_evolved(const EvolvedSchmidt& ev, Site B) {
  const HeisenbergSector sector(ev.n_qubits, B, ev.evolved, 2);
  return ci_from_sector(sector, ev.schmidt.p1, ev.schmidt.p2, std::ldexp(1.0, ev.n_qubits));
}

CiValue ci_exact(const StateVector& state, const Propagator& U, Site A, Site B, double t) {
  if (B < 0 || B >= state.n_qubits()) throw QcoreError("site index out of range");
  return ci_from_evolved(evolve_schmidt(state, A, U, t), B);
}

CiValue ci_exact(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double t) {
  return ci_exact(state, Propagator(H), A, B, t);
}

CiValue ci_four_trace_dense(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double t) {
  const int n = state.n_qubits();
  if (n > kMaxDenseHeisenberg) throw QcoreError("dense budget exceeded");
  const std::vector<Site> comp = complement_of(n, A);
  const DenseOperator rho_c = partial_trace(state, comp);
  const Mat R = embed_operator(rho_c.matrix(), comp, n);
  const Site keep_a[1] = {A};
  CiValue out;
  out.method = CiMethod::kDense;
  for (Pauli alpha : kNontrivial) {
    const Mat Y = heisenberg_dense(H, alpha, B, t) * R;
    const Mat yc = partial_trace_operator(Y, n, keep_a);
    const Mat ya = partial_trace_operator(Y, n, comp);
    const cplx ty = Y.trace();
    const cplx v = (Y * Y).trace() - 0.5 * (yc * yc).trace() - 0.5 * (ya * ya).trace() + 0.25 * ty * ty;
    out.value += v.real() / 3.0;
  }
  out.value /= 20.0;
  return out;
}

// ----------------------------------------------------------- response tensor

double haar_moment4(int d, int i1, int j1, int i2, int j2, int k1, int l1, int k2, int l2) {
  const double dd = d;
  const double wg_e = 1.0 / (dd * dd - 1.0);
  const double wg_s = -1.0 / (dd * (dd * dd - 1.0));
  double s = 0.0;
  for (int sigma = 0; sigma < 2; ++sigma) {
    const bool row = sigma == 0 ? (i1 == k1 && i2 == k2) : (i1 == k2 && i2 == k1);
    if (!row) continue;
    for (int tau = 0; tau < 2; ++tau) {
      const bool col = tau == 0 ? (j1 == l1 && j2 == l2) : (j1 == l2 && j2 == l1);
      if (!col) continue;
      s += sigma == tau ? wg_e : wg_s;
    }
  }
  return s;
}

Mat hs_random_observable(int D, Rng& rng) { return hs_random_density(D, rng); }

ChannelResponse::ChannelResponse(std::vector<Mat> blocks, int d_source, int d_embed)
    : d_(d_source), T_(std::move(blocks)) {
  const auto n = static_cast<std::size_t>(d_ * d_);
  if (d_ < 2 || T_.size() != n * n) throw QcoreError("channel response needs d^4 blocks");
  m_ = static_cast<int>(T_.front().rows());
  D_ = d_embed > 0 ? d_embed : m_;
  if (D_ < m_) throw QcoreError("embedding dimension smaller than the blocks");
  for (const auto& t : T_) {
    if (t.rows() != m_ || t.cols() != m_) throw QcoreError("inconsistent block shapes");
  }
}

Mat ChannelResponse::output(const Mat& V) const {
  const int m = d_ * d_;
  Mat out = Mat::Zero(m_, m_);
  for (int p = 0; p < m; ++p) {
    const cplx vp = V(p / d_, p % d_);
    if (vp == 0.0) continue;
    for (int q = 0; q < m; ++q) {
      const cplx c = vp * std::conj(V(q / d_, q % d_));
      if (c != 0.0) out += c * block(p, q);
    }
  }
  return out;
}

Mat ChannelResponse::mean_output() const {
  Mat m = Mat::Zero(m_, m_);
  for (int p = 0; p < d_ * d_; ++p) m += block(p, p);
  return m / static_cast<double>(d_);
}

namespace {

cplx trace_product(const Mat& a, const Mat& b) { return a.transpose().cwiseProduct(b).sum(); }

// sum over Haar second moments E[V_p1 V_p2 V*_q1 V*_q2] f(p1, q1, p2, q2).
template <typename Pair>
double weingarten_sum(int d, Pair&& pair) {
  double s = 0.0;
  const double dd = d;
  const double wg_e = 1.0 / (dd * dd - 1.0);
  const double wg_s = -1.0 / (dd * (dd * dd - 1.0));
  for (int i1 = 0; i1 < d; ++i1) {
    for (int i2 = 0; i2 < d; ++i2) {
      for (int j1 = 0; j1 < d; ++j1) {
        for (int j2 = 0; j2 < d; ++j2) {
          for (int sigma = 0; sigma < 2; ++sigma) {
            const int k1 = sigma == 0 ? i1 : i2;
            const int k2 = sigma == 0 ? i2 : i1;
            for (int tau = 0; tau < 2; ++tau) {
              const int l1 = tau == 0 ? j1 : j2;
              const int l2 = tau == 0 ? j2 : j1;
              const double w = sigma == tau ? wg_e : wg_s;
              s += w * pair(i1 * d + j1, k1 * d + l1, i2 * d + j2, k2 * d + l2);
            }
          }
        }
      }
    }
  }
  return s;
}

}  // namespace

double ChannelResponse::ci_exact() const {
  const int m = d_ * d_;
  Mat g(m, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) g(p, q) = block(p, q).trace();
  }
  const double e_tr2 = weingarten_sum(d_, [&](int p1, int q1, int p2, int q2) { return (g(p1, q1) * g(p2, q2)).real(); });
  const double e_trsq = weingarten_sum(d_, [&](int p1, int q1, int p2, int q2) {
    return trace_product(block(p1, q1), block(p2, q2)).real();
  });
  const Mat E = mean_output();
  const double tr_e = E.trace().real();
  const double tr_e2 = trace_product(E, E).real();
  const auto mc = MomentCoefficients::of(D_);
  return mc.a * (e_tr2 - tr_e * tr_e) + mc.b * (e_trsq - tr_e2);
}

double ChannelResponse::variance_exact(const Mat& O) const {
  if (O.rows() != D_ || O.cols() != D_) throw QcoreError("observable dimension mismatch");
  const Mat Oc = O.topLeftCorner(m_, m_);
  const int m = d_ * d_;
  Mat f(m, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) f(p, q) = trace_product(Oc, block(p, q));
  }
  const double mean = trace_product(Oc, mean_output()).real();
  const double second = weingarten_sum(d_, [&](int p1, int q1, int p2, int q2) { return (f(p1, q1) * f(p2, q2)).real(); });
  return second - mean * mean;
}

CiValue ChannelResponse::ci_monte_carlo(long n_samples, std::uint64_t seed, const std::optional<Mat>& fixed) const {
  if (n_samples < 100) throw QcoreError("Monte Carlo needs at least 100 samples");
  constexpr int kBatches = 100;
  std::vector<double> sums(kBatches, 0.0);
  std::vector<long> counts(kBatches, 0);
  for (int b = 0; b < kBatches; ++b) {
    counts[static_cast<std::size_t>(b)] = n_samples / kBatches + (b < n_samples % kBatches ? 1 : 0);
  }
  parallel_for(kBatches, [&](std::size_t b) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(b)};
    Rng rng(ss);
    double s = 0.0;
    for (long k = 0; k < counts[b]; ++k) {
      const Mat O = (fixed ? *fixed : hs_random_observable(D_, rng)).topLeftCorner(m_, m_);
      const Mat V1 = haar_unitary(d_, rng);
      const Mat V2 = haar_unitary(d_, rng);
      const double f1 = trace_product(O, output(V1)).real();
      const double f2 = trace_product(O, output(V2)).real();
      s += 0.5 * (f1 - f2) * (f1 - f2);
    }
    sums[b] = s;
  });
  CiValue out;
  out.method = CiMethod::kMonteCarlo;
  out.value = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(n_samples);
  double var = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    const double m = sums[static_cast<std::size_t>(b)] / static_cast<double>(counts[static_cast<std::size_t>(b)]);
    var += (m - out.value) * (m - out.value);
  }
  var /= (kBatches - 1);
  out.std_error = std::sqrt(var / kBatches);
  return out;
}

ResponseTensor::ResponseTensor(std::vector<Mat> features, int d_source) : dA_(d_source), F_(std::move(features)) {
  if (F_.size() != static_cast<std::size_t>(dA_ * dA_)) throw QcoreError("response tensor needs d_A^2 features");
  D_ = static_cast<int>(F_.front().rows());
  for (const auto& f : F_) {
    if (f.rows() != D_ || f.cols() != F_.front().cols()) throw QcoreError("inconsistent feature shapes");
  }
}

Mat ResponseTensor::response(const Mat& V) const {
  Mat M = Mat::Zero(D_, F_.front().cols());
  for (int i = 0; i < dA_; ++i) {
    for (int j = 0; j < dA_; ++j) M += V(i, j) * F_[static_cast<std::size_t>(i * dA_ + j)];
  }
  return M * M.adjoint();
}

ChannelResponse ResponseTensor::channel() const {
  const auto nf = F_.size();
  std::vector<Mat> T(nf * nf);
  for (std::size_t p = 0; p < nf; ++p) {
    for (std::size_t q = 0; q < nf; ++q) T[p * nf + q] = F_[p] * F_[q].adjoint();
  }
  return {std::move(T), dA_};
}

double ResponseTensor::ci_exact() const { return channel().ci_exact(); }

double ResponseTensor::variance_exact(const Mat& O) const { return channel().variance_exact(O); }

CiValue ResponseTensor::ci_monte_carlo(long n_samples, std::uint64_t seed, const std::optional<Mat>& fixed) const {
  return channel().ci_monte_carlo(n_samples, seed, fixed);
}

ResponseTensor response_tensor(const StateVector& state, const Propagator& U, Site A, Site B, double t) {
  const int n = state.n_qubits();
  std::vector<Mat> feats(4);
  const Site rows[1] = {B};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Vec a = insert_qubit(contract_qubit(state.amplitudes(), n, A, unit(j)), n, A, unit(i));
      feats[static_cast<std::size_t>(2 * i + j)] = reshape_sites(U.apply(a, t), n, rows);
    }
  }
  return {std::move(feats), 2};
}

CiValue ci_response(const StateVector& state, const Propagator& U, Site A, Site B, double t) {
  CiValue out;
  out.method = CiMethod::kResponse;
  out.value = response_tensor(state, U, A, B, t).ci_exact();
  return out;
}

CiValue ci_monte_carlo(const StateVector& state, const Propagator& U, Site A, Site B, double t, long n_samples,
                       std::uint64_t seed) {
  return response_tensor(state, U, A, B, t).ci_monte_carlo(n_samples, seed);
}

// ----------------------------------------------------------------- short time

ShortTimeSame short_time_same_coefficients(const StateVector& state, const HamiltonianSpec& H, Site A) {
  const int n = state.n_qubits();
  const SchmidtPair sp = schmidt_split(state, A);
  const Eigen::VectorXd p = schmidt_weights(sp);
  const std::vector<Vec> w = schmidt_product_vectors(sp, n);
  const PauliSum h = H.as_sum();
  const Mat id = Mat::Identity(2, 2);
  ShortTimeSame out;
  for (Pauli alpha : kNontrivial) {
    const PauliSum s = PauliSum::from(PauliString::single(n, A, alpha));
    const PauliSum c1 = h.commutator(s) * kI;
    const PauliSum c2 = h.commutator(h.commutator(s)) * cplx(-0.5);
    const Mat z1 = compressed_matrix(c1, w);
    const Mat z2 = compressed_matrix(c2, w);
    for (Pauli beta : kNontrivial) {
      const Mat u0 = beta == alpha ? id : Mat(Mat::Zero(2, 2));
      const Mat u1 = partial_pauli_block(z1, beta, 2);
      const Mat u2 = partial_pauli_block(z2, beta, 2);
      out.c0 += bilinear(u0, u0, p);
      out.c1 += 2.0 * bilinear(u0, u1, p);
      out.c2 += bilinear(u1, u1, p) + 2.0 * bilinear(u0, u2, p);
    }
  }
  out.c0 /= 30.0;
  out.c1 /= 30.0;
  out.c2 /= 30.0;
  return out;
}

CiValue ci_short_time_same(const StateVector& state, const HamiltonianSpec& H, Site A, double dt) {
  CiValue out;
  out.method = CiMethod::kShortTime;
  out.value = short_time_same_coefficients(state, H, A).at(dt);
  return out;
}

ShortTimeDiff short_time_diff_coefficient(const StateVector& state, const HamiltonianSpec& H, Site A, Site B,
                                          bool force_general) {
  const int n = state.n_qubits();
  if (A == B) throw QcoreError("short-time different-site form needs A != B");
  const Site sa[1] = {A};
  const Site sb[1] = {B};
  const HamiltonianSpec W = H.restricted_to_touching(sa, sb);
  bool local = true;
  for (const auto& t : W.terms()) {
    for (Site s : t.string.support()) {
      if (s != A && s != B) local = false;
    }
  }
  ShortTimeDiff out;
  out.simplified = local && !force_general;
  if (W.empty()) return out;

  if (out.simplified) {
    // Only rho_AB enters: operators on (A, B) with A the high bit.
    const Site ab[2] = {A, B};
    const Mat rho_ab = partial_trace(state, ab).matrix();
    Mat w_loc = Mat::Zero(4, 4);
    for (const auto& t : W.terms()) {
      PauliString two(2);
      two.set(0, t.string.letter(A));
      two.set(1, t.string.letter(B));
      w_loc += t.coef * two.dense();
    }
    Eigen::Matrix2cd rho_b = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a) rho_b += rho_ab.block(2 * a, 2 * a, 2, 2);
    // tr(rho_AB (E x X)) with E = |r><c|
    auto expect = [&](int r, int c, const Eigen::Matrix2cd& X) {
      return (rho_ab.block(2 * c, 2 * r, 2, 2) * X).trace();
    };
    for (Pauli alpha : kNontrivial) {
      Mat sb_full = Mat::Zero(4, 4);
      sb_full.block(0, 0, 2, 2) = pauli_matrix(alpha);
      sb_full.block(2, 2, 2, 2) = pauli_matrix(alpha);
      const Mat C = kI * (w_loc * sb_full - sb_full * w_loc);
      for (Pauli beta : kNontrivial) {
        const Eigen::Matrix2cd& sbeta = pauli_matrix(beta);
        Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
        for (int a = 0; a < 2; ++a) {
          for (int a2 = 0; a2 < 2; ++a2) {
            if (sbeta(a2, a) == 0.0) continue;
            w += 0.5 * sbeta(a2, a) * C.block(2 * a, 2 * a2, 2, 2);
          }
        }
        cplx cross = 0.0;
        for (int a = 0; a < 2; ++a) {
          for (int a2 = 0; a2 < 2; ++a2) cross += expect(a2, a, w) * expect(a, a2, w);
        }
        const cplx tb = (rho_b * w).trace();
        out.c2 += (cross - 0.5 * tb * tb).real();
      }
    }
  } else {
    const SchmidtPair sp = schmidt_split(state, A);
    const Eigen::VectorXd p = schmidt_weights(sp);
    const std::vector<Vec> w = schmidt_product_vectors(sp, n);
    const PauliSum wsum = W.as_sum();
    for (Pauli alpha : kNontrivial) {
      const PauliSum c = wsum.commutator(PauliSum::from(PauliString::single(n, B, alpha))) * kI;
      const Mat z = compressed_matrix(c, w);
      for (Pauli beta : kNontrivial) {
        const Mat u = partial_pauli_block(z, beta, 2);
        out.c2 += bilinear(u, u, p);
      }
    }
  }
  out.c2 /= 30.0;
  return out;
}

CiValue ci_short_time_diff(const StateVector& state, const HamiltonianSpec& H, Site A, Site B, double dt) {
  CiValue out;
  out.method = CiMethod::kShortTime;
  out.value = short_time_diff_coefficient(state, H, A, B).c2 * dt * dt;
  return out;
}

}  // namespace chronoscope
