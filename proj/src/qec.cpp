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


#include "chronoscope/qec.hpp"

#include "chronoscope/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace chronoscope {

namespace {

constexpr int kMaxEncoderQubits = 16;
constexpr double kLeakageTol = 1e-10;

Pauli pauli_of(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw QecError(std::string("bad Pauli letter ") + c);
  }
}

PauliString placed(int n, Site offset, std::string_view letters) {
  PauliString s(n);
  for (std::size_t i = 0; i < letters.size(); ++i) s.set(offset + static_cast<Site>(i), pauli_of(letters[i]));
  return s;
}

PauliString restrict_to(const PauliString& O, const std::vector<Site>& sites) {
  PauliString r(O.n_qubits());
  for (Site s : sites) r.set(s, O.letter(s));
  return r;
}

std::uint64_t local_syndrome(const StabilizerCode& code, const CodeBlock& b, std::uint64_t syndrome) {
  std::uint64_t local = 0;
  for (std::size_t g = 0; g < b.generators.size(); ++g) {
    if ((syndrome >> b.generators[g]) & 1U) local |= std::uint64_t{1} << g;
  }
  (void)code;
  return local;
}

std::vector<Site> block_support(const StabilizerCode& code, const CodeBlock& b) {
  std::set<Site> s;
  for (int g : b.generators) {
    for (Site x : code.generators()[static_cast<std::size_t>(g)].support()) s.insert(x);
  }
  return {s.begin(), s.end()};
}

// Lowest-weight representative per local syndrome; within a weight, sites in
// lexicographic order and letters in the order Z, X, Y.
std::vector<PauliString> decoding_table(int n, const std::vector<PauliString>& gens, const std::vector<Site>& sites) {
  const std::size_t n_s = std::size_t{1} << gens.size();
  std::vector<PauliString> table(n_s);
  std::vector<bool> filled(n_s, false);
  std::size_t count = 0;
  auto offer = [&](const PauliString& e) {
    std::uint64_t s = 0;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (!gens[g].commutes_with(e)) s |= std::uint64_t{1} << g;
    }
    if (!filled[s]) {
      filled[s] = true;
      table[s] = e;
      ++count;
    }
  };
  offer(PauliString(n));
  constexpr Pauli kOrder[3] = {Pauli::Z, Pauli::X, Pauli::Y};
  const int m = static_cast<int>(sites.size());
  for (int w = 1; w <= m && count < n_s; ++w) {
    std::vector<int> pick(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) pick[static_cast<std::size_t>(i)] = i;
    for (;;) {
      int letters_total = 1;
      for (int i = 0; i < w; ++i) letters_total *= 3;
      for (int code = 0; code < letters_total; ++code) {
        PauliString e(n);
        int c = code;
        for (int i = w - 1; i >= 0; --i) {
          e.set(sites[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])], kOrder[c % 3]);
          c /= 3;
        }
        offer(e);
      }
      int i = w - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - w + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < w; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  if (count < n_s) throw QecError("decoding table incomplete");
  return table;
}

PauliSum identity_sum(int n) { return PauliSum::from(PauliString(n)); }

PauliSum block_projector(const StabilizerCode& code, const CodeBlock& b, std::uint64_t local) {
  const int n = code.n_qubits();
  PauliSum P = identity_sum(n);
  for (std::size_t g = 0; g < b.generators.size(); ++g) {
    const double sign = ((local >> g) & 1U) ? -0.5 : 0.5;
    P = P * (identity_sum(n) * 0.5 + PauliSum::from(code.generators()[static_cast<std::size_t>(b.generators[g])], sign));
    P.simplify();
  }
  return P;
}

PauliSum block_adjoint(const StabilizerCode& code, const CodeBlock& b, const PauliString& O, AdjointForm form) {
  const int n = code.n_qubits();
  const PauliSum o = PauliSum::from(O);
  PauliSum acc(n);
  for (std::uint64_t s = 0; s < b.errors.size(); ++s) {
    const PauliString& E = b.errors[s];
    if (form == AdjointForm::kDefinition) {
      const PauliSum P = block_projector(code, b, s);
      const PauliSum e = PauliSum::from(E);
      acc = acc + P * e.adjoint() * o * e * P;
    } else if (!E.commutes_with(O)) {
      acc = acc + block_projector(code, b, s);
    }
    acc.simplify();
  }
  if (form == AdjointForm::kDefinition) return acc;
  PauliSum out = o * (identity_sum(n) - acc * 2.0);
  out.simplify();
  return out;
}

Vec kron(const Vec& hi, const Vec& lo) {
  Vec out(hi.size() * lo.size());
  for (Eigen::Index i = 0; i < hi.size(); ++i) out.segment(i * lo.size(), lo.size()) = hi[i] * lo;
  return out;
}

Vec qubit(cplx a, cplx b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec random_logical(int k, std::uint64_t seed) {
  Rng rng(seed);
  return StateVector::random(k, rng).amplitudes();
}

}  // namespace

// ----------------------------------------------------------------- codes

StabilizerCode::StabilizerCode(std::string name, int n_qubits, std::vector<PauliString> generators,
                               std::vector<PauliString> logical_x, std::vector<PauliString> logical_z,
                               std::vector<CodeBlock> blocks)
    : name_(std::move(name)),
      n_(n_qubits),
      gens_(std::move(generators)),
      lx_(std::move(logical_x)),
      lz_(std::move(logical_z)),
      blocks_(std::move(blocks)) {
  validate();
  build_encoder();
}

void StabilizerCode::validate() const {
  if (n_ < 1 || n_ > kMaxEncoderQubits) throw QecError("code size out of range");
  if (lx_.empty() || lx_.size() != lz_.size()) throw QecError("logical operators missing");
  if (gens_.size() + lx_.size() != static_cast<std::size_t>(n_)) throw QecError("need n - k generators");
  auto check_n = [&](const PauliString& p) {
    if (p.n_qubits() != n_) throw QecError("operator size mismatch");
  };
  for (std::size_t a = 0; a < gens_.size(); ++a) {
    check_n(gens_[a]);
    if (gens_[a].phase_power() % 2 != 0) throw QecError("generator not Hermitian");
    for (std::size_t b = 0; b < a; ++b) {
      if (!gens_[a].commutes_with(gens_[b])) throw QecError("generators do not commute");
    }
  }
  for (std::size_t i = 0; i < lx_.size(); ++i) {
    check_n(lx_[i]);
    check_n(lz_[i]);
    if (!is_logical(lx_[i]) || !is_logical(lz_[i])) throw QecError("logical operator anticommutes with a generator");
    for (std::size_t j = 0; j < lx_.size(); ++j) {
      if (lx_[i].commutes_with(lz_[j]) == (i == j)) throw QecError("logical X/Z pairing broken");
      if (!lx_[i].commutes_with(lx_[j]) || !lz_[i].commutes_with(lz_[j])) throw QecError("logicals do not commute");
    }
  }
  std::vector<int> seen(gens_.size(), 0);
  for (const auto& b : blocks_) {
    for (int g : b.generators) {
      if (g < 0 || g >= n_generators()) throw QecError("block generator index out of range");
      ++seen[static_cast<std::size_t>(g)];
    }
    if (!b.errors.empty() && b.errors.size() != (std::size_t{1} << b.generators.size())) {
      throw QecError("block table size mismatch");
    }
    for (std::uint64_t s = 0; s < b.errors.size(); ++s) {
      std::uint64_t expect = 0;
      for (std::size_t g = 0; g < b.generators.size(); ++g) {
        if ((s >> g) & 1U) expect |= std::uint64_t{1} << b.generators[g];
      }
      if (syndrome_of(b.errors[s]) != expect) throw QecError("table entry has the wrong syndrome");
    }
  }
  for (int c : seen) {
    if (c != 1) throw QecError("blocks must partition the generators");
  }
}

void StabilizerCode::build_encoder() {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  auto project = [&](Vec v) {
    for (const auto& g : gens_) v = 0.5 * (v + g.apply(v));
    for (const auto& z : lz_) v = 0.5 * (v + z.apply(v));
    return v;
  };
  Vec zero = project(StateVector::basis(n_, 0).amplitudes());
  Rng rng(1);
  for (int attempt = 0; zero.norm() < 1e-6; ++attempt) {
    if (attempt > 16) throw QecError("could not find a code vector");
    zero = project(random_gaussian_vector(dim, rng));
  }
  Eigen::Index top = 0;
  zero.cwiseAbs().maxCoeff(&top);
  zero *= std::conj(zero[top]) / std::abs(zero[top]);
  zero.normalize();
  const int kk = k();
  enc_.resize(dim, Eigen::Index{1} << kk);
  for (Eigen::Index b = 0; b < enc_.cols(); ++b) {
    Vec v = zero;
    for (int j = 0; j < kk; ++j) {
      if ((b >> (kk - 1 - j)) & 1) v = lx_[static_cast<std::size_t>(j)].apply(v);
    }
    enc_.col(b) = v;
  }
  if (!corrects()) return;
  distance3_ = true;
  for (Site s = 0; s < n_ && distance3_; ++s) {
    for (Pauli p : kNontrivial) {
      const PauliString E = PauliString::single(n_, s, p);
      const PauliString F = error_for(syndrome_of(E)) * E;
      Mat m(enc_.cols(), enc_.cols());
      for (Eigen::Index c = 0; c < enc_.cols(); ++c) m.col(c) = enc_.adjoint() * F.apply(Vec(enc_.col(c)));
      const cplx lam = m(0, 0);
      if (std::abs(std::abs(lam) - 1.0) > 1e-9 || (m - lam * Mat::Identity(m.rows(), m.cols())).norm() > 1e-9) {
        distance3_ = false;
        break;
      }
    }
  }
}

bool StabilizerCode::corrects() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const CodeBlock& b) { return !b.errors.empty(); });
}

std::uint64_t StabilizerCode::syndrome_of(const PauliString& E) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < gens_.size(); ++g) {
    if (!gens_[g].commutes_with(E)) s |= std::uint64_t{1} << g;
  }
  return s;
}

PauliString StabilizerCode::error_for(std::uint64_t syndrome) const {
  if (syndrome >= n_syndromes()) throw QecError("syndrome out of range");
  PauliString out(n_);
  for (const auto& b : blocks_) {
    if (b.errors.empty()) throw QecError("code " + name_ + " has no decoding table");
    out = out * b.errors[local_syndrome(*this, b, syndrome)];
  }
  return out;
}

PauliString StabilizerCode::logical(Pauli alpha, int j) const {
  if (j < 0 || j >= k()) throw QecError("logical qubit out of range");
  const auto& x = lx_[static_cast<std::size_t>(j)];
  const auto& z = lz_[static_cast<std::size_t>(j)];
  switch (alpha) {
    case Pauli::I: return PauliString(n_);
    case Pauli::X: return x;
    case Pauli::Z: return z;
    case Pauli::Y: {
      const PauliString xz = x * z;
      return xz.with_phase(xz.phase_power() + 1);
    }
  }
  return PauliString(n_);
}

bool StabilizerCode::is_logical(const PauliString& O) const {
  if (O.n_qubits() != n_) return false;
  return std::all_of(gens_.begin(), gens_.end(), [&](const PauliString& g) { return g.commutes_with(O); });
}

StateVector StabilizerCode::encode(const Vec& logical) const {
  if (logical.size() != enc_.cols()) throw QecError("logical vector has the wrong dimension");
  return {n_, enc_ * logical};
}

double StabilizerCode::codespace_leakage(const Vec& psi) const {
  if (psi.size() != enc_.rows()) throw QecError("state has the wrong dimension");
  return (psi - enc_ * (enc_.adjoint() * psi)).norm();
}

Vec StabilizerCode::project_syndrome(std::uint64_t syndrome, const Vec& psi) const {
  Vec v = psi;
  for (std::size_t g = 0; g < gens_.size(); ++g) {
    const double sign = ((syndrome >> g) & 1U) ? -1.0 : 1.0;
    v = 0.5 * (v + sign * gens_[g].apply(v));
  }
  return v;
}

StabilizerCode five_qubit_blocks(int k) {
  if (k < 1 || 5 * k > kMaxEncoderQubits) throw QecError("five-qubit blocks need 1 <= k <= 3");
  const int n = 5 * k;
  static constexpr std::string_view kGens[4] = {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"};
  std::vector<PauliString> gens;
  std::vector<PauliString> lx;
  std::vector<PauliString> lz;
  std::vector<CodeBlock> blocks;
  for (int j = 0; j < k; ++j) {
    const Site o = 5 * j;
    CodeBlock b;
    std::vector<PauliString> local;
    for (auto g : kGens) {
      b.generators.push_back(static_cast<int>(gens.size()));
      gens.push_back(placed(n, o, g));
      local.push_back(gens.back());
    }
    b.errors = decoding_table(n, local, {o, o + 1, o + 2, o + 3, o + 4});
    blocks.push_back(std::move(b));
    lx.push_back(placed(n, o, "XIYYI"));
    lz.push_back(placed(n, o, "ZYIIY"));
  }
  return {"five-qubit-blocks(" + std::to_string(k) + ")", n, gens, lx, lz, blocks};
}

StabilizerCode repetition_x(int n) {
  if (n < 2 || n > 12) throw QecError("repetition code needs 2 <= n <= 12");
  std::vector<PauliString> gens;
  CodeBlock b;
  for (Site i = 0; i + 1 < n; ++i) {
    b.generators.push_back(static_cast<int>(gens.size()));
    gens.push_back(placed(n, i, "XX"));
  }
  std::vector<Site> sites(static_cast<std::size_t>(n));
  for (Site i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = i;
  b.errors = decoding_table(n, gens, sites);
  PauliString zl(n);
  PauliString xl(n);
  for (Site i = 0; i < n; ++i) {
    zl.set(i, Pauli::X);
    xl.set(i, Pauli::Z);
  }
  return {"repetition-X(" + std::to_string(n) + ")", n, gens, {xl}, {zl}, {b}};
}

StabilizerCode iceberg(int k) {
  if (k < 2 || k % 2 != 0) throw QecError("iceberg code needs an even k >= 2");
  const int n = k + 2;
  const Site h = k;
  const Site v = k + 1;
  PauliString xs(n);
  PauliString zs(n);
  for (Site i = 0; i < n; ++i) {
    xs.set(i, Pauli::X);
    zs.set(i, Pauli::Z);
  }
  std::vector<PauliString> lx;
  std::vector<PauliString> lz;
  for (Site j = 0; j < k; ++j) {
    PauliString x(n);
    x.set(j, Pauli::X);
    x.set(h, Pauli::X);
    PauliString z(n);
    z.set(j, Pauli::Z);
    z.set(v, Pauli::Z);
    lx.push_back(x);
    lz.push_back(z);
  }
  CodeBlock b;
  b.generators = {0, 1};
  return {"iceberg(" + std::to_string(k) + ")", n, {xs, zs}, lx, lz, {b}};
}

HamiltonianSpec logical_xx_hamiltonian(const StabilizerCode& code, double h_z) {
  HamiltonianSpec H(code.n_qubits());
  for (int j = 0; j + 1 < code.k(); ++j) H.add(1.0, code.logical_x(j) * code.logical_x(j + 1));
  if (h_z != 0.0) {
    for (int j = 0; j < code.k(); ++j) H.add(h_z, code.logical_z(j));
  }
  return H;
}

PauliSum recovery_adjoint(const StabilizerCode& code, const PauliString& O, AdjointForm form) {
  if (!code.is_logical(O)) throw QecError("operator is not a logical Pauli of " + code.name());
  if (!code.corrects()) throw QecError("code " + code.name() + " has no decoding table");
  const int n = code.n_qubits();
  PauliSum out = identity_sum(n);
  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  for (const auto& b : code.blocks()) {
    const auto sites = block_support(code, b);
    for (Site s : sites) covered[static_cast<std::size_t>(s)] = true;
    out = out * block_adjoint(code, b, restrict_to(O, sites), form);
    out.simplify();
  }
  std::vector<Site> rest;
  for (Site s = 0; s < n; ++s) {
    if (!covered[static_cast<std::size_t>(s)]) rest.push_back(s);
  }
  out = out * PauliSum::from(restrict_to(O, rest), O.phase());
  out.simplify();
  return out;
}

// ------------------------------------------------------------ dense channel

RecoveryChannel::RecoveryChannel(const StabilizerCode& code) : code_(code) {
  if (!code_.corrects()) throw QecError("code " + code_.name() + " has no decoding table");
  errors_.reserve(code_.n_syndromes());
  for (std::uint64_t s = 0; s < code_.n_syndromes(); ++s) errors_.push_back(code_.error_for(s));
}

Mat RecoveryChannel::syndrome_components(const Vec& v) const {
  const Mat& enc = code_.encoder();
  Mat out(static_cast<Eigen::Index>(errors_.size()), enc.cols());
  parallel_for(errors_.size(), [&](std::size_t s) {
    out.row(static_cast<Eigen::Index>(s)) = (enc.adjoint() * errors_[s].apply(v)).transpose();
  });
  return out;
}

Mat RecoveryChannel::apply(const Mat& rho) const {
  const Mat& enc = code_.encoder();
  if (rho.rows() != enc.rows() || rho.cols() != enc.rows()) throw QecError("density has the wrong dimension");
  Mat logical = Mat::Zero(enc.cols(), enc.cols());
  for (const auto& E : errors_) {
    Mat B(enc.rows(), enc.cols());
    for (Eigen::Index c = 0; c < enc.cols(); ++c) B.col(c) = E.apply(Vec(enc.col(c)));
    logical += B.adjoint() * rho * B;
  }
  return enc * logical * enc.adjoint();
}

Mat RecoveryChannel::logical_output(const Vec& a, const Vec& b) const {
  return syndrome_components(a).transpose() * syndrome_components(b).conjugate();
}

Mat RecoveryChannel::ancilla_output(const Vec& a, const Vec& b, bool measured) const {
  const Mat m = syndrome_components(a) * syndrome_components(b).adjoint();
  if (!measured) return m;
  return Mat(m.diagonal().asDiagonal());
}

// -------------------------------------------------------------------- ECI

const char* to_string(ChannelPair p) {
  switch (p) {
    case ChannelPair::kLogicalLogical: return "logical->logical";
    case ChannelPair::kLogicalAncilla: return "logical->ancilla";
    case ChannelPair::kPhysicalLogical: return "physical->logical";
    case ChannelPair::kPhysicalAncilla: return "physical->ancilla";
  }
  return "?";
}

ChannelResponse eci_response(const RecoveryChannel& channel, const StateVector& state, const EciRequest& req,
                             const Propagator* U, double tau) {
  const StabilizerCode& code = channel.code();
  const int n = code.n_qubits();
  const int k = code.k();
  if (state.n_qubits() != n) throw QecError("state size does not match the code");
  if (code.codespace_leakage(state.amplitudes()) > kLeakageTol) throw QecError("state outside the codespace");
  const bool physical_source =
      req.pair == ChannelPair::kPhysicalLogical || req.pair == ChannelPair::kPhysicalAncilla;
  const bool ancilla_target = req.pair == ChannelPair::kLogicalAncilla || req.pair == ChannelPair::kPhysicalAncilla;

  std::vector<Vec> a;
  int d = 0;
  const Vec& psi = state.amplitudes();
  if (physical_source) {
    if (req.source_site < 0 || req.source_site >= n) throw QecError("source site out of range");
    d = 2;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const Vec rest = contract_qubit(psi, n, req.source_site, Eigen::Vector2cd::Unit(j));
        a.push_back(insert_qubit(rest, n, req.source_site, Eigen::Vector2cd::Unit(i)));
      }
    }
  } else {
    d = code.logical_dim();
    const Vec c = code.encoder().adjoint() * psi;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a.push_back(code.encoder().col(i) * c[j]);
    }
  }
  if (U != nullptr && tau != 0.0) {
    parallel_for(a.size(), [&](std::size_t p) { a[p] = U->apply(a[p], tau); });
  }
  std::vector<Mat> Y;
  Y.reserve(a.size());
  for (const auto& v : a) Y.push_back(channel.syndrome_components(v));

  const std::size_t m = a.size();
  std::vector<Mat> blocks(m * m);
  if (!ancilla_target) {
    std::vector<Site> keep(req.logical_target.begin(), req.logical_target.end());
    if (keep.empty()) {
      for (int j = 0; j < k; ++j) keep.push_back(j);
    }
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.front() < 0 || keep.back() >= k) {
      throw QecError("invalid logical target");
    }
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) {
        const Mat full = Y[p].transpose() * Y[q].conjugate();
        blocks[p * m + q] = static_cast<int>(keep.size()) == k ? full : partial_trace_operator(full, k, keep);
      }
    }
    return {std::move(blocks), d};
  }

  const auto S = static_cast<Eigen::Index>(code.n_syndromes());
  std::vector<Eigen::Index> rows;
  for (Eigen::Index s = 0; s < S; ++s) {
    bool used = !req.fast_path;
    for (std::size_t p = 0; p < m && !used; ++p) used = Y[p].row(s).norm() > 1e-13;
    if (used) rows.push_back(s);
  }
  std::vector<Mat> Ys;
  for (const auto& y : Y) Ys.push_back(y(rows, Eigen::all));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      Mat t = Ys[p] * Ys[q].adjoint();
      if (req.measured) t = Mat(t.diagonal().asDiagonal());
      blocks[p * m + q] = std::move(t);
    }
  }
  return {std::move(blocks), d, static_cast<int>(S)};
}

EciValue eci_exact(const RecoveryChannel& channel, const StateVector& state, const EciRequest& req,
                   const Propagator* U, double tau) {
  const StabilizerCode& code = channel.code();
  EciValue out;
  out.pair = req.pair;
  out.measured = req.measured;
  out.value = eci_response(channel, state, req, U, tau).ci_exact();
  if (tau != 0.0 && U != nullptr) return out;
  const bool full_target = req.logical_target.empty() || static_cast<int>(req.logical_target.size()) == code.k();
  switch (req.pair) {
    case ChannelPair::kLogicalLogical:
      if (full_target) out.closed_form = ci_logical_logical(code.logical_dim());
      break;
    case ChannelPair::kLogicalAncilla: out.closed_form = 0.0; break;
    case ChannelPair::kPhysicalLogical:
      if (code.corrects_single_qubit_errors()) out.closed_form = 0.0;
      break;
    case ChannelPair::kPhysicalAncilla:
      if (code.corrects_single_qubit_errors()) {
        out.closed_form = ci_phys_anc_closed_form(static_cast<int>(code.n_syndromes()), req.measured);
      }
      break;
  }
  return out;
}

HeisenbergSector eci_sector(const StabilizerCode& code, const EvolvedSchmidt& ev, int j) {
  std::array<HeisenbergSector::VecOperator, 3> ops;
  for (Pauli alpha : kNontrivial) {
    auto R = std::make_shared<PauliSum>(recovery_adjoint(code, code.logical(alpha, j)));
    ops[static_cast<std::size_t>(alpha) - 1] = [R](const Vec& v) { return R->apply(v); };
  }
  return HeisenbergSector(ev.evolved, 2, ops);
}

namespace {

EvolvedSchmidt checked_evolve(const StabilizerCode& code, const StateVector& state, Site q, const Propagator& U,
                              double tau) {
  if (state.n_qubits() != code.n_qubits()) throw QecError("state size does not match the code");
  if (code.codespace_leakage(state.amplitudes()) > kLeakageTol) throw QecError("state outside the codespace");
  if (q < 0 || q >= code.n_qubits()) throw QecError("source site out of range");
  return evolve_schmidt(state, q, U, tau);
}

}  // namespace

CiValue eci_heisenberg(const StabilizerCode& code, const StateVector& state, Site q, int j, const Propagator& U,
                       double tau) {
  const auto ev = checked_evolve(code, state, q, U, tau);
  return ci_from_sector(eci_sector(code, ev, j), ev.schmidt.p1, ev.schmidt.p2, std::ldexp(1.0, code.n_qubits()));
}

TheoremReport eci_theorem_check(const StabilizerCode& code, const StateVector& state, Site q, int j,
                                const Propagator& U, double tau, double tol) {
  const auto ev = checked_evolve(code, state, q, U, tau);
  return theorem_report(eci_sector(code, ev, j), ev.schmidt, tol);
}

double ci_logical_logical(int D) {
  const double d = D;
  return (d - 1.0) / (d * d * (d * d + 1.0));
}

double ci_phys_anc_closed_form(int d_anc, bool measured) {
  const double d = d_anc;
  return (measured ? 0.25 : 0.75) / (d * (d * d + 1.0));
}

RepCodeCi rep_code_ci(double z, int d_anc) {
  const double d = d_anc;
  const double base = d * (d * d + 1.0);
  return {(1.0 - z * z) / 30.0, (1.0 + z * z / 2.0) / (3.0 * base), 1.0 / (6.0 * base)};
}

EciValue ci_phys_anc(const StabilizerCode& code, const StateVector& state, bool measured) {
  const RecoveryChannel channel(code);
  EciRequest req;
  req.pair = ChannelPair::kPhysicalAncilla;
  req.source_site = 0;
  req.measured = measured;
  EciValue out = eci_exact(channel, state, req);
  if (code.name().rfind("repetition-X", 0) == 0) {
    const double z = code.logical_z(0).expectation(state.amplitudes()).real();
    const auto r = rep_code_ci(z, static_cast<int>(code.n_syndromes()));
    out.closed_form = measured ? r.phys_anc_post : r.phys_anc_pre;
  }
  return out;
}

// ------------------------------------------------------- protected states

const char* to_string(ProtectedFamily f) {
  switch (f) {
    case ProtectedFamily::kZEigen: return "z-eigen";
    case ProtectedFamily::kXEigen: return "x-eigen";
    case ProtectedFamily::kBell: return "bell";
    case ProtectedFamily::kOneParameter: return "one-parameter";
    case ProtectedFamily::kGeneric: return "generic";
  }
  return "?";
}

Vec protected_logical_state(ProtectedFamily family, int k, double t) {
  if (k < 2) throw QecError("protected families need k >= 2");
  const bool entangled = family == ProtectedFamily::kBell || family == ProtectedFamily::kOneParameter;
  if (entangled && k < 3) throw QecError("entangled families need k >= 3");
  const Vec g1 = qubit(std::cos(0.4), std::polar(std::sin(0.4), 0.7));
  const double r = 1.0 / std::sqrt(2.0);
  switch (family) {
    case ProtectedFamily::kZEigen: return kron(qubit(1, 0), random_logical(k - 1, 11));
    case ProtectedFamily::kXEigen: {
      const Vec plus = qubit(r, r);
      return k == 2 ? kron(g1, plus) : kron(kron(g1, plus), random_logical(k - 2, 12));
    }
    case ProtectedFamily::kBell:
    case ProtectedFamily::kOneParameter: {
      Vec pair = Vec::Zero(4);
      if (family == ProtectedFamily::kBell) {
        pair[0] = r;
        pair[3] = r;
      } else {
        const double pi4 = std::numbers::pi / 4.0;
        pair[0] = std::cos(t + pi4);
        pair[3] = cplx(0.0, std::cos(t - pi4));
      }
      Vec out = kron(g1, pair);
      for (int j = 3; j < k; ++j) out = kron(out, qubit(1, 0));
      return out;
    }
    case ProtectedFamily::kGeneric: return random_logical(k, 13);
  }
  return {};
}

ProtectedCheck check_protected(const StabilizerCode& code, ProtectedFamily family, double t) {
  const StateVector psi = code.encode(protected_logical_state(family, code.k(), t));
  const Propagator U(logical_xx_hamiltonian(code));
  ProtectedCheck out{family, 0.0, {}};
  const auto ev = checked_evolve(code, psi, 0, U, t);
  const HeisenbergSector sector = eci_sector(code, ev, 1);
  out.eci = ci_from_sector(sector, ev.schmidt.p1, ev.schmidt.p2, std::ldexp(1.0, code.n_qubits())).value;
  out.report = theorem_report(sector, ev.schmidt);
  return out;
}

CiValue iceberg_self_influence(int k, double dt, double h_z, std::uint64_t b) {
  const StabilizerCode code = iceberg(k);
  if (b >= static_cast<std::uint64_t>(code.logical_dim())) throw QecError("logical basis index out of range");
  const StateVector psi = code.encode(Vec::Unit(code.logical_dim(), static_cast<Eigen::Index>(b)));
  const Propagator U(logical_xx_hamiltonian(code, h_z));
  std::vector<double> per(static_cast<std::size_t>(code.n_qubits()));
  parallel_for(per.size(), [&](std::size_t q) {
    const Site s = static_cast<Site>(q);
    per[q] = ci_exact(psi, U, s, s, dt).value;
  });
  CiValue out;
  out.value = *std::max_element(per.begin(), per.end());
  return out;
}

}  // namespace chronoscope
