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


#include "chronoscope/sdo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>

namespace chronoscope {

namespace {

constexpr int kMaxSystemQubits = 12;

void check_region(const SpacetimeRegion& r, int n, const char* name) {
  if (r.sites.empty()) throw SdoError(std::string("region ") + name + " is empty");
  if (static_cast<int>(r.sites.size()) > SuperdensityOperator::kMaxRegionQubits) {
    throw SdoError(std::string("region ") + name + " too large");
  }
  std::set<Site> seen;
  for (Site s : r.sites) {
    if (s < 0 || s >= n) throw SdoError(std::string("region ") + name + " site out of range");
    if (!seen.insert(s).second) throw SdoError(std::string("region ") + name + " repeats a site");
  }
}

// Joint register: ancilla bits above the system bits.
struct Joint {
  int n_anc;
  int n_sys;
  Vec amp;

  std::uint64_t anc_bit(int a) const { return std::uint64_t{1} << (n_anc - 1 - a + n_sys); }
  std::uint64_t sys_bit(Site s) const { return std::uint64_t{1} << (n_sys - 1 - s); }

  void cx(int a, Site s) {
    const std::uint64_t ab = anc_bit(a);
    const std::uint64_t sb = sys_bit(s);
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(amp.size()); ++i) {
      if ((i & ab) && !(i & sb)) std::swap(amp[static_cast<Eigen::Index>(i)], amp[static_cast<Eigen::Index>(i | sb)]);
    }
  }
  void cz(int a, Site s) {
    const std::uint64_t mask = anc_bit(a) | sys_bit(s);
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(amp.size()); ++i) {
      if ((i & mask) == mask) amp[static_cast<Eigen::Index>(i)] = -amp[static_cast<Eigen::Index>(i)];
    }
  }
  void evolve(const Propagator& U, double t) {
    if (t == 0.0) return;
    const Eigen::Index d = Eigen::Index{1} << n_sys;
    for (Eigen::Index b = 0; b < (Eigen::Index{1} << n_anc); ++b) {
      Vec seg = amp.segment(b * d, d);
      if (seg.squaredNorm() == 0.0) continue;
      amp.segment(b * d, d) = U.apply(seg, t);
    }
  }
  void couple(const SpacetimeRegion& r, int first_anc, CouplingOrder order) {
    const int m = static_cast<int>(r.sites.size());
    if (order == CouplingOrder::kRounds) {
      for (int i = 0; i < m; ++i) cx(first_anc + i, r.sites[static_cast<std::size_t>(i)]);
      for (int i = 0; i < m; ++i) cz(first_anc + m + i, r.sites[static_cast<std::size_t>(i)]);
    } else {
      for (int i = 0; i < m; ++i) {
        cx(first_anc + i, r.sites[static_cast<std::size_t>(i)]);
        cz(first_anc + m + i, r.sites[static_cast<std::size_t>(i)]);
      }
    }
  }
};

// Ancilla bits (x, z) for one site of a Pauli string and the phase lambda with
// sigma = lambda Z^z X^x (source side) or sigma = lambda (Z^z X^x)^dag (probe side).
struct Probe {
  int x;
  int z;
  cplx lambda;
};

Probe probe_of(Pauli p, bool dagger) {
  switch (p) {
    case Pauli::I: return {0, 0, 1.0};
    case Pauli::X: return {1, 0, 1.0};
    case Pauli::Z: return {0, 1, 1.0};
    case Pauli::Y: return {1, 1, dagger ? cplx(0.0, 1.0) : cplx(0.0, -1.0)};
  }
  return {0, 0, 1.0};
}

std::uint64_t region_index(const PauliString& O, const SpacetimeRegion& r, bool dagger, cplx& lambda) {
  const int m = static_cast<int>(r.sites.size());
  std::set<Site> in(r.sites.begin(), r.sites.end());
  for (Site s : O.support()) {
    if (!in.count(s)) throw SdoError("operator acts outside its region");
  }
  std::uint64_t xs = 0;
  std::uint64_t zs = 0;
  lambda *= O.phase();
  for (int i = 0; i < m; ++i) {
    const Probe p = probe_of(O.letter(r.sites[static_cast<std::size_t>(i)]), dagger);
    lambda *= p.lambda;
    xs |= static_cast<std::uint64_t>(p.x) << (m - 1 - i);
    zs |= static_cast<std::uint64_t>(p.z) << (m - 1 - i);
  }
  return (xs << m) | zs;
}

}  // namespace

SuperdensityOperator::SuperdensityOperator(int n_system, SpacetimeRegion A, SpacetimeRegion B, Mat matrix)
    : n_sys_(n_system), a_(std::move(A)), b_(std::move(B)), rho_(std::move(matrix)) {
  const Eigen::Index dim = Eigen::Index{1} << ancilla_count();
  if (rho_.rows() != dim || rho_.cols() != dim) throw SdoError("SDO matrix has the wrong dimension");
}

double SuperdensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SuperdensityOperator sdo_build(const StateVector& state, const Propagator& U, const SpacetimeRegion& A,
                               const SpacetimeRegion& B, CouplingOrder order) {
  const int n = state.n_qubits();
  if (n > kMaxSystemQubits) throw SdoError("system too large for the dense ancilla simulation");
  if (U.n_qubits() != n) throw SdoError("Hamiltonian size does not match the state");
  check_region(A, n, "A");
  check_region(B, n, "B");
  if (A.t == B.t) {
    for (Site s : A.sites) {
      if (std::find(B.sites.begin(), B.sites.end(), s) != B.sites.end()) {
        throw SdoError("equal-time regions must be disjoint");
      }
    }
  }
  const int na = static_cast<int>(A.sites.size());
  const int nb = static_cast<int>(B.sites.size());
  Joint j{2 * (na + nb), n, Vec()};
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index anc_dim = Eigen::Index{1} << j.n_anc;
  const Vec start = U.apply(state.amplitudes(), A.t);
  j.amp.resize(anc_dim * d);
  const double w = 1.0 / std::sqrt(static_cast<double>(anc_dim));
  for (Eigen::Index b = 0; b < anc_dim; ++b) j.amp.segment(b * d, d) = w * start;
  j.couple(A, 0, order);
  j.evolve(U, B.t - A.t);
  j.couple(B, 2 * na, order);
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(j.amp.data(), anc_dim,
                                                                                                   d);
  return {n, A, B, M * M.adjoint()};
}

SuperdensityOperator sdo_build(const StateVector& state, const HamiltonianSpec& H, const SpacetimeRegion& A,
                               const SpacetimeRegion& B, CouplingOrder order) {
  return sdo_build(state, Propagator(H), A, B, order);
}

cplx sdo_correlator(const SuperdensityOperator& sdo, const PauliString& O_A, const PauliString& O_B) {
  if (O_A.n_qubits() != sdo.n_system() || O_B.n_qubits() != sdo.n_system()) {
    throw SdoError("operator size does not match the system");
  }
  cplx lambda = 1.0;
  const std::uint64_t ca = region_index(O_A, sdo.region_a(), false, lambda);
  const std::uint64_t cb = region_index(O_B, sdo.region_b(), true, lambda);
  const int bits_b = 2 * static_cast<int>(sdo.region_b().sites.size());
  const auto row = static_cast<Eigen::Index>(ca << bits_b);
  const auto col = static_cast<Eigen::Index>(cb);
  return lambda * std::ldexp(1.0, sdo.ancilla_count()) * sdo.matrix()(row, col);
}

cplx direct_two_time_correlator(const StateVector& state, const Propagator& U, const PauliString& O_A, double t_A,
                                const PauliString& O_B, double t_B) {
  Vec v = O_A.apply(U.apply(state.amplitudes(), t_A));
  v = O_B.apply(U.apply(v, t_B - t_A));
  const Vec w = U.apply(state.amplitudes(), t_B);
  return w.dot(v);
}

std::vector<CorrelatorEntry> correlator_table(const SuperdensityOperator& sdo) {
  const int n = sdo.n_system();
  auto strings = [&](const SpacetimeRegion& r) {
    std::vector<std::pair<std::string, PauliString>> out;
    const int m = static_cast<int>(r.sites.size());
    for (int code = 0; code < (1 << (2 * m)); ++code) {
      std::string label;
      PauliString p(n);
      for (int i = 0; i < m; ++i) {
        const auto letter = static_cast<Pauli>((code >> (2 * (m - 1 - i))) & 3);
        p.set(r.sites[static_cast<std::size_t>(i)], letter);
        label += "IXYZ"[static_cast<int>(letter)];
      }
      out.emplace_back(label, p);
    }
    return out;
  };
  std::vector<CorrelatorEntry> table;
  const auto as = strings(sdo.region_a());
  const auto bs = strings(sdo.region_b());
  for (const auto& [la, pa] : as) {
    for (const auto& [lb, pb] : bs) table.push_back({la, lb, sdo_correlator(sdo, pa, pb)});
  }
  return table;
}

}  // namespace chronoscope
