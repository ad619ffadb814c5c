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


#include "chronoscope/aot.hpp"

#include "chronoscope/parallel.hpp"

#include <array>

namespace chronoscope {

namespace {

constexpr std::array<std::array<int, 2>, 8> kOffsets = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1},
}};

double site_purity(const StateVector& psi, Site x) { return purity(partial_trace(psi, {x})); }

}  // namespace

SpacetimeLattice::SpacetimeLattice(HamiltonianSpec H, const StateVector& initial, double dt, int n_steps, double dx,
                                   double tol)
    : U_(std::move(H), tol), dt_(dt), dx_(dx) {
  if (initial.n_qubits() != U_.n_qubits()) throw QcoreError("state and Hamiltonian sizes differ");
  if (n_steps < 0) throw QcoreError("n_steps must be non-negative");
  if (!(dt > 0.0) || !(dx > 0.0)) throw QcoreError("lattice spacings must be positive");
  slices_.reserve(static_cast<std::size_t>(n_steps) + 1);
  slices_.push_back(initial);
  for (int k = 1; k <= n_steps; ++k) slices_.push_back(U_.apply(slices_.back(), dt_));
}

const StateVector& SpacetimeLattice::slice(int k) const {
  if (k < 0 || k >= n_slices()) throw QcoreError("time index out of range");
  return slices_[static_cast<std::size_t>(k)];
}

std::vector<Neighbor> neighborhood(int t, Site x, const SpacetimeLattice& lattice) {
  if (t < 0 || t >= lattice.n_slices() || x < 0 || x >= lattice.n_sites()) {
    throw QcoreError("lattice point out of range");
  }
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < kOffsets.size(); ++i) {
    const int tq = t + kOffsets[i][0];
    const Site xq = x + kOffsets[i][1];
    if (tq < 0 || tq >= lattice.n_slices() || xq < 0 || xq >= lattice.n_sites()) continue;
    out.push_back({static_cast<int>(i) + 1, tq, xq, -kOffsets[i][0] * lattice.dt(), -kOffsets[i][1] * lattice.dx()});
  }
  return out;
}

void accumulate(AotVector& v) {
  v.v_t = 0.0;
  v.v_x = 0.0;
  for (const auto& c : v.contributions) {
    v.v_t += c.ci * c.neighbor.v_t;
    v.v_x += c.ci * c.neighbor.v_x;
  }
}

AotVector aot_vector(const SpacetimeLattice& lattice, int t, Site x) {
  AotVector v;
  v.t = t;
  v.x = x;
  for (const auto& nb : neighborhood(t, x, lattice)) {
    // Source at the neighbor, target at the center, tau = t_center - t_neighbor.
    const double tau = (t - nb.t) * lattice.dt();
    const CiValue ci = ci_exact(lattice.slice(nb.t), lattice.propagator(), nb.x, x, tau);
    v.contributions.push_back({nb, ci.value});
  }
  accumulate(v);
  return v;
}

EntropyMap entropy_map(const SpacetimeLattice& lattice) {
  EntropyMap m;
  m.n_slices = lattice.n_slices();
  m.n_sites = lattice.n_sites();
  const auto size = static_cast<std::size_t>(m.n_slices * m.n_sites);
  m.von_neumann.resize(size);
  m.renyi2.resize(size);
  for (int k = 0; k < m.n_slices; ++k) {
    for (Site x = 0; x < m.n_sites; ++x) {
      const DenseOperator rho = partial_trace(lattice.slice(k), {x});
      const auto i = static_cast<std::size_t>(k * m.n_sites + x);
      m.von_neumann[i] = von_neumann_entropy(rho);
      m.renyi2[i] = renyi2_entropy(rho);
    }
  }
  return m;
}

AotField aot_field(const SpacetimeLattice& lattice, int threads) {
  AotField f;
  f.n_slices = lattice.n_slices();
  f.n_sites = lattice.n_sites();
  f.dt = lattice.dt();
  f.dx = lattice.dx();
  f.vectors.resize(static_cast<std::size_t>(f.n_slices * f.n_sites));
  parallel_for(
      f.vectors.size(),
      [&](std::size_t i) {
        const int k = static_cast<int>(i) / f.n_sites;
        const Site x = static_cast<int>(i) % f.n_sites;
        f.vectors[i] = aot_vector(lattice, k, x);
      },
      threads);
  f.entropy = entropy_map(lattice);
  return f;
}

AotVector aot_leading(const StateVector& state_t, const Propagator& U, Site x, double dt) {
  AotVector v;
  v.x = x;
  const double p0 = site_purity(state_t, x);
  const double p1 = site_purity(U.apply(state_t, dt), x);
  v.v_t = dt * 2.0 * (p0 - p1) / 10.0;
  return v;
}

AotVector aot_leading(const StateVector& state_t, const HamiltonianSpec& H, Site x, double dt) {
  return aot_leading(state_t, Propagator(H), x, dt);
}

}  // namespace chronoscope
