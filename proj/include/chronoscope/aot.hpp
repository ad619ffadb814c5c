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

#include "chronoscope/causal.hpp"

#include <vector>

namespace chronoscope {

// Time slices k = 0..n_steps of |Psi(k dt)>, x spacing dx.
class SpacetimeLattice {
 public:
  SpacetimeLattice(HamiltonianSpec H, const StateVector& initial, double dt, int n_steps, double dx = 1.0,
                   double tol = 1e-12);

  int n_sites() const { return U_.n_qubits(); }
  int n_slices() const { return static_cast<int>(slices_.size()); }
  int n_steps() const { return n_slices() - 1; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  double time(int k) const { return k * dt_; }
  const StateVector& slice(int k) const;
  const Propagator& propagator() const { return U_; }
  const HamiltonianSpec& hamiltonian() const { return U_.hamiltonian(); }

 private:
  Propagator U_;
  double dt_;
  double dx_;
  std::vector<StateVector> slices_;
};

// Box neighbors numbered 1..8 around the center, starting at the past-left
// corner: 1 (-1,-1), 2 (-1,0), 3 (-1,+1), 4 (0,+1), 5 (+1,+1), 6 (+1,0),
// 7 (+1,-1), 8 (0,-1) in (time, space) steps. 4 and 8 are equal-time.
struct Neighbor {
  int index = 0;
  int t = 0;
  Site x = 0;
  double v_t = 0.0;  // displacement center - neighbor
  double v_x = 0.0;
};

std::vector<Neighbor> neighborhood(int t, Site x, const SpacetimeLattice& lattice);

struct AotContribution {
  Neighbor neighbor;
  double ci = 0.0;
};

struct AotVector {
  int t = 0;
  Site x = 0;
  double v_t = 0.0;
  double v_x = 0.0;
  std::vector<AotContribution> contributions;
};

// Sum over contributions in stored order.
void accumulate(AotVector& v);

AotVector aot_vector(const SpacetimeLattice& lattice, int t, Site x);

struct EntropyMap {
  int n_slices = 0;
  int n_sites = 0;
  std::vector<double> von_neumann;
  std::vector<double> renyi2;

  double vn(int t, Site x) const { return von_neumann[static_cast<std::size_t>(t * n_sites + x)]; }
  double s2(int t, Site x) const { return renyi2[static_cast<std::size_t>(t * n_sites + x)]; }
};

EntropyMap entropy_map(const SpacetimeLattice& lattice);

struct AotField {
  int n_slices = 0;
  int n_sites = 0;
  double dt = 0.0;
  double dx = 1.0;
  std::vector<AotVector> vectors;
  EntropyMap entropy;

  const AotVector& at(int t, Site x) const { return vectors[static_cast<std::size_t>(t * n_sites + x)]; }
};

AotField aot_field(const SpacetimeLattice& lattice, int threads = 0);

// Purity-difference approximation: temporal component
// dt * 2 (tr rho_x(t)^2 - tr rho_x(t + dt)^2) / 10.
AotVector aot_leading(const StateVector& state_t, const Propagator& U, Site x, double dt);
AotVector aot_leading(const StateVector& state_t, const HamiltonianSpec& H, Site x, double dt);

}  // namespace chronoscope
