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

#include <stdexcept>
#include <string>
#include <vector>

namespace chronoscope {

class SdoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpacetimeRegion {
  std::vector<Site> sites;
  double t = 0.0;
};

// Ancilla register order: X-probes of A, Z-probes of A, X-probes of B,
// Z-probes of B; the first ancilla is the most significant bit.
class SuperdensityOperator {
 public:
  static constexpr int kMaxRegionQubits = 4;

  SuperdensityOperator(int n_system, SpacetimeRegion A, SpacetimeRegion B, Mat matrix);

  int n_system() const { return n_sys_; }
  const SpacetimeRegion& region_a() const { return a_; }
  const SpacetimeRegion& region_b() const { return b_; }
  int ancilla_count() const { return 2 * static_cast<int>(a_.sites.size() + b_.sites.size()); }
  const Mat& matrix() const { return rho_; }
  double min_eigenvalue() const;

 private:
  int n_sys_;
  SpacetimeRegion a_;
  SpacetimeRegion b_;
  Mat rho_;
};

enum class CouplingOrder { kRounds, kInterleaved };

// Ancillas start in |+>, couple to A at t_A (CX round then CZ round, ancillas
// as controls), the system evolves to t_B (backwards if t_B < t_A), then the
// same coupling is applied to B. Returns the reduced ancilla state.
SuperdensityOperator sdo_build(const StateVector& state, const Propagator& U, const SpacetimeRegion& A,
                               const SpacetimeRegion& B, CouplingOrder order = CouplingOrder::kRounds);
SuperdensityOperator sdo_build(const StateVector& state, const HamiltonianSpec& H, const SpacetimeRegion& A,
                               const SpacetimeRegion& B, CouplingOrder order = CouplingOrder::kRounds);

// <O_B(t_B) O_A(t_A)> by linear inversion of one SDO element. O_A and O_B are
// full-system strings supported inside their regions.
cplx sdo_correlator(const SuperdensityOperator& sdo, const PauliString& O_A, const PauliString& O_B);

cplx direct_two_time_correlator(const StateVector& state, const Propagator& U, const PauliString& O_A, double t_A,
                                const PauliString& O_B, double t_B);

struct CorrelatorEntry {
  std::string a;  // letters on the A sites, in region order
  std::string b;
  cplx value;
};
// All 4^n x 4^m Pauli correlators held by the SDO.
std::vector<CorrelatorEntry> correlator_table(const SuperdensityOperator& sdo);

}  // namespace chronoscope
