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

#include "chronoscope/acausal.hpp"
#include "chronoscope/causal.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chronoscope {

class QecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Independent generator set acting on a subset of the physical qubits, with
// its own decoding table indexed by the local syndrome (bit g = generator g).
struct CodeBlock {
  std::vector<int> generators;       // indices into StabilizerCode::generators
  std::vector<PauliString> errors;   // E_s per local syndrome; empty when detection only
};

class StabilizerCode {
 public:
  StabilizerCode(std::string name, int n_qubits, std::vector<PauliString> generators,
                 std::vector<PauliString> logical_x, std::vector<PauliString> logical_z,
                 std::vector<CodeBlock> blocks);

  const std::string& name() const { return name_; }
  int n_qubits() const { return n_; }
  int k() const { return static_cast<int>(lx_.size()); }
  int logical_dim() const { return 1 << k(); }
  int n_generators() const { return static_cast<int>(gens_.size()); }
  std::uint64_t n_syndromes() const { return std::uint64_t{1} << gens_.size(); }
  const std::vector<PauliString>& generators() const { return gens_; }
  const PauliString& logical_x(int j) const { return lx_.at(static_cast<std::size_t>(j)); }
  const PauliString& logical_z(int j) const { return lz_.at(static_cast<std::size_t>(j)); }
  const std::vector<CodeBlock>& blocks() const { return blocks_; }
  bool corrects() const;
  // Every single-site Pauli is undone by its table entry on the codespace.
  bool corrects_single_qubit_errors() const { return distance3_; }

  // Bit g set when E anticommutes with generator g.
  std::uint64_t syndrome_of(const PauliString& E) const;
  // E_s as the product of the block table entries.
  PauliString error_for(std::uint64_t syndrome) const;
  // Logical Pauli sigma^alpha on logical qubit j (Y = i X Z).
  PauliString logical(Pauli alpha, int j) const;
  bool is_logical(const PauliString& O) const;

  // Columns |b>, logical qubit 0 most significant.
  const Mat& encoder() const { return enc_; }
  StateVector encode(const Vec& logical) const;
  // Norm of (1 - Pi_0)|psi>.
  double codespace_leakage(const Vec& psi) const;
  Vec project_syndrome(std::uint64_t syndrome, const Vec& psi) const;

 private:
  void validate() const;
  void build_encoder();

  std::string name_;
  int n_;
  std::vector<PauliString> gens_;
  std::vector<PauliString> lx_;
  std::vector<PauliString> lz_;
  std::vector<CodeBlock> blocks_;
  Mat enc_;
  bool distance3_ = false;
};

// k copies of the five-qubit perfect code, block j on qubits 5j..5j+4.
StabilizerCode five_qubit_blocks(int k);
// X-basis repetition code on n qubits: generators X_i X_{i+1}, |0> = |+...+>.
StabilizerCode repetition_x(int n);
// Data qubits 0..k-1, then h = k and v = k + 1; detection only.
StabilizerCode iceberg(int k);

// Sum_{j} Xbar_j Xbar_{j+1} + h_z Sum_j Zbar_j on the physical qubits.
HamiltonianSpec logical_xx_hamiltonian(const StabilizerCode& code, double h_z = 0.0);

enum class AdjointForm { kDefinition, kSimplified };

// R^dag[O] for a logical Pauli string O. Blockwise decoders give the product
// of the per-block adjoints of the restrictions of O.
PauliSum recovery_adjoint(const StabilizerCode& code, const PauliString& O,
                          AdjointForm form = AdjointForm::kSimplified);

// Dense channel pieces in the syndrome basis B_s = E_s Enc (n <= 14).
class RecoveryChannel {
 public:
  explicit RecoveryChannel(const StabilizerCode& code);

  const StabilizerCode& code() const { return code_; }
  // R[rho] on the physical space.
  Mat apply(const Mat& rho) const;
  // Dec R[|a><b|] as a D x D logical matrix.
  Mat logical_output(const Vec& a, const Vec& b) const;
  // <s| tr_phys R'[|a><b|] |t>; measured keeps the diagonal.
  Mat ancilla_output(const Vec& a, const Vec& b, bool measured) const;
  // B_s^dag v for every syndrome, row s.
  Mat syndrome_components(const Vec& v) const;

 private:
  StabilizerCode code_;
  std::vector<PauliString> errors_;
};

enum class ChannelPair { kLogicalLogical, kLogicalAncilla, kPhysicalLogical, kPhysicalAncilla };
const char* to_string(ChannelPair p);

struct EciValue {
  double value = 0.0;
  ChannelPair pair = ChannelPair::kPhysicalLogical;
  bool measured = false;
  double closed_form = -1.0;  // negative when no closed form applies
};

// Source: one physical qubit (source_site >= 0) or all logical qubits
// (source_site < 0). Target: the logical qubits in `logical_target` (all when
// empty) or the ancilla register.
struct EciRequest {
  ChannelPair pair = ChannelPair::kPhysicalLogical;
  Site source_site = 0;
  std::vector<int> logical_target;
  bool measured = false;
  // Restrict the ancilla register to the syndromes that can occur.
  bool fast_path = false;
};

// Dense channel simulation: the perturbed state U(tau) V |Psi> passes through
// the recovery channel. U may be null for tau = 0.
ChannelResponse eci_response(const RecoveryChannel& channel, const StateVector& state, const EciRequest& req,
                             const Propagator* U = nullptr, double tau = 0.0);
EciValue eci_exact(const RecoveryChannel& channel, const StateVector& state, const EciRequest& req,
                   const Propagator* U = nullptr, double tau = 0.0);

// Physical qubit q to logical qubit j through R^dag[sigma_j] in the Heisenberg
// picture, matrix-free.
HeisenbergSector eci_sector(const StabilizerCode& code, const EvolvedSchmidt& ev, int j);
CiValue eci_heisenberg(const StabilizerCode& code, const StateVector& state, Site q, int j, const Propagator& U,
                       double tau);
TheoremReport eci_theorem_check(const StabilizerCode& code, const StateVector& state, Site q, int j,
                                const Propagator& U, double tau, double tol = 1e-10);

// Closed forms.
double ci_logical_logical(int D);
double ci_phys_anc_closed_form(int d_anc, bool measured);
struct RepCodeCi {
  double phys_logical = 0.0;
  double phys_anc_pre = 0.0;
  double phys_anc_post = 0.0;
};
RepCodeCi rep_code_ci(double z_expectation, int d_anc = 4);
EciValue ci_phys_anc(const StabilizerCode& code, const StateVector& state, bool measured);

enum class ProtectedFamily { kZEigen, kXEigen, kBell, kOneParameter, kGeneric };
const char* to_string(ProtectedFamily f);
// Logical state on k blocks (logical qubit 0 = block 1). Families constrain
// block 1 (Z eigen), block 2 (X eigen) or blocks 2 and 3 (entangled; k >= 3).
Vec protected_logical_state(ProtectedFamily family, int k, double t);

struct ProtectedCheck {
  ProtectedFamily family;
  double eci = 0.0;
  TheoremReport report;
};
// Physical qubit 0 to logical qubit 1 under Sum Xbar_j Xbar_{j+1} for time t.
ProtectedCheck check_protected(const StabilizerCode& code, ProtectedFamily family, double t);

// max_q CI_qq(dt) for the encoded basis state |b>.
CiValue iceberg_self_influence(int k, double dt, double h_z, std::uint64_t b = 0);

}  // namespace chronoscope
