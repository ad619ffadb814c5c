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

#include "chronoscope/aot.hpp"
#include "chronoscope/io.hpp"
#include "chronoscope/sdo.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chronoscope {

enum class ExperimentKind { kIsingFringe, kTwoArrows, kPxpScars, kWavepacket, kTheorem, kQec, kSdo, kCustom };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentInfo {
  ExperimentKind kind;
  std::string description;
};
std::vector<ExperimentInfo> list_experiments();

struct ModelSpec {
  std::string name = "ising";
  double J = 1.0;
  double hx = 0.01;
  double hz = -0.21;
};

struct StateSpec {
  std::string kind = "product";
  std::string letters;  // product and backward seeds; defaults to all 0
  double tau = 0.0;     // backward / two-sided preparation time
  double momentum = 1.5707963267948966;
  double center = -1.0;  // negative: chain center
  double width = 1.0;
  std::uint64_t seed = 1;
  std::string logical = "zero";
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kCustom;
  int n_qubits = 8;
  ModelSpec model;
  double dt = 0.005;
  double T = 0.0;
  int n_steps = 0;
  double dx = 1.0;
  double tolerance = 1e-12;
  StateSpec state;

  bool monte_carlo = false;
  long samples = 100000;
  std::uint64_t mc_seed = 1;

  Site ci_a = 0;
  Site ci_b = 1;
  double ci_t = 0.1;
  double ci_at = 0.0;  // evolve the initial state this long first

  Site thm_q = 2;
  Site thm_x = 3;
  Site thm_x_prime = 4;
  double thm_tau = 0.3;
  std::string thm_variant = "engineered";
  double thm_tolerance = 1e-10;

  std::string qec_code = "five-qubit";
  int qec_size = 1;
  double qec_t = 0.0;
  double qec_h_z = 0.0;
  Site qec_source = 0;
  std::vector<double> qec_dt_values{0.05, 0.1, 0.3};

  SpacetimeRegion sdo_a;
  SpacetimeRegion sdo_b;
  CouplingOrder sdo_coupling = CouplingOrder::kRounds;

  std::string out_dir = ".";
  std::string out_prefix;
  bool svg = true;

  // Every resolved value, for the manifest.
  json resolved;
};

// doc must already satisfy the published schema. Fills defaults for the
// chosen experiment and checks cross-field constraints; throws ConfigError.
ExperimentConfig resolve_config(const json& doc, const JsonLocator& where = {});
// Schema validation followed by resolve_config.
ExperimentConfig load_config(const json& doc, const JsonLocator& where = {});

HamiltonianSpec build_model(const ModelSpec& m, int n);
// Terms of H supported inside [lo, hi).
HamiltonianSpec restrict_terms(const HamiltonianSpec& H, Site lo, Site hi);

// Momentum-filtered single flip over |0...0>:
// sum_x exp(i k x - (x - x0)^2 / (4 w^2)) X_x |0...0>, normalized.
StateVector wavepacket_state(int n, double momentum, double center, double width);
// Left half evolved forward by tau and right half backward by tau under the
// half-chain Hamiltonians, then the whole chain evolved back by tau so the
// caption state sits at the window center t = tau.
StateVector two_sided_state(const HamiltonianSpec& H, const std::string& letters, double tau, double tol = 1e-12);
StateVector initial_state(const ExperimentConfig& cfg, const HamiltonianSpec& H);

struct RunOutput {
  std::map<std::string, std::string> files;  // name without prefix -> contents
  json summary;
  json seeds = json::object();
  json tolerances = json::object();
  std::vector<std::string> notes;
};

// Field experiments (fringe, two-arrows, pxp, wavepacket, custom).
AotField compute_field(const ExperimentConfig& cfg);
RunOutput run_field(const ExperimentConfig& cfg);
RunOutput run_evolve(const ExperimentConfig& cfg);
RunOutput run_ci(const ExperimentConfig& cfg);
RunOutput run_theorem(const ExperimentConfig& cfg);
RunOutput run_qec(const ExperimentConfig& cfg);
RunOutput run_sdo(const ExperimentConfig& cfg);
RunOutput run_experiment(const ExperimentConfig& cfg);

// Phenomenology diagnostics on interior slices (the first and last slice
// lack one temporal side).
struct FringeDiagnostic {
  bool sign_change_everywhere = false;
  std::vector<double> mean_before;  // per site, mean v_t over interior slices with t < T/2
  std::vector<double> mean_after;
};
FringeDiagnostic fringe_diagnostic(const AotField& f);

struct TwoArrowsDiagnostic {
  std::vector<double> mean_v_t;      // per site
  std::vector<double> mean_abs_v_x;  // per site
  bool opposite_halves = false;      // left means > 0, right means < 0
  bool v_x_peak_at_interface = false;  // among columns 1..n-2
};
TwoArrowsDiagnostic two_arrows_diagnostic(const AotField& f);

struct PxpDiagnostic {
  // Site-summed sign of v_t against the next-slice change of the summed
  // Renyi-2 purity.
  double r_sign_vs_purity_change = 0.0;
  // Site-summed sign of v_t against the summed von Neumann entropy.
  double r_sign_vs_entropy = 0.0;
  double r_v_t_vs_purity_change = 0.0;
};
PxpDiagnostic pxp_diagnostic(const AotField& f);

double max_equal_time_ci(const AotField& f);
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Field of the conjugated trajectory started from conj(Psi(T)), mapped back
// by (t, x) -> (T - t, x) with v_t negated. Equals f when H is real.
AotField time_reversed_field(const ExperimentConfig& cfg, const AotField& f);

}  // namespace chronoscope
