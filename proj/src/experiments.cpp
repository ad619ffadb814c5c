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


#include "chronoscope/experiments.hpp"

#include "chronoscope/acausal.hpp"
#include "chronoscope/qec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace chronoscope {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
  const char* description;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::kIsingFringe, "ising-fringe",
     "product state evolved back by T/2 under the transverse Ising chain; low-entropy fringe at t = T/2"},
    {ExperimentKind::kTwoArrows, "two-arrows",
     "left half evolved forward, right half backward; opposite arrows side by side"},
    {ExperimentKind::kPxpScars, "pxp-scars", "Neel state under the PXP chain; arrow flips with the revivals"},
    {ExperimentKind::kWavepacket, "wavepacket",
     "reconstructed right-moving single-flip wavepacket under the transverse Ising chain"},
    {ExperimentKind::kTheorem, "theorem", "zero-influence conditions for the engineered Ising acausal state"},
    {ExperimentKind::kQec, "qec", "error-corrected causal influence for stabilizer codes"},
    {ExperimentKind::kSdo, "sdo", "superdensity operator and its two-time Pauli correlator table"},
    {ExperimentKind::kCustom, "custom", "arrow-of-time field for a user-specified model and state"},
};

constexpr int kDenseEciMaxQubits = 10;

bool is_field(ExperimentKind k) {
  return k == ExperimentKind::kIsingFringe || k == ExperimentKind::kTwoArrows || k == ExperimentKind::kPxpScars ||
         k == ExperimentKind::kWavepacket || k == ExperimentKind::kCustom;
}

[[noreturn]] void bad(const JsonLocator& where, const std::string& pointer, const std::string& msg) {
  throw ConfigError(pointer + ": " + msg, where.line(pointer));
}

void check_site(const JsonLocator& where, const std::string& pointer, Site s, int n) {
  if (s < 0 || s >= n) bad(where, pointer, "site " + std::to_string(s) + " outside [0, " + std::to_string(n) + ")");
}

std::string zeros(int n) { return std::string(static_cast<std::size_t>(n), '0'); }

std::string neel(int n) {
  std::string s;
  for (int j = 0; j < n; ++j) s += (j % 2 == 0) ? '0' : '1';
  return s;
}

json state_json(const StateVector& psi) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
    amps.push_back({psi.amplitudes()[i].real(), psi.amplitudes()[i].imag()});
  }
  return amps;
}

std::vector<int> interior_slices(const AotField& f) {
  std::vector<int> out;
  for (int t = 1; t + 1 < f.n_slices; ++t) out.push_back(t);
  return out;
}

int sign(double v) { return (v > 0) - (v < 0); }

Vec logical_vector(const std::string& kind, int k, double t, std::uint64_t seed) {
  const Eigen::Index D = Eigen::Index{1} << k;
  if (kind == "zero") return Vec::Unit(D, 0);
  if (kind == "plus") return Vec::Constant(D, cplx(1.0 / std::sqrt(static_cast<double>(D)), 0.0));
  if (kind == "random") {
    Rng rng(seed);
    return StateVector::random(k, rng).amplitudes();
  }
  const ProtectedFamily fam = kind == "z-eigen"   ? ProtectedFamily::kZEigen
                              : kind == "x-eigen" ? ProtectedFamily::kXEigen
                              : kind == "bell"    ? ProtectedFamily::kBell
                                                  : ProtectedFamily::kOneParameter;
  return protected_logical_state(fam, k, t);
}

std::optional<ProtectedFamily> family_of(const std::string& kind) {
  if (kind == "z-eigen") return ProtectedFamily::kZEigen;
  if (kind == "x-eigen") return ProtectedFamily::kXEigen;
  if (kind == "bell") return ProtectedFamily::kBell;
  if (kind == "one-parameter") return ProtectedFamily::kOneParameter;
  return std::nullopt;
}

StabilizerCode make_code(const ExperimentConfig& cfg) {
  if (cfg.qec_code == "five-qubit") return five_qubit_blocks(cfg.qec_size);
  if (cfg.qec_code == "repetition") return repetition_x(cfg.qec_size);
  return iceberg(cfg.qec_size);
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& e : kKinds) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& e : kKinds) {
    if (name == e.name) return e.kind;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<ExperimentInfo> list_experiments() {
  std::vector<ExperimentInfo> out;
  for (const auto& e : kKinds) out.push_back({e.kind, e.description});
  return out;
}

HamiltonianSpec build_model(const ModelSpec& m, int n) {
  if (m.name == "pxp") return build_pxp(n);
  if (m.name == "zero") return HamiltonianSpec(n);
  return build_ising(n, m.J, m.hx, m.hz);
}

HamiltonianSpec restrict_terms(const HamiltonianSpec& H, Site lo, Site hi) {
  HamiltonianSpec out(H.n_qubits());
  for (const auto& term : H.terms()) {
    bool inside = true;
    for (Site s = 0; s < H.n_qubits(); ++s) {
      if (term.string.letter(s) != Pauli::I && (s < lo || s >= hi)) inside = false;
    }
    if (inside) out.add(term.coef, term.string);
  }
  return out;
}

StateVector wavepacket_state(int n, double momentum, double center, double width) {
  if (center < 0.0) center = 0.5 * (n - 1);
  Vec amps = Vec::Zero(Eigen::Index{1} << n);
  for (Site x = 0; x < n; ++x) {
    const double g = std::exp(-(x - center) * (x - center) / (4.0 * width * width));
    amps[Eigen::Index{1} << (n - 1 - x)] = std::polar(g, momentum * x);
  }
  amps.normalize();
  return {n, amps};
}

StateVector two_sided_state(const HamiltonianSpec& H, const std::string& letters, double tau, double tol) {
  const int n = H.n_qubits();
  const Propagator left(restrict_terms(H, 0, n / 2), tol);
  const Propagator right(restrict_terms(H, n / 2, n), tol);
  const Propagator full(H, tol);
  Vec v = StateVector::product(letters).amplitudes();
  v = left.apply(v, tau);
  v = right.apply(v, -tau);
  return {n, full.apply(v, -tau)};
}

StateVector initial_state(const ExperimentConfig& cfg, const HamiltonianSpec& H) {
  const int n = cfg.n_qubits;
  const StateSpec& s = cfg.state;
  const std::string letters = s.letters.empty() ? zeros(n) : s.letters;
  if (s.kind == "product") return StateVector::product(letters);
  if (s.kind == "neel") return StateVector::product(neel(n));
  if (s.kind == "backward") return Propagator(H, cfg.tolerance).apply(StateVector::product(letters), -s.tau);
  if (s.kind == "two-sided") return two_sided_state(H, letters, s.tau, cfg.tolerance);
  if (s.kind == "wavepacket") return wavepacket_state(n, s.momentum, s.center, s.width);
  if (s.kind == "acausal") {
    if (cfg.thm_variant == "engineered") {
      return build_ising_acausal_state(n, cfg.thm_tau, cfg.thm_q, cfg.thm_x, cfg.thm_x_prime);
    }
    return ising_acausal_branch(n, cfg.thm_tau, cfg.thm_q, cfg.thm_x, cfg.thm_x_prime,
                                cfg.thm_variant == "branch1" ? 1 : 2);
  }
  Rng rng(s.seed);
  return StateVector::random(n, rng);
}

ExperimentConfig load_config(const json& doc, const JsonLocator& where) {
  validate_schema(doc, config_schema(), where);
  return resolve_config(doc, where);
}

ExperimentConfig resolve_config(const json& doc, const JsonLocator& where) {
  ExperimentConfig c;
  c.experiment = experiment_from_string(doc.at("experiment").get<std::string>());
  const ExperimentKind e = c.experiment;

  // Experiment defaults.
  double T = 0.1;
  switch (e) {
    case ExperimentKind::kIsingFringe:
      T = 1.2;
      c.state.kind = "backward";
      break;
    case ExperimentKind::kTwoArrows:
      T = 0.3;
      c.state.kind = "two-sided";
      break;
    case ExperimentKind::kPxpScars:
      T = 57.0;
      c.dt = 0.05;
      c.model.name = "pxp";
      c.state.kind = "neel";
      break;
    case ExperimentKind::kWavepacket:
      T = 0.65;
      c.state.kind = "wavepacket";
      break;
    case ExperimentKind::kTheorem:
      c.n_qubits = 6;
      c.model = {"ising", 1.0, 0.0, 0.0};
      c.state.kind = "acausal";
      break;
    case ExperimentKind::kQec: c.state.kind = "encoded"; break;
    case ExperimentKind::kSdo:
      c.n_qubits = 4;
      c.state.kind = "random";
      c.sdo_a = {{0}, 0.0};
      c.sdo_b = {{1}, 0.5};
      break;
    case ExperimentKind::kCustom: break;
  }

  c.n_qubits = doc.value("n_qubits", c.n_qubits);
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    const std::string name = m["name"].get<std::string>();
    if (name != c.model.name) c.model = ModelSpec{name, 1.0, name == "ising" ? 0.01 : 0.0, name == "ising" ? -0.21 : 0.0};
    c.model.J = m.value("J", c.model.J);
    c.model.hx = m.value("hx", c.model.hx);
    c.model.hz = m.value("hz", c.model.hz);
    if (name != "ising" && (m.contains("J") || m.contains("hx") || m.contains("hz"))) {
      bad(where, "/model", "J, hx and hz apply to the ising model only");
    }
  }
  c.dt = doc.value("dt", c.dt);
  c.dx = doc.value("dx", c.dx);
  c.tolerance = doc.value("tolerance", c.tolerance);
  if (doc.contains("n_steps") && doc.contains("T")) bad(where, "/n_steps", "give either T or n_steps, not both");
  if (doc.contains("n_steps")) {
    c.n_steps = doc["n_steps"].get<int>();
  } else {
    T = doc.value("T", T);
    const double steps = T / c.dt;
    c.n_steps = static_cast<int>(std::lround(steps));
    if (std::abs(steps - c.n_steps) > 1e-6 * std::max(1.0, steps)) {
      bad(where, doc.contains("T") ? "/T" : "/dt", "T must be an integer multiple of dt");
    }
  }
  c.T = c.n_steps * c.dt;
  if (is_field(e) || e == ExperimentKind::kCustom) {
    if (c.n_steps < 1) bad(where, "/T", "field experiments need at least one time step");
  }
  c.state.tau = c.T / 2;

  const int n = c.n_qubits;
  if (e != ExperimentKind::kQec) {
    if (c.model.name == "ising" && n < 2) bad(where, "/n_qubits", "ising model needs n_qubits >= 2");
    if (c.model.name == "pxp" && n < 3) bad(where, "/n_qubits", "pxp model needs n_qubits >= 3");
  }

  if (doc.contains("initial_state")) {
    const auto& s = doc["initial_state"];
    c.state.kind = s.value("kind", c.state.kind);
    c.state.letters = s.value("letters", std::string());
    c.state.tau = s.value("tau", c.state.tau);
    c.state.momentum = s.value("momentum", c.state.momentum);
    c.state.center = s.value("center", c.state.center);
    c.state.width = s.value("width", c.state.width);
    c.state.seed = s.value("seed", c.state.seed);
    c.state.logical = s.value("logical", c.state.logical);
    if (!c.state.letters.empty() && static_cast<int>(c.state.letters.size()) != n) {
      bad(where, "/initial_state/letters", "needs exactly n_qubits = " + std::to_string(n) + " letters");
    }
    if (c.state.kind == "two-sided" && n < 2) bad(where, "/initial_state/kind", "two-sided needs n_qubits >= 2");
  }
  const bool encoded = c.state.kind == "encoded";
  if (encoded != (e == ExperimentKind::kQec)) {
    bad(where, "/initial_state/kind", "encoded states belong to the qec experiment only");
  }
  if ((c.state.kind == "acausal") != (e == ExperimentKind::kTheorem)) {
    bad(where, "/initial_state/kind", "acausal states belong to the theorem experiment only");
  }

  if (doc.contains("ci_method")) {
    const auto& m = doc["ci_method"];
    c.monte_carlo = m["kind"].get<std::string>() == "monte-carlo";
    c.samples = m.value("samples", c.samples);
    c.mc_seed = m.value("seed", c.mc_seed);
    if (!c.monte_carlo && (m.contains("samples") || m.contains("seed"))) {
      bad(where, "/ci_method", "samples and seed apply to monte-carlo only");
    }
  }

  if (doc.contains("ci")) {
    const auto& s = doc["ci"];
    c.ci_a = s.value("A", c.ci_a);
    c.ci_b = s.value("B", c.ci_b);
    c.ci_t = s.value("t", c.ci_t);
    c.ci_at = s.value("at", c.ci_at);
  }
  check_site(where, "/ci/A", c.ci_a, n);
  if (e != ExperimentKind::kQec) check_site(where, "/ci/B", c.ci_b, n);

  if (doc.contains("theorem")) {
    const auto& s = doc["theorem"];
    c.thm_q = s.value("q", c.thm_q);
    c.thm_x = s.value("x", c.thm_x);
    c.thm_x_prime = s.value("x_prime", c.thm_x_prime);
    c.thm_tau = s.value("tau", c.thm_tau);
    c.thm_variant = s.value("variant", c.thm_variant);
    c.thm_tolerance = s.value("tolerance", c.thm_tolerance);
  }
  if (e == ExperimentKind::kTheorem) {
    check_site(where, "/theorem/q", c.thm_q, n);
    check_site(where, "/theorem/x", c.thm_x, n);
    check_site(where, "/theorem/x_prime", c.thm_x_prime, n);
    if (c.thm_q == c.thm_x || c.thm_q == c.thm_x_prime || c.thm_x == c.thm_x_prime) {
      bad(where, "/theorem", "q, x and x_prime must be distinct");
    }
  }

  if (doc.contains("qec")) {
    const auto& s = doc["qec"];
    c.qec_code = s.value("code", c.qec_code);
    c.qec_size = s.value("size", c.qec_code == "repetition" ? 3 : c.qec_code == "iceberg" ? 2 : 1);
    c.qec_t = s.value("t", c.qec_t);
    c.qec_h_z = s.value("h_z", c.qec_h_z);
    c.qec_source = s.value("source", c.qec_source);
    if (s.contains("dt_values")) c.qec_dt_values = s["dt_values"].get<std::vector<double>>();
  }
  if (e == ExperimentKind::kQec) {
    if (c.qec_code == "five-qubit" && c.qec_size > 3) bad(where, "/qec/size", "five-qubit blocks: size 1..3");
    if (c.qec_code == "repetition" && c.qec_size < 2) bad(where, "/qec/size", "repetition code: size 2..12");
    if (c.qec_code == "iceberg" && (c.qec_size % 2 != 0 || c.qec_size > 10)) {
      bad(where, "/qec/size", "iceberg code: even size up to 10");
    }
    const int nq = c.qec_code == "five-qubit" ? 5 * c.qec_size
                   : c.qec_code == "repetition" ? c.qec_size
                                                : c.qec_size + 2;
    if (doc.contains("n_qubits") && c.n_qubits != nq) bad(where, "/n_qubits", "fixed by the code: " + std::to_string(nq));
    c.n_qubits = nq;
    check_site(where, "/qec/source", c.qec_source, nq);
    const int k = c.qec_code == "five-qubit" ? c.qec_size : c.qec_code == "repetition" ? 1 : c.qec_size;
    const auto fam = family_of(c.state.logical);
    if (fam && c.qec_code != "five-qubit") bad(where, "/initial_state/logical", "families are defined for five-qubit blocks");
    if (fam && k < 2) bad(where, "/initial_state/logical", "families need size >= 2");
    if ((fam == ProtectedFamily::kBell || fam == ProtectedFamily::kOneParameter) && k < 3) {
      bad(where, "/initial_state/logical", "entangled families need size >= 3");
    }
  }

  if (doc.contains("sdo")) {
    const auto& s = doc["sdo"];
    c.sdo_a = {s["region_a"]["sites"].get<std::vector<Site>>(), s["region_a"].value("t", 0.0)};
    c.sdo_b = {s["region_b"]["sites"].get<std::vector<Site>>(), s["region_b"].value("t", 0.0)};
    c.sdo_coupling = s.value("coupling", std::string("rounds")) == "interleaved" ? CouplingOrder::kInterleaved
                                                                                 : CouplingOrder::kRounds;
  }
  if (e == ExperimentKind::kSdo) {
    if (n > 12) bad(where, "/n_qubits", "sdo supports at most 12 system qubits");
    for (const auto* r : {&c.sdo_a, &c.sdo_b}) {
      const std::string p = r == &c.sdo_a ? "/sdo/region_a/sites" : "/sdo/region_b/sites";
      std::set<Site> seen;
      for (Site s : r->sites) {
        check_site(where, p, s, n);
        if (!seen.insert(s).second) bad(where, p, "repeated site");
      }
    }
    if (c.sdo_a.t == c.sdo_b.t) {
      for (Site s : c.sdo_a.sites) {
        if (std::find(c.sdo_b.sites.begin(), c.sdo_b.sites.end(), s) != c.sdo_b.sites.end()) {
          bad(where, "/sdo", "equal-time regions must be disjoint");
        }
      }
    }
  }

  if (doc.contains("output")) {
    const auto& s = doc["output"];
    c.out_dir = s.value("dir", c.out_dir);
    c.out_prefix = s.value("prefix", c.out_prefix);
    c.svg = s.value("svg", c.svg);
  }

  c.resolved = {
      {"experiment", to_string(e)},
      {"n_qubits", c.n_qubits},
      {"model", {{"name", c.model.name}, {"J", c.model.J}, {"hx", c.model.hx}, {"hz", c.model.hz}}},
      {"dt", c.dt},
      {"T", c.T},
      {"n_steps", c.n_steps},
      {"dx", c.dx},
      {"tolerance", c.tolerance},
      {"initial_state",
       {{"kind", c.state.kind},
        {"letters", c.state.letters},
        {"tau", c.state.tau},
        {"momentum", c.state.momentum},
        {"center", c.state.center},
        {"width", c.state.width},
        {"seed", c.state.seed},
        {"logical", c.state.logical}}},
      {"ci_method",
       {{"kind", c.monte_carlo ? "monte-carlo" : "exact"}, {"samples", c.samples}, {"seed", c.mc_seed}}},
      {"ci", {{"A", c.ci_a}, {"B", c.ci_b}, {"t", c.ci_t}, {"at", c.ci_at}}},
      {"theorem",
       {{"q", c.thm_q},
        {"x", c.thm_x},
        {"x_prime", c.thm_x_prime},
        {"tau", c.thm_tau},
        {"variant", c.thm_variant},
        {"tolerance", c.thm_tolerance}}},
      {"qec",
       {{"code", c.qec_code},
        {"size", c.qec_size},
        {"t", c.qec_t},
        {"h_z", c.qec_h_z},
        {"source", c.qec_source},
        {"dt_values", c.qec_dt_values}}},
      {"sdo",
       {{"region_a", {{"sites", c.sdo_a.sites}, {"t", c.sdo_a.t}}},
        {"region_b", {{"sites", c.sdo_b.sites}, {"t", c.sdo_b.t}}},
        {"coupling", c.sdo_coupling == CouplingOrder::kRounds ? "rounds" : "interleaved"}}},
      {"output", {{"dir", c.out_dir}, {"prefix", c.out_prefix}, {"svg", c.svg}}},
  };
  return c;
}

AotField compute_field(const ExperimentConfig& cfg) {
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const SpacetimeLattice lattice(H, initial_state(cfg, H), cfg.dt, cfg.n_steps, cfg.dx, cfg.tolerance);
  return aot_field(lattice);
}

RunOutput run_field(const ExperimentConfig& cfg) {
  RunOutput out;
  const AotField f = compute_field(cfg);
  json field = field_json(f);
  field["experiment"] = to_string(cfg.experiment);
  out.files["field.json"] = dump(field);
  out.files["entropy.csv"] = entropy_csv(f);
  json summary = {{"max_equal_time_ci", max_equal_time_ci(f)}};
  if (cfg.svg) {
    const auto r = field_svg(f, to_string(cfg.experiment));
    out.files["field.svg"] = r.svg;
    summary["svg_arrow_scale"] = r.arrow_scale;
  }
  switch (cfg.experiment) {
    case ExperimentKind::kIsingFringe: {
      const auto d = fringe_diagnostic(f);
      summary["fringe"] = {{"sign_change_everywhere", d.sign_change_everywhere},
                           {"mean_v_t_before", d.mean_before},
                           {"mean_v_t_after", d.mean_after}};
      break;
    }
    case ExperimentKind::kTwoArrows: {
      const auto d = two_arrows_diagnostic(f);
      summary["two_arrows"] = {{"opposite_halves", d.opposite_halves},
                               {"v_x_peak_at_interface", d.v_x_peak_at_interface},
                               {"mean_v_t", d.mean_v_t},
                               {"mean_abs_v_x", d.mean_abs_v_x}};
      break;
    }
    case ExperimentKind::kPxpScars: {
      const auto d = pxp_diagnostic(f);
      summary["pxp"] = {{"r_sign_vs_purity_change", d.r_sign_vs_purity_change},
                        {"r_sign_vs_entropy", d.r_sign_vs_entropy},
                        {"r_v_t_vs_purity_change", d.r_v_t_vs_purity_change}};
      break;
    }
    case ExperimentKind::kWavepacket:
      out.notes.push_back("wavepacket initial state is a reconstruction: Gaussian single-flip superposition over |0...0>");
      break;
    default: break;
  }
  out.summary = summary;
  out.tolerances["evolution"] = cfg.tolerance;
  if (cfg.n_qubits < 20) out.notes.push_back("desk-scale chain of " + std::to_string(cfg.n_qubits) + " qubits");
  return out;
}

RunOutput run_evolve(const ExperimentConfig& cfg) {
  RunOutput out;
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const SpacetimeLattice lattice(H, initial_state(cfg, H), cfg.dt, cfg.n_steps, cfg.dx, cfg.tolerance);
  AotField f;
  f.n_slices = lattice.n_slices();
  f.n_sites = lattice.n_sites();
  f.dt = cfg.dt;
  f.dx = cfg.dx;
  f.entropy = entropy_map(lattice);
  out.files["entropy.csv"] = entropy_csv(f);
  const StateVector& last = lattice.slice(lattice.n_steps());
  const Vec& a = lattice.slice(0).amplitudes();
  const Vec& b = last.amplitudes();
  out.files["state.json"] = dump({{"n_qubits", cfg.n_qubits},
                                  {"t", cfg.T},
                                  {"norm", last.norm()},
                                  {"energy_initial", H.expectation(a)},
                                  {"energy_final", H.expectation(b)},
                                  {"amplitudes", state_json(last)}});
  out.summary = {{"norm", last.norm()}, {"energy_drift", std::abs(H.expectation(b) - H.expectation(a))}};
  out.tolerances["evolution"] = cfg.tolerance;
  return out;
}

RunOutput run_ci(const ExperimentConfig& cfg) {
  RunOutput out;
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const Propagator U(H, cfg.tolerance);
  StateVector psi = initial_state(cfg, H);
  if (cfg.ci_at != 0.0) psi = U.apply(psi, cfg.ci_at);
  const CiValue v = cfg.monte_carlo ? ci_monte_carlo(psi, U, cfg.ci_a, cfg.ci_b, cfg.ci_t, cfg.samples, cfg.mc_seed)
                                    : ci_exact(psi, U, cfg.ci_a, cfg.ci_b, cfg.ci_t);
  json r = {{"A", cfg.ci_a}, {"B", cfg.ci_b}, {"t", cfg.ci_t}, {"at", cfg.ci_at},
            {"method", to_string(v.method)}, {"value", v.value}};
  if (cfg.monte_carlo) {
    r["std_error"] = v.std_error;
    r["samples"] = cfg.samples;
    out.seeds["monte_carlo"] = cfg.mc_seed;
  } else {
    r["spectral"] = v.spectral;
  }
  out.files["result.json"] = dump(r);
  out.summary = r;
  out.tolerances["evolution"] = cfg.tolerance;
  return out;
}

RunOutput run_theorem(const ExperimentConfig& cfg) {
  RunOutput out;
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const Propagator U(H, cfg.tolerance);
  const StateVector psi = initial_state(cfg, H);
  const auto rep = theorem_check(psi, cfg.thm_q, cfg.thm_x, U, cfg.thm_tau, cfg.thm_tolerance);
  const double ci = ci_exact(psi, U, cfg.thm_q, cfg.thm_x, cfg.thm_tau).value;
  json residuals = json::array();
  const char* letters = "XYZ";
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const auto& r = rep.residuals[static_cast<std::size_t>(3 * a + b)];
      residuals.push_back({{"alpha", std::string(1, letters[a])},
                           {"beta", std::string(1, letters[b])},
                           {"diagonal", r[0]},
                           {"off_diagonal", r[1]}});
    }
  }
  json r = {{"variant", cfg.thm_variant},
            {"q", cfg.thm_q},
            {"x", cfg.thm_x},
            {"x_prime", cfg.thm_x_prime},
            {"tau", cfg.thm_tau},
            {"p1", rep.p1},
            {"p2", rep.p2},
            {"degenerate", rep.degenerate},
            {"rank_one", rep.rank_one},
            {"rotated_max", rep.rotated_max},
            {"max_residual", rep.max_residual()},
            {"verdict", rep.verdict},
            {"implied_ci", rep.implied_ci},
            {"ci_exact", ci},
            {"residuals", residuals}};
  out.files["result.json"] = dump(r);
  out.summary = {{"verdict", rep.verdict}, {"max_residual", rep.max_residual()}, {"ci_exact", ci}};
  out.tolerances["theorem"] = cfg.thm_tolerance;
  out.tolerances["evolution"] = cfg.tolerance;
  out.seeds["degenerate_rotation"] = 1;
  return out;
}

RunOutput run_qec(const ExperimentConfig& cfg) {
  RunOutput out;
  json r = {{"code", cfg.qec_code}, {"size", cfg.qec_size}, {"n_qubits", cfg.n_qubits}};
  if (cfg.qec_code == "iceberg") {
    json rows = json::array();
    for (double dt : cfg.qec_dt_values) {
      rows.push_back({{"dt", dt}, {"h_z", cfg.qec_h_z},
                      {"value", iceberg_self_influence(cfg.qec_size, dt, cfg.qec_h_z).value}});
    }
    r["self_influence"] = rows;
    out.files["result.json"] = dump(r);
    out.summary = r;
    return out;
  }

  const StabilizerCode code = make_code(cfg);
  const RecoveryChannel channel(code);
  const int k = code.k();
  const Vec logical = logical_vector(cfg.state.logical, k, cfg.qec_t, cfg.state.seed);
  const StateVector psi = code.encode(logical);
  const Propagator U(logical_xx_hamiltonian(code, cfg.qec_h_z), cfg.tolerance);
  const Propagator* Up = cfg.qec_t != 0.0 ? &U : nullptr;
  r["logical_state"] = cfg.state.logical;
  r["t"] = cfg.qec_t;
  r["h_z"] = cfg.qec_h_z;
  r["source"] = cfg.qec_source;
  json rows = json::array();
  if (code.n_qubits() > kDenseEciMaxQubits) {
    out.notes.push_back("dense ECI table skipped above " + std::to_string(kDenseEciMaxQubits) + " physical qubits");
  }
  const std::pair<ChannelPair, bool> pairs[] = {
      {ChannelPair::kLogicalLogical, false}, {ChannelPair::kLogicalAncilla, false},
      {ChannelPair::kLogicalAncilla, true},  {ChannelPair::kPhysicalLogical, false},
      {ChannelPair::kPhysicalAncilla, false}, {ChannelPair::kPhysicalAncilla, true}};
  for (const auto& [pair, measured] : pairs) {
    if (code.n_qubits() > kDenseEciMaxQubits) break;
    EciRequest req;
    req.pair = pair;
    req.measured = measured;
    req.source_site = cfg.qec_source;
    req.fast_path = true;
    const EciValue v = eci_exact(channel, psi, req, Up, cfg.qec_t);
    json row = {{"pair", to_string(pair)}, {"measured", measured}, {"value", v.value}};
    if (v.closed_form >= 0.0) row["closed_form"] = v.closed_form;
    rows.push_back(row);
  }
  r["eci"] = rows;
  if (cfg.qec_code == "repetition") {
    const double z = std::real(code.logical_z(0).expectation(psi.amplitudes()));
    const RepCodeCi f = rep_code_ci(z, static_cast<int>(code.n_syndromes()));
    r["repetition_formulas"] = {{"z_expectation", z},
                                {"phys_logical", f.phys_logical},
                                {"phys_anc_pre", f.phys_anc_pre},
                                {"phys_anc_post", f.phys_anc_post}};
  }
  if (const auto fam = family_of(cfg.state.logical)) {
    const auto check = check_protected(code, *fam, cfg.qec_t);
    r["protected"] = {{"family", to_string(*fam)},
                      {"eci", check.eci},
                      {"max_residual", check.report.max_residual()},
                      {"verdict", check.report.verdict}};
  }
  if (cfg.state.logical == "random") out.seeds["logical_state"] = cfg.state.seed;
  out.files["result.json"] = dump(r);
  out.summary = r;
  out.tolerances["evolution"] = cfg.tolerance;
  return out;
}

RunOutput run_sdo(const ExperimentConfig& cfg) {
  RunOutput out;
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const Propagator U(H, cfg.tolerance);
  const StateVector psi = initial_state(cfg, H);
  const auto sdo = sdo_build(psi, U, cfg.sdo_a, cfg.sdo_b, cfg.sdo_coupling);
  json table = json::array();
  for (const auto& e : correlator_table(sdo)) {
    table.push_back({{"a", e.a}, {"b", e.b}, {"re", e.value.real()}, {"im", e.value.imag()}});
  }
  json r = {{"region_a", {{"sites", cfg.sdo_a.sites}, {"t", cfg.sdo_a.t}}},
            {"region_b", {{"sites", cfg.sdo_b.sites}, {"t", cfg.sdo_b.t}}},
            {"ancilla_count", sdo.ancilla_count()},
            {"trace", sdo.matrix().trace().real()},
            {"min_eigenvalue", sdo.min_eigenvalue()},
            {"correlators", table}};
  out.files["result.json"] = dump(r);
  out.summary = {{"ancilla_count", sdo.ancilla_count()}, {"entries", table.size()},
                 {"min_eigenvalue", sdo.min_eigenvalue()}};
  if (cfg.state.kind == "random") out.seeds["initial_state"] = cfg.state.seed;
  out.tolerances["evolution"] = cfg.tolerance;
  return out;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::kTheorem: return run_theorem(cfg);
    case ExperimentKind::kQec: return run_qec(cfg);
    case ExperimentKind::kSdo: return run_sdo(cfg);
    default: return run_field(cfg);
  }
}

FringeDiagnostic fringe_diagnostic(const AotField& f) {
  FringeDiagnostic d;
  const double half = 0.5 * (f.n_slices - 1);
  d.sign_change_everywhere = true;
  for (Site x = 0; x < f.n_sites; ++x) {
    double before = 0.0;
    double after = 0.0;
    int nb = 0;
    int na = 0;
    for (int t : interior_slices(f)) {
      if (t < half) {
        before += f.at(t, x).v_t;
        ++nb;
      } else if (t > half) {
        after += f.at(t, x).v_t;
        ++na;
      }
    }
    d.mean_before.push_back(nb > 0 ? before / nb : 0.0);
    d.mean_after.push_back(na > 0 ? after / na : 0.0);
    if (x > 0 && x + 1 < f.n_sites) {
      d.sign_change_everywhere = d.sign_change_everywhere && sign(d.mean_before.back()) != 0 &&
                                 sign(d.mean_before.back()) == -sign(d.mean_after.back());
    }
  }
  return d;
}

TwoArrowsDiagnostic two_arrows_diagnostic(const AotField& f) {
  TwoArrowsDiagnostic d;
  const auto ts = interior_slices(f);
  for (Site x = 0; x < f.n_sites; ++x) {
    double vt = 0.0;
    double vx = 0.0;
    for (int t : ts) {
      vt += f.at(t, x).v_t;
      vx += std::abs(f.at(t, x).v_x);
    }
    d.mean_v_t.push_back(ts.empty() ? 0.0 : vt / static_cast<double>(ts.size()));
    d.mean_abs_v_x.push_back(ts.empty() ? 0.0 : vx / static_cast<double>(ts.size()));
  }
  const int n = f.n_sites;
  d.opposite_halves = true;
  for (Site x = 0; x < n; ++x) {
    const int want = (x < n / 2) ? 1 : -1;
    if (2 * x + 1 == n) continue;  // odd chains: middle column belongs to neither half
    d.opposite_halves = d.opposite_halves && sign(d.mean_v_t[static_cast<std::size_t>(x)]) == want;
  }
  if (n >= 4) {
    const auto first = d.mean_abs_v_x.begin() + 1;
    const auto last = d.mean_abs_v_x.end() - 1;
    const auto peak = static_cast<Site>(std::max_element(first, last) - d.mean_abs_v_x.begin());
    d.v_x_peak_at_interface = peak == n / 2 - 1 || peak == n / 2 || (n % 2 == 1 && peak == n / 2 + 1);
  }
  return d;
}

PxpDiagnostic pxp_diagnostic(const AotField& f) {
  std::vector<double> sgn;
  std::vector<double> vt;
  std::vector<double> entropy;
  std::vector<double> dpurity;
  for (int t : interior_slices(f)) {
    double s = 0.0;
    double v = 0.0;
    double e = 0.0;
    double dp = 0.0;
    for (Site x = 0; x < f.n_sites; ++x) {
      s += sign(f.at(t, x).v_t);
      v += f.at(t, x).v_t;
      e += f.entropy.vn(t, x);
      dp += std::exp(-f.entropy.s2(t + 1, x)) - std::exp(-f.entropy.s2(t, x));
    }
    sgn.push_back(s);
    vt.push_back(v);
    entropy.push_back(e);
    dpurity.push_back(dp);
  }
  return {pearson(sgn, dpurity), pearson(sgn, entropy), pearson(vt, dpurity)};
}

double max_equal_time_ci(const AotField& f) {
  double m = 0.0;
  for (const auto& v : f.vectors) {
    for (const auto& c : v.contributions) {
      if (c.neighbor.t == v.t) m = std::max(m, std::abs(c.ci));
    }
  }
  return m;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson needs two equal series");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

AotField time_reversed_field(const ExperimentConfig& cfg, const AotField& f) {
  const auto H = build_model(cfg.model, cfg.n_qubits);
  const SpacetimeLattice forward(H, initial_state(cfg, H), cfg.dt, cfg.n_steps, cfg.dx, cfg.tolerance);
  const Vec end = forward.slice(forward.n_steps()).amplitudes().conjugate();
  const SpacetimeLattice reversed(H, StateVector(cfg.n_qubits, end), cfg.dt, cfg.n_steps, cfg.dx, cfg.tolerance);
  const AotField g = aot_field(reversed);
  AotField out = f;
  const int last = f.n_slices - 1;
  for (int t = 0; t < f.n_slices; ++t) {
    for (Site x = 0; x < f.n_sites; ++x) {
      auto& v = out.vectors[static_cast<std::size_t>(t * f.n_sites + x)];
      const auto& w = g.at(last - t, x);
      v.v_t = -w.v_t;
      v.v_x = w.v_x;
      v.contributions.clear();
    }
  }
  return out;
}

}  // namespace chronoscope
