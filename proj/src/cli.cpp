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


#include "chronoscope/cli.hpp"

#include "chronoscope/experiments.hpp"
#include "chronoscope/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef CHRONOSCOPE_VERSION
#define CHRONOSCOPE_VERSION "dev"
#endif

namespace chronoscope {

namespace {

using Override = std::pair<std::string, json>;

struct Session {
  std::string config_path;
  std::vector<Override> overrides;
  std::vector<std::string> sets;
  std::string positional;
  bool no_svg = false;
};

template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& pointer, Session& s,
                  const std::string& help) {
  return app->add_option_function<T>(
      name, [&s, pointer](const T& v) { s.overrides.emplace_back(pointer, json(v)); }, help);
}

void common_flags(CLI::App* app, Session& s) {
  app->add_option("-c,--config", s.config_path, "JSON configuration file");
  flag<int>(app, "--n,--n-qubits", "/n_qubits", s, "number of qubits");
  flag<double>(app, "--T", "/T", s, "total time");
  flag<double>(app, "--dt", "/dt", s, "time step");
  flag<int>(app, "--steps", "/n_steps", s, "number of time steps (instead of T)");
  flag<double>(app, "--dx", "/dx", s, "lattice spacing");
  flag<double>(app, "--tol", "/tolerance", s, "evolution tolerance");
  flag<std::string>(app, "--model", "/model/name", s, "ising, pxp or zero");
  flag<double>(app, "--J", "/model/J", s, "ising coupling");
  flag<double>(app, "--hx", "/model/hx", s, "ising X field");
  flag<double>(app, "--hz", "/model/hz", s, "ising Z field");
  flag<std::string>(app, "--state", "/initial_state/kind", s, "initial state kind");
  flag<std::string>(app, "--letters", "/initial_state/letters", s, "product letters over 0 1 + -");
  flag<double>(app, "--prep-tau", "/initial_state/tau", s, "preparation time of backward and two-sided states");
  flag<std::uint64_t>(app, "--seed", "/initial_state/seed", s, "seed of random states");
  flag<std::string>(app, "--out", "/output/dir", s, "output directory");
  flag<std::string>(app, "--prefix", "/output/prefix", s, "output file prefix");
  app->add_flag("--no-svg", s.no_svg, "skip the SVG rendering");
  app->add_option("--set", s.sets, "override any key: /json/pointer=value")->take_all();
}

json override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

std::string where_prefix(const std::string& path, int line) {
  if (path.empty()) return "";
  return path + (line > 0 ? ":" + std::to_string(line) : "") + ": ";
}

json build_doc(const Session& s, JsonLocator& where) {
  json doc = json::object();
  if (!s.config_path.empty()) {
    std::ifstream f(s.config_path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file " + s.config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();
    doc = parse_config_text(text);
    where = JsonLocator(text);
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object", 1);
  for (const auto& [pointer, value] : s.overrides) doc[json::json_pointer(pointer)] = value;
  for (const auto& item : s.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || item.empty() || item[0] != '/') {
      throw ConfigError("--set expects /json/pointer=value, got '" + item + "'");
    }
    try {
      doc[json::json_pointer(item.substr(0, eq))] = override_value(item.substr(eq + 1));
    } catch (const json::exception& e) {
      throw ConfigError("--set " + item + ": " + e.what());
    }
  }
  if (s.no_svg) doc["output"]["svg"] = false;
  return doc;
}

bool field_experiment(const std::string& name) {
  return name == "ising-fringe" || name == "two-arrows" || name == "pxp-scars" || name == "wavepacket" ||
         name == "custom";
}

json build_info() {
  return {{"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"chronoscope: local arrow-of-time and causal influence toolkit", "chronoscope"};
  app.set_version_flag("--version", std::string(CHRONOSCOPE_VERSION));
  app.require_subcommand(1);

  Session s;
  auto* evolve = app.add_subcommand("evolve", "evolve an initial state; entropy CSV and final state");
  auto* ci = app.add_subcommand("ci", "causal influence between two sites");
  auto* aot = app.add_subcommand("aot-field", "arrow-of-time field for a field experiment");
  auto* run = app.add_subcommand("run", "run any experiment by name");
  auto* theorem = app.add_subcommand("theorem-check", "zero-influence conditions for the engineered state");
  auto* qec = app.add_subcommand("qec", "error-corrected causal influence");
  auto* sdo = app.add_subcommand("sdo", "superdensity operator correlator table");
  auto* list = app.add_subcommand("list-experiments", "list experiment names");
  auto* schema = app.add_subcommand("schema", "print the configuration JSON schema");

  for (auto* sub : {evolve, ci, aot, run, theorem, qec, sdo}) common_flags(sub, s);
  for (auto* sub : {evolve, ci, aot, run}) {
    sub->add_option("experiment", s.positional, "experiment name");
  }
  flag<int>(ci, "--A", "/ci/A", s, "source site");
  flag<int>(ci, "--B", "/ci/B", s, "target site");
  flag<double>(ci, "--t", "/ci/t", s, "signed lag");
  flag<double>(ci, "--at", "/ci/at", s, "evolve the initial state this long first");
  flag<std::string>(ci, "--method", "/ci_method/kind", s, "exact or monte-carlo");
  flag<long>(ci, "--samples", "/ci_method/samples", s, "Monte Carlo samples");
  flag<std::uint64_t>(ci, "--mc-seed", "/ci_method/seed", s, "Monte Carlo seed");
  flag<int>(theorem, "--q", "/theorem/q", s, "perturbed site");
  flag<int>(theorem, "--x", "/theorem/x", s, "observed site");
  flag<int>(theorem, "--x-prime", "/theorem/x_prime", s, "auxiliary site");
  flag<double>(theorem, "--tau", "/theorem/tau", s, "lag");
  flag<std::string>(theorem, "--variant", "/theorem/variant", s, "engineered, branch1 or branch2");
  flag<std::string>(qec, "--code", "/qec/code", s, "five-qubit, repetition or iceberg");
  flag<int>(qec, "--size", "/qec/size", s, "blocks, qubits or logical qubits");
  flag<double>(qec, "--t", "/qec/t", s, "evolution time under the logical XX chain");
  flag<double>(qec, "--h-z", "/qec/h_z", s, "logical Z field");
  flag<int>(qec, "--source", "/qec/source", s, "physical source qubit");
  qec->add_option_function<std::string>(
      "--logical",
      [&s](const std::string& v) {
        s.overrides.emplace_back("/initial_state/kind", "encoded");
        s.overrides.emplace_back("/initial_state/logical", v);
      },
      "logical state");
  flag<std::vector<double>>(qec, "--dt-values", "/qec/dt_values", s, "iceberg time steps")->delimiter(',');
  flag<std::vector<int>>(sdo, "--a-sites", "/sdo/region_a/sites", s, "region A sites")->delimiter(',');
  flag<double>(sdo, "--a-t", "/sdo/region_a/t", s, "region A time");
  flag<std::vector<int>>(sdo, "--b-sites", "/sdo/region_b/sites", s, "region B sites")->delimiter(',');
  flag<double>(sdo, "--b-t", "/sdo/region_b/t", s, "region B time");
  flag<std::string>(sdo, "--coupling", "/sdo/coupling", s, "rounds or interleaved");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& e : list_experiments()) out << to_string(e.kind) << "\t" << e.description << "\n";
    return kExitOk;
  }
  if (schema->parsed()) {
    out << config_schema_text();
    return kExitOk;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto start = std::chrono::steady_clock::now();

  ExperimentConfig cfg;
  JsonLocator where;
  try {
    json doc = build_doc(s, where);
    std::string experiment = s.positional;
    if (name == "theorem-check") experiment = "theorem";
    if (name == "qec" || name == "sdo") experiment = name;
    if (!experiment.empty()) {
      if (doc.contains("experiment") && doc["experiment"] != experiment) {
        throw ConfigError("/experiment: config says " + doc["experiment"].dump() + " but the command asks for " +
                              experiment,
                          where.line("/experiment"));
      }
      doc["experiment"] = experiment;
    }
    if (!doc.contains("experiment") && (name == "evolve" || name == "ci")) doc["experiment"] = "custom";
    if (name == "aot-field" && doc.contains("experiment") && doc["experiment"].is_string() &&
        !field_experiment(doc["experiment"].get<std::string>())) {
      throw ConfigError("/experiment: aot-field runs field experiments only", where.line("/experiment"));
    }
    cfg = load_config(doc, where);
    const bool fieldlike = field_experiment(to_string(cfg.experiment));
    if ((name == "evolve" || name == "ci") && !fieldlike) {
      throw ConfigError("/experiment: " + name + " needs a chain experiment", where.line("/experiment"));
    }
    if (cfg.monte_carlo && name != "ci") {
      throw ConfigError("/ci_method: monte-carlo applies to the ci subcommand only", where.line("/ci_method"));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << where_prefix(s.config_path, e.line()) << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunOutput result;
    if (name == "evolve") {
      result = run_evolve(cfg);
    } else if (name == "ci") {
      result = run_ci(cfg);
    } else {
      result = run_experiment(cfg);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    StagedOutput staged(cfg.out_dir);
    json outputs = json::array();
    for (const auto& [file, contents] : result.files) {
      staged.write(cfg.out_prefix + file, contents);
      outputs.push_back(cfg.out_prefix + file);
    }
    json manifest = {{"tool", "chronoscope"},
                     {"version", CHRONOSCOPE_VERSION},
                     {"subcommand", name},
                     {"config_file", s.config_path},
                     {"config", cfg.resolved},
                     {"seeds", result.seeds},
                     {"tolerances", result.tolerances},
                     {"threads", thread_count()},
                     {"wall_time_s", wall},
                     {"outputs", outputs},
                     {"summary", result.summary},
                     {"notes", result.notes},
                     {"build", build_info()}};
    staged.write(cfg.out_prefix + "manifest.json", dump(manifest));
    for (const auto& p : staged.commit()) out << p.string() << "\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "compute error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitOk;
}

}  // namespace chronoscope
