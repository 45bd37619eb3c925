// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks
//
// Command-line front end: loads a flat key = value config, applies flag
// overrides, runs one scheme or a sweep, and writes trace.csv, report.json,
// and sweep.csv for plotting.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "outmin/outmin.hpp"

namespace {

outmin::SweepSpec parse_sweep_arg(const std::string& arg,
                                  const std::vector<std::string>& scheme_names) {
  const size_t eq = arg.find('=');
  if (eq == std::string::npos)
    throw outmin::ConfigError("--sweep expects AXIS=lo:hi:steps");
  outmin::SweepSpec spec;
  spec.axis = outmin::sweep_axis_from_name(arg.substr(0, eq));
  const std::string range = arg.substr(eq + 1);
  double lo = 0, hi = 0;
  int steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(range);
  if (!(is >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 1)
    throw outmin::ConfigError("--sweep range must be lo:hi:steps with steps >= 1");
  for (int i = 0; i < steps; ++i) {
    spec.values.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
  }
  for (const std::string& name : scheme_names)
    spec.schemes.push_back(outmin::scheme_from_name(name));
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust outage-minimizing beamforming simulator for RIS-aided "
               "mmWave downlinks"};

  std::string config_path;
  std::string scheme;
  std::string sweep_arg;
  std::vector<std::string> sweep_schemes;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int mc = 0, max_iter = 0, reps = 1;

  app.add_option("--config", config_path, "Path to a key = value config file");
  app.add_option("--scheme", scheme,
                 "smm | ssca | smrt | noris | nonrobust | imperfect_csi | saa");
  app.add_option("--sweep", sweep_arg,
                 "Sweep AXIS=lo:hi:steps over p_block, elems_per_ris, n_tx, or n_users");
  app.add_option("--schemes", sweep_schemes,
                 "Comma-separated schemes for a sweep")
      ->delimiter(',');
  app.add_option("--seed", seed, "Base seed for all random substreams")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--mc", mc, "Monte Carlo evaluation samples");
  app.add_option("--max-iter", max_iter, "Solver iteration cap");
  app.add_option("--reps", reps, "Scenario repetitions per sweep cell");

  CLI11_PARSE(app, argc, argv);

  try {
    outmin::RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw outmin::ConfigError("cannot open config file " + config_path);
      std::stringstream buffer;
      buffer << is.rdbuf();
      cfg = outmin::parse_config(buffer.str());
    }
    if (!scheme.empty()) {
      outmin::scheme_from_name(scheme);
      cfg.scheme = scheme;
    }
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (mc > 0) cfg.mc_samples = mc;
    if (max_iter > 0) cfg.max_iter = max_iter;

    std::optional<outmin::SweepSpec> sweep_spec;
    if (!sweep_arg.empty()) {
      std::vector<std::string> names = sweep_schemes;
      if (names.empty()) names.push_back(cfg.scheme);
      sweep_spec = parse_sweep_arg(sweep_arg, names);
      sweep_spec->reps = reps;
    }
    return outmin::run(cfg, sweep_spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
