// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_RUNNER_HPP
#define OUTMIN_RUNNER_HPP

#include <filesystem>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "outmin/config.hpp"
#include "outmin/version.hpp"

namespace outmin {

struct SweepSpec {
  SweepAxis axis = SweepAxis::PBlock;
  std::vector<double> values;
  std::vector<SchemeId> schemes;
  int reps = 1;
};

namespace detail {

inline void write_trace_csv(const std::filesystem::path& path,
                            const RunTrace& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "iter,objective,step_size_f,step_size_e,wall_ns\n";
  char buf[128];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%lld\n", r.iter,
                  r.objective_f, r.step_f, r.step_e,
                  static_cast<long long>(r.wall_ns));
    os << buf;
  }
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::string& axis_name,
                            const std::vector<SweepCell>& cells) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "axis,value,scheme,max_outage,min_eff_rate,std_err\n";
  char buf[256];
  for (const SweepCell& c : cells) {
    double se = 0.0;
    for (size_t k = 0; k < c.report.outage.size(); ++k)
      if (c.report.outage[k] == c.report.max_outage) se = c.report.outage_se[k];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%s,%.17g,%.17g,%.17g\n",
                  axis_name.c_str(), c.axis_value,
                  scheme_name(c.scheme).c_str(), c.report.max_outage,
                  c.report.min_eff_rate, se);
    os << buf;
  }
}

inline nlohmann::ordered_json config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  std::istringstream is(render_config(cfg));
  std::string line;
  while (std::getline(is, line)) {
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq - 1);
    std::string value = line.substr(eq + 2);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      j[key] = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      j[key] = value == "true";
    } else if (value.find_first_of(".eE") != std::string::npos ||
               value.find("inf") != std::string::npos) {
      j[key] = std::stod(value);
    } else {
      j[key] = std::stoll(value);
    }
  }
  return j;
}

inline void write_report_json(const std::filesystem::path& path,
                              const RunConfig& cfg, const EvalReport& report,
                              const std::string& scheme) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["scheme"] = scheme;
  j["mc_samples"] = report.n_samples;
  j["eval_seed"] = report.seed;
  j["max_outage"] = report.max_outage;
  j["min_eff_rate"] = report.min_eff_rate;
  j["outage"] = report.outage;
  j["outage_se"] = report.outage_se;
  j["eff_rate"] = report.eff_rate;
  j["config"] = config_echo(cfg);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace detail

/// Runs one training + evaluation (or a sweep) and writes trace.csv,
/// report.json, and sweep.csv into cfg.out_dir. Returns 0 on success.
inline int run(const RunConfig& cfg, const std::optional<SweepSpec>& sweep_spec) {
  const std::filesystem::path out_dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec && !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory " + out_dir.string());

  const ScenarioConfig base = cfg.to_scenario();
  const TrainOptions topt = cfg.train_options();

  if (sweep_spec) {
    const auto cells = sweep(base, topt, cfg.mc_samples, sweep_spec->axis,
                             sweep_spec->values, sweep_spec->schemes,
                             sweep_spec->reps);
    detail::write_sweep_csv(out_dir / "sweep.csv",
                            sweep_axis_name(sweep_spec->axis), cells);
    RunTrace empty;
    detail::write_trace_csv(out_dir / "trace.csv", empty);
    if (!cells.empty())
      detail::write_report_json(out_dir / "report.json", cfg,
                                cells.back().report,
                                scheme_name(cells.back().scheme));
    return 0;
  }

  const SchemeId scheme = scheme_from_name(cfg.scheme);
  const ScenarioState st = build_scenario_state(base);
  const TrainResult tr = train_scheme(base, st, scheme, topt);
  const EvalReport report = monte_carlo_eval(tr.state, base, st, cfg.mc_samples);

  detail::write_trace_csv(out_dir / "trace.csv", tr.trace);
  detail::write_report_json(out_dir / "report.json", cfg, report, cfg.scheme);

  std::vector<SweepCell> single(1);
  single[0].axis_value = base.blockage.fixed ? base.blockage.p_fixed : 0.0;
  single[0].scheme = scheme;
  single[0].report = report;
  detail::write_sweep_csv(out_dir / "sweep.csv", "p_block", single);
  return 0;
}

}  // namespace outmin

#endif  // OUTMIN_RUNNER_HPP
