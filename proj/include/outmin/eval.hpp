// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_EVAL_HPP
#define OUTMIN_EVAL_HPP

#include <functional>
#include <vector>

#include "outmin/baselines.hpp"
#include "outmin/parallel.hpp"

namespace outmin {

/// Monte Carlo estimates of per-user outage and effective rate.
struct EvalReport {
  std::vector<double> outage;      // Pr{SINR_k <= gamma}
  std::vector<double> outage_se;   // binomial standard error
  double max_outage = 0.0;
  std::vector<double> eff_rate;    // E[log2(1+SINR_k) 1{SINR_k >= gamma}]
  double min_eff_rate = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

using ChannelSampler = std::function<ChannelSample(int)>;

/// Per-sample SINR matrix (n_samples x K) under a caller-supplied sampler.
inline Eigen::MatrixXd per_sample_sinr(const BeamformingState& state,
                                       int n_users, double sigma2,
                                       int n_samples, const ChannelSampler& draw) {
  if (n_samples <= 0)
    throw std::invalid_argument("per_sample_sinr: n_samples must be positive");
  Eigen::MatrixXd out(n_samples, n_users);
  parallel_for(n_samples, [&](int i) {
    const ChannelSample s = draw(i);
    for (int k = 0; k < n_users; ++k) out(i, k) = sinr(state, s, k, sigma2);
  });
  return out;
}

/// Report from a SINR matrix. Outage is the empirical frequency of
/// SINR <= gamma; the effective rate counts log2(1+SINR) only when the
/// threshold is met and zero otherwise.
inline EvalReport report_from_sinr(const Eigen::MatrixXd& sinr_matrix,
                                   double gamma, std::uint64_t seed) {
  const int n = static_cast<int>(sinr_matrix.rows());
  const int n_users = static_cast<int>(sinr_matrix.cols());
  EvalReport r;
  r.n_samples = n;
  r.seed = seed;
  r.outage.resize(n_users);
  r.outage_se.resize(n_users);
  r.eff_rate.resize(n_users);
  for (int k = 0; k < n_users; ++k) {
    int outages = 0;
    double rate = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = sinr_matrix(i, k);
      if (g <= gamma)
        ++outages;
      else
        rate += std::log2(1.0 + g);
    }
    r.outage[k] = static_cast<double>(outages) / n;
    r.outage_se[k] = std::sqrt(r.outage[k] * (1.0 - r.outage[k]) / n);
    r.eff_rate[k] = rate / n;
  }
  r.max_outage = *std::max_element(r.outage.begin(), r.outage.end());
  r.min_eff_rate = *std::min_element(r.eff_rate.begin(), r.eff_rate.end());
  return r;
}

/// Monte Carlo evaluation against the true scenario law. Samples come from
/// the evaluation substream of the scenario seed, forked per sample index,
/// so estimates are independent of worker count and evaluation order.
inline EvalReport monte_carlo_eval(const BeamformingState& state,
                                   const ScenarioConfig& cfg,
                                   const ScenarioState& st, int n_samples) {
  const Rng eval_root = Rng(cfg.seed).fork(Stream::Eval);
  auto draw = [&](int i) { return sample_channel(cfg, st, eval_root.fork(i)); };
  const Eigen::MatrixXd sinr_mat =
      per_sample_sinr(state, cfg.n_users, cfg.noise_power, n_samples, draw);
  return report_from_sinr(sinr_mat, cfg.sinr_threshold, eval_root.seed());
}

enum class SweepAxis { PBlock, RisElems, TxAntennas, Users };

inline std::string sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::PBlock: return "p_block";
    case SweepAxis::RisElems: return "elems_per_ris";
    case SweepAxis::TxAntennas: return "n_tx";
    case SweepAxis::Users: return "n_users";
  }
  return "unknown";
}

inline SweepAxis sweep_axis_from_name(const std::string& name) {
  for (SweepAxis a : {SweepAxis::PBlock, SweepAxis::RisElems,
                      SweepAxis::TxAntennas, SweepAxis::Users}) {
    if (sweep_axis_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis: " + name);
}

/// Applies an axis value to a copy of the base scenario.
inline ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                                 double value) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::PBlock:
      cfg.blockage = BlockageModel::fixed_probability(value);
      break;
    case SweepAxis::RisElems:
      cfg.elems_per_ris = static_cast<int>(std::lround(value));
      cfg.ris_rows = cfg.ris_cols = 0;
      break;
    case SweepAxis::TxAntennas:
      cfg.n_tx = static_cast<int>(std::lround(value));
      cfg.bs_rows = cfg.bs_cols = 0;
      break;
    case SweepAxis::Users:
      cfg.n_users = static_cast<int>(std::lround(value));
      break;
  }
  return cfg;
}

struct SweepCell {
  double axis_value = 0.0;
  SchemeId scheme = SchemeId::Smm;
  EvalReport report;
};

/// Trains and evaluates every (axis value, scheme) cell. All cells share the
/// base seed, so evaluation streams are paired across schemes and axis
/// values; reps > 1 averages over scenario redraws with distinct sub-seeds.
inline std::vector<SweepCell> sweep(const ScenarioConfig& base,
                                    const TrainOptions& topt, int mc_samples,
                                    SweepAxis axis,
                                    const std::vector<double>& values,
                                    const std::vector<SchemeId>& schemes,
                                    int reps = 1) {
  if (reps < 1) throw std::invalid_argument("sweep: reps must be >= 1");
  std::vector<SweepCell> cells;
  cells.reserve(values.size() * schemes.size());
  for (double v : values) {
    for (SchemeId scheme : schemes) {
      SweepCell cell;
      cell.axis_value = v;
      cell.scheme = scheme;
      std::vector<double> outage_acc, rate_acc;
      for (int rep = 0; rep < reps; ++rep) {
        ScenarioConfig cfg = apply_axis(base, axis, v);
        if (reps > 1)
          cfg.seed = detail::mix(base.seed, 0x9E37u + static_cast<std::uint64_t>(rep));
        const ScenarioState st = build_scenario_state(cfg);
        const TrainResult tr = train_scheme(cfg, st, scheme, topt);
        const EvalReport rep_i = monte_carlo_eval(tr.state, cfg, st, mc_samples);
        if (rep == 0) {
          cell.report = rep_i;
        } else {
          for (size_t k = 0; k < rep_i.outage.size(); ++k) {
            cell.report.outage[k] += rep_i.outage[k];
            cell.report.eff_rate[k] += rep_i.eff_rate[k];
          }
        }
      }
      if (reps > 1) {
        for (auto& o : cell.report.outage) o /= reps;
        for (auto& r : cell.report.eff_rate) r /= reps;
        for (size_t k = 0; k < cell.report.outage.size(); ++k)
          cell.report.outage_se[k] = std::sqrt(
              cell.report.outage[k] * (1.0 - cell.report.outage[k]) /
              (static_cast<double>(mc_samples) * reps));
        cell.report.max_outage = *std::max_element(cell.report.outage.begin(),
                                                   cell.report.outage.end());
        cell.report.min_eff_rate = *std::min_element(
            cell.report.eff_rate.begin(), cell.report.eff_rate.end());
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace outmin

#endif  // OUTMIN_EVAL_HPP
