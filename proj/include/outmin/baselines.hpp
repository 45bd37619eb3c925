// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#ifndef OUTMIN_BASELINES_HPP
#define OUTMIN_BASELINES_HPP

#include <chrono>
#include <string>
#include <vector>

#include "outmin/parallel.hpp"
#include "outmin/smm.hpp"
#include "outmin/ssca.hpp"

namespace outmin {

enum class SchemeId { Smm, Ssca, Smrt, NoRis, NonRobust, ImperfectCsi, Saa };

inline std::string scheme_name(SchemeId s) {
  switch (s) {
    case SchemeId::Smm: return "smm";
    case SchemeId::Ssca: return "ssca";
    case SchemeId::Smrt: return "smrt";
    case SchemeId::NoRis: return "noris";
    case SchemeId::NonRobust: return "nonrobust";
    case SchemeId::ImperfectCsi: return "imperfect_csi";
    case SchemeId::Saa: return "saa";
  }
  return "unknown";
}

inline SchemeId scheme_from_name(const std::string& name) {
  for (SchemeId s : {SchemeId::Smm, SchemeId::Ssca, SchemeId::Smrt,
                     SchemeId::NoRis, SchemeId::NonRobust, SchemeId::ImperfectCsi,
                     SchemeId::Saa}) {
    if (scheme_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme: " + name);
}

/// Stochastic MRT precoder from accumulated matched filters sum_i G_k^{i,H}
/// e^i, one column per user with an equal power split. A vanishing
/// accumulator falls back to a random feasible column.
inline CMat smrt_precoder(const std::vector<CVec>& acc_matched, double p_max,
                          Rng& rng) {
  const int n_users = static_cast<int>(acc_matched.size());
  const int n_tx = static_cast<int>(acc_matched[0].size());
  CMat f(n_tx, n_users);
  const double col_power = std::sqrt(p_max / n_users);
  for (int k = 0; k < n_users; ++k) {
    CVec v = acc_matched[k];
    double nv = v.norm();
    if (nv == 0.0) {
      v = CVec::NullaryExpr(n_tx, [&]() { return rng.cnormal(); });
      nv = v.norm();
    }
    f.col(k) = (col_power / nv) * v;
  }
  return f;
}

/// Scenario with all RIS channels zeroed; the equivalent channel degenerates
/// to the direct row and the phase vector becomes irrelevant.
inline ScenarioState make_noris_scenario(const ScenarioState& st) {
  ScenarioState out = st;
  out.ris_disabled = true;
  return out;
}

/// Training-side scenario that assumes no blockage; evaluation keeps the
/// true law.
inline ScenarioConfig make_nonrobust_scenario(const ScenarioConfig& cfg) {
  ScenarioConfig out = cfg;
  out.blockage = BlockageModel::fixed_probability(0.0);
  return out;
}

/// Training-side scenario whose cluster central angles carry a fixed
/// estimation error of modulus `err` radians, sign drawn once per angle.
inline ScenarioState make_imperfect_csi_scenario(const ScenarioState& st,
                                                 double err, Rng& rng) {
  ScenarioState out = st;
  auto perturb = [&](std::vector<Angle2>& centers) {
    for (auto& a : centers) {
      a.azimuth += rng.bernoulli(0.5) ? err : -err;
      a.elevation += rng.bernoulli(0.5) ? err : -err;
    }
  };
  for (auto& link : out.direct) perturb(link.aod_center);
  for (auto& link : out.bs_ris) {
    perturb(link.aod_center);
    perturb(link.aoa_center);
  }
  for (auto& per_user : out.ris_user)
    for (auto& link : per_user) perturb(link.aod_center);
  return out;
}

struct SaaOptions {
  int n_samples = 300;
  StoppingRule stop{1e-4, 50, 200};
  PhaseMinimizer phase_min = PhaseMinimizer::Elementwise;
  bool optimize_phases = true;
  double theta_override = 0.0;
};

namespace detail {
inline constexpr std::uint64_t kTagSaaSample = 0x5AA;
inline constexpr std::uint64_t kTagInitSample = 0x1217;
inline constexpr std::uint64_t kTagInitPhases = 0x1218;
inline constexpr std::uint64_t kTagCsiError = 0xC51;
inline constexpr std::uint64_t kTagFallback = 0xFA11;
}  // namespace detail

/// Sample-average-approximation baseline (single user): pre-draws a fixed
/// sample set and minimizes the average of the quadratic surrogates
/// re-expanded at the current iterate each iteration. Pure MM descent, so
/// the averaged smoothed objective is non-increasing.
inline std::pair<BeamformingState, RunTrace> run_saa(
    const ScenarioConfig& cfg, const ScenarioState& st,
    const BeamformingState& init, const SaaOptions& opt, const Rng& solver_rng) {
  if (cfg.n_users != 1)
    throw std::invalid_argument("run_saa: single-user solver (K must be 1)");
  if (opt.n_samples < 1)
    throw std::invalid_argument("run_saa: n_samples must be >= 1");
  using clock = std::chrono::steady_clock;
  const double gamma = cfg.sinr_threshold;
  const double sigma2 = cfg.noise_power;
  const double theta =
      detail::calibrate_theta(cfg, st, init, solver_rng, opt.theta_override);

  std::vector<ChannelSample> samples(opt.n_samples);
  for (int i = 0; i < opt.n_samples; ++i)
    samples[i] =
        sample_channel(cfg, st, solver_rng.fork(detail::kTagSaaSample, i));

  CVec f = init.precoder.col(0);
  CVec e = init.phases;

  RunTrace trace;
  trace.theta = theta;
  trace.rows.reserve(opt.stop.max_iter);

  auto averaged_objective = [&](const CVec& fv, const CVec& ev) {
    double acc = 0.0;
    for (const auto& s : samples) {
      const cxd v = (ev.adjoint() * s.equivalent[0] * fv).value();
      acc += sigmoid(gamma * sigma2 - std::norm(v), theta);
    }
    return acc / samples.size();
  };

  std::vector<FSurrogate> pf(opt.n_samples);
  std::vector<ESurrogate> pe(opt.n_samples);

  double prev_obj = 0.0;
  int calm = 0;
  for (int n = 1; n <= opt.stop.max_iter; ++n) {
    const auto t0 = clock::now();

    parallel_for(opt.n_samples, [&](int i) {
      pf[i] = f_surrogate_params(f, e, samples[i].equivalent[0], theta, gamma,
                                 sigma2, cfg.p_max);
    });
    SmmAccumulator acc;
    acc.init(cfg.n_tx, cfg.phase_dim());
    for (int i = 0; i < opt.n_samples; ++i) {
      acc.sum_alpha_f += pf[i].alpha;
      acc.sum_d_f += pf[i].d;
    }
    acc.n = opt.n_samples;
    const CVec f_new = solve_f_subproblem(acc, cfg.p_max);

    CVec e_new = e;
    if (opt.optimize_phases) {
      parallel_for(opt.n_samples, [&](int i) {
        pe[i] = e_surrogate_params(f_new, e, samples[i].equivalent[0], theta,
                                   gamma, sigma2);
      });
      for (int i = 0; i < opt.n_samples; ++i) acc.sum_d_e += pe[i].d;
      e_new = solve_e_subproblem(acc, opt.phase_min);
    }

    const double obj = averaged_objective(f_new, e_new);
    const auto t1 = clock::now();

    TraceRow row;
    row.iter = n;
    row.objective_f = obj;
    row.objective_e = obj;
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    row.opt_ns = row.wall_ns;
    trace.rows.push_back(row);

    const bool settled = n > 1 && std::abs(obj - prev_obj) < opt.stop.tol;
    calm = settled ? calm + 1 : 0;
    prev_obj = obj;
    f = f_new;
    e = e_new;
    if (calm >= opt.stop.patience) break;
  }

  BeamformingState out;
  out.precoder = f;
  out.phases = e;
  return {out, trace};
}

struct SmrtOptions {
  StoppingRule stop;
  SquaremOptions squarem;
  StepSizeRule rule_e;
  PhaseMinimizer phase_min = PhaseMinimizer::Elementwise;
  bool optimize_phases = true;
  double theta_override = 0.0;
  double mu_override = 0.0;
  double tau = 0.0;  // 0 = calibrate (multiuser phase updates only)
};

/// SMRT benchmark: the precoder follows the running mean of the matched
/// filters while the phases are still optimized by the SMM (K=1) or SSCA
/// (K>1) machinery.
inline std::pair<BeamformingState, RunTrace> run_smrt(
    const ScenarioConfig& cfg, const ScenarioState& st,
    const BeamformingState& init, const SmrtOptions& opt, const Rng& solver_rng) {
  using clock = std::chrono::steady_clock;
  const double gamma = cfg.sinr_threshold;
  const double sigma2 = cfg.noise_power;
  const bool single_user = cfg.n_users == 1;

  SmoothingParams sp;
  sp.gamma = gamma;
  sp.sigma2 = sigma2;
  sp.mu = opt.mu_override > 0.0 ? opt.mu_override : 1.0 / (100.0 * cfg.n_users);
  sp.theta = detail::calibrate_theta(cfg, st, init, solver_rng, opt.theta_override);
  const double tau =
      single_user ? 0.0
                  : detail::calibrate_tau(cfg, st, init, sp, solver_rng, opt.tau);

  CMat f = init.precoder;
  CVec e = init.phases;
  std::vector<CVec> acc_matched(cfg.n_users, CVec::Zero(cfg.n_tx));
  Rng fallback_rng = solver_rng.fork(detail::kTagFallback);

  SmmAccumulator acc_smm;
  acc_smm.init(cfg.n_tx, cfg.phase_dim());
  SscaAccumulator acc_ssca;
  acc_ssca.init(cfg.n_tx, cfg.n_users, cfg.phase_dim());
  SquaremGuard guard_e;

  RunTrace trace;
  trace.theta = sp.theta;
  trace.mu = sp.mu;
  trace.rows.reserve(opt.stop.max_iter);

  double prev_obj = 0.0;
  int calm = 0;
  for (int n = 1; n <= opt.stop.max_iter; ++n) {
    const auto t0 = clock::now();
    const ChannelSample sample = sample_channel(cfg, st, solver_rng.fork(n));
    const auto t1 = clock::now();

    for (int k = 0; k < cfg.n_users; ++k)
      acc_matched[k] += sample.equivalent[k].adjoint() * e;
    const CMat f_new = smrt_precoder(acc_matched, cfg.p_max, fallback_rng);

    CVec e_new = e;
    double step_e = 0.0;
    double obj = 0.0;
    if (single_user) {
      const CMat& g = sample.equivalent[0];
      const CVec fcol = f_new.col(0);
      const ESurrogate pe = e_surrogate_params(fcol, e, g, sp.theta, gamma, sigma2);
      if (opt.optimize_phases) {
        auto map_e = [&](const CVec& x) {
          const ESurrogate p = e_surrogate_params(fcol, x, g, sp.theta, gamma, sigma2);
          return solve_phase_subproblem(CVec(acc_smm.sum_d_e + p.d), opt.phase_min);
        };
        auto proj_e = [&](const CVec& y, const CVec&) { return project_phases(y); };
        auto obj_e = [&](const CVec& x) { return detail::avg_e_value(acc_smm, pe, x); };
        e_new = squarem_step(e, map_e, proj_e, obj_e, opt.squarem, guard_e, &step_e);
      }
      obj = detail::avg_e_value(acc_smm, pe, e_new);
      FSurrogate dummy;
      dummy.d = CVec::Zero(cfg.n_tx);
      acc_smm.add(dummy, pe);
      guard_e.obj_prev_prev = guard_e.obj_prev;
      guard_e.obj_prev = obj;
      guard_e.recorded = std::min(guard_e.recorded + 1, 2);
    } else {
      acc_ssca.n += 1;
      if (opt.optimize_phases) {
        const CVec w_e = gradient_phases(f_new, e, sample, sp);
        EProximal pe;
        pe.p = w_e - (tau / 2.0) * e;
        pe.constant = smoothed_objective(f_new, e, sample, sp) +
                      tau * static_cast<double>(e.size()) - real_inner(w_e, e);
        acc_ssca.sum_p_e += pe.p;
        acc_ssca.sum_const_e += pe.constant;
        const CVec e_hat = solve_phase_subproblem_ssca(acc_ssca, opt.phase_min);
        auto obj_in_e = [&](const CVec& x) {
          return smoothed_objective(f_new, x, sample, sp);
        };
        step_e = armijo_step(e, e_hat, obj_in_e, w_e, opt.rule_e);
        e_new = project_phases(CVec(e + step_e * (e_hat - e)));
      }
      obj = (real_inner(acc_ssca.sum_p_e, e_new) + acc_ssca.sum_const_e) /
            acc_ssca.n;
    }
    const auto t2 = clock::now();

    TraceRow row;
    row.iter = n;
    row.objective_f = obj;
    row.objective_e = obj;
    row.step_e = step_e;
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t0).count();
    row.opt_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    trace.rows.push_back(row);

    const bool settled = n > 1 && std::abs(obj - prev_obj) < opt.stop.tol;
    calm = settled ? calm + 1 : 0;
    prev_obj = obj;
    f = f_new;
    e = e_new;
    if (calm >= opt.stop.patience) break;
  }

  BeamformingState out;
  out.precoder = f;
  out.phases = e;
  return {out, trace};
}

/// Bundled solver knobs for the scheme dispatch.
struct TrainOptions {
  SmmOptions smm;
  SscaOptions ssca;
  SaaOptions saa;
  int init_trials = 64;
  double csi_error_rad = 0.01;
};

/// Initial state: randomized max-min phases plus MRT columns, built from a
/// dedicated init sample of the solver stream.
inline BeamformingState initial_state(const ScenarioConfig& cfg,
                                      const ScenarioState& st,
                                      const Rng& solver_rng, int trials,
                                      bool optimize_phases = true) {
  const ChannelSample s0 =
      sample_channel(cfg, st, solver_rng.fork(detail::kTagInitSample));
  Rng rng = solver_rng.fork(detail::kTagInitPhases);
  BeamformingState init;
  init.phases = optimize_phases && !st.ris_disabled
                    ? init_phases(s0, trials, rng)
                    : CVec::Ones(cfg.phase_dim());
  init.precoder = init_precoder(s0, init.phases, cfg.p_max, rng);
  return init;
}

struct TrainResult {
  BeamformingState state;
  RunTrace trace;
  ScenarioConfig train_cfg;  // what the solver believed (diagnostics)
};

/// Trains one scheme. Single-user configurations use the SMM machinery,
/// multiuser ones use SSCA; evaluation against the true scenario is the
/// caller's job.
inline TrainResult train_scheme(const ScenarioConfig& cfg, const ScenarioState& st,
                                SchemeId scheme, const TrainOptions& opt) {
  const Rng solver_rng = Rng(cfg.seed).fork(Stream::Solver);
  const bool single_user = cfg.n_users == 1;

  auto run_core = [&](const ScenarioConfig& train_cfg, const ScenarioState& train_st,
                      bool optimize_phases) {
    BeamformingState init = initial_state(train_cfg, train_st, solver_rng,
                                          opt.init_trials, optimize_phases);
    if (single_user) {
      SmmOptions o = opt.smm;
      o.optimize_phases = optimize_phases && !train_st.ris_disabled;
      auto [state, trace] = run_smm_outmin(train_cfg, train_st, init, o, solver_rng);
      return TrainResult{state, trace, train_cfg};
    }
    SscaOptions o = opt.ssca;
    o.optimize_phases = optimize_phases && !train_st.ris_disabled;
    auto [state, trace] = run_ssca_outmin(train_cfg, train_st, init, o, solver_rng);
    return TrainResult{state, trace, train_cfg};
  };

  switch (scheme) {
    case SchemeId::Smm: {
      if (!single_user)
        throw std::invalid_argument("scheme smm requires a single-user setup");
      return run_core(cfg, st, true);
    }
    case SchemeId::Ssca: {
      BeamformingState init =
          initial_state(cfg, st, solver_rng, opt.init_trials);
      auto [state, trace] = run_ssca_outmin(cfg, st, init, opt.ssca, solver_rng);
      return TrainResult{state, trace, cfg};
    }
    case SchemeId::Smrt: {
      SmrtOptions o;
      o.stop = single_user ? opt.smm.stop : opt.ssca.stop;
      o.squarem = opt.smm.squarem;
      o.rule_e = opt.ssca.rule_e;
      o.phase_min = single_user ? opt.smm.phase_min : opt.ssca.phase_min;
      o.theta_override = single_user ? opt.smm.theta_override : opt.ssca.theta_override;
      o.mu_override = opt.ssca.mu_override;
      o.tau = opt.ssca.tau;
      BeamformingState init =
          initial_state(cfg, st, solver_rng, opt.init_trials);
      auto [state, trace] = run_smrt(cfg, st, init, o, solver_rng);
      return TrainResult{state, trace, cfg};
    }
    case SchemeId::NoRis: {
      const ScenarioState st_noris = make_noris_scenario(st);
      return run_core(cfg, st_noris, false);
    }
    case SchemeId::NonRobust: {
      const ScenarioConfig cfg_train = make_nonrobust_scenario(cfg);
      const ScenarioState st_train = build_scenario_state(cfg_train);
      return run_core(cfg_train, st_train, true);
    }
    case SchemeId::ImperfectCsi: {
      Rng err_rng = Rng(cfg.seed).fork(Stream::Scenario).fork(detail::kTagCsiError);
      const ScenarioState st_train =
          make_imperfect_csi_scenario(st, opt.csi_error_rad, err_rng);
      return run_core(cfg, st_train, true);
    }
    case SchemeId::Saa: {
      if (!single_user)
        throw std::invalid_argument("scheme saa requires a single-user setup");
      BeamformingState init =
          initial_state(cfg, st, solver_rng, opt.init_trials);
      auto [state, trace] = run_saa(cfg, st, init, opt.saa, solver_rng);
      return TrainResult{state, trace, cfg};
    }
  }
  throw std::logic_error("train_scheme: unhandled scheme");
}

}  // namespace outmin

#endif  // OUTMIN_BASELINES_HPP
