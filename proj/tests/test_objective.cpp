// SPDX-License-Identifier: Apache-2.0
// ris-outmin: outage-minimizing beamforming for RIS-aided mmWave downlinks

#include <catch2/catch_amalgamated.hpp>

#include "outmin/objective.hpp"
#include "oracles.hpp"

using namespace outmin;

namespace {

/// Small synthetic sample with O(1) channel entries (the objective math is
/// scale free, so gradient checks run at a friendly scale).
ChannelSample synthetic_sample(int n_users, int phase_dim, int n_tx, Rng& rng) {
  ChannelSample s;
  s.equivalent.resize(n_users);
  for (int k = 0; k < n_users; ++k)
    s.equivalent[k] = oracles::random_matrix(phase_dim, n_tx, rng);
  return s;
}

}  // namespace

TEST_CASE("sigmoid fixed points") {
  REQUIRE(sigmoid(0.0, 3.7) == 0.5);
  REQUIRE(sigmoid(std::log(3.0), 1.0) == Catch::Approx(0.75).epsilon(1e-12));
  REQUIRE(sigmoid(1.0, 1000.0) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(sigmoid(-1.0, 1000.0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(std::isfinite(sigmoid(700.0, 1.0)));
  REQUIRE(std::isfinite(sigmoid(-700.0, 1.0)));
  REQUIRE(sigmoid_derivative(0.0, 8.0) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sinr basic identities") {
  Rng rng(1);
  ChannelSample s = synthetic_sample(1, 3, 2, rng);
  BeamformingState st = BeamformingState::zero(2, 1, 3);

  SECTION("zero precoder gives zero SINR") {
    REQUIRE(sinr(st, s, 0, 1.0) == 0.0);
  }
  SECTION("scalarized unit gain over unit noise") {
    // Scale the channel so e^H G f = 1 with f = [1; 0].
    st.precoder(0, 0) = 1.0;
    const cxd gain = (st.phases.adjoint() * s.equivalent[0] * st.precoder.col(0)).value();
    s.equivalent[0] /= gain;
    REQUIRE(sinr(st, s, 0, 1.0) == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sinr matches term-by-term evaluation on random instances") {
  Rng rng(2);
  for (int t = 0; t < 25; ++t) {
    const int n_users = 2;
    ChannelSample s = synthetic_sample(n_users, 4, 3, rng);
    BeamformingState st;
    st.precoder = oracles::random_matrix(3, n_users, rng);
    st.phases = oracles::random_phases(4, rng);
    const double sigma2 = 0.5;
    for (int k = 0; k < n_users; ++k) {
      const Eigen::RowVectorXcd row = st.phases.adjoint() * s.equivalent[k];
      double interference = 0.0;
      for (int i = 0; i < n_users; ++i)
        if (i != k) interference += std::norm((row * st.precoder.col(i)).value());
      const double expect =
          std::norm((row * st.precoder.col(k)).value()) / (interference + sigma2);
      REQUIRE(sinr(st, s, k, sigma2) == Catch::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-user smoothed indicator") {
  Rng rng(3);
  ChannelSample s = synthetic_sample(1, 3, 2, rng);
  SmoothingParams p;
  p.theta = 2.0;
  p.gamma = 1.5;
  p.sigma2 = 0.8;

  SECTION("boundary gives one half") {
    CVec f = oracles::random_vector(2, rng);
    const CVec e = oracles::random_phases(3, rng);
    const cxd gain = (e.adjoint() * s.equivalent[0] * f).value();
    f *= std::sqrt(p.gamma * p.sigma2) / std::abs(gain);
    REQUIRE(smooth_single(f, e, s.equivalent[0], p) ==
            Catch::Approx(0.5).margin(1e-9));
  }
  SECTION("zero precoder saturates toward one") {
    const CVec f = CVec::Zero(2);
    const CVec e = oracles::random_phases(3, rng);
    REQUIRE(smooth_single(f, e, s.equivalent[0], p) ==
            Catch::Approx(sigmoid(p.gamma * p.sigma2, p.theta)).epsilon(1e-12));
  }
  SECTION("composition of sigmoid and quadratic argument") {
    for (int t = 0; t < 20; ++t) {
      const CVec f = oracles::random_vector(2, rng);
      const CVec e = oracles::random_phases(3, rng);
      const double arg =
          p.gamma * p.sigma2 -
          std::norm((e.adjoint() * s.equivalent[0] * f).value());
      REQUIRE(smooth_single(f, e, s.equivalent[0], p) ==
              Catch::Approx(sigmoid(arg, p.theta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multiuser indicator reduces to the single-user one at K=1") {
  Rng rng(4);
  ChannelSample s = synthetic_sample(1, 4, 3, rng);
  SmoothingParams p;
  p.theta = 1.3;
  p.gamma = 0.9;
  p.sigma2 = 0.4;
  for (int t = 0; t < 20; ++t) {
    BeamformingState st;
    st.precoder = oracles::random_matrix(3, 1, rng);
    st.phases = oracles::random_phases(4, rng);
    REQUIRE(smooth_multi(st, s, 0, p) ==
            Catch::Approx(smooth_single(st.precoder.col(0), st.phases,
                                        s.equivalent[0], p))
                .epsilon(1e-12));
  }
}

TEST_CASE("multiuser indicator argument sign tracks the SINR threshold") {
  Rng rng(5);
  SmoothingParams p;
  p.theta = 1.0;
  p.gamma = 0.7;
  p.sigma2 = 0.3;
  for (int t = 0; t < 200; ++t) {
    const int n_users = 3;
    ChannelSample s = synthetic_sample(n_users, 4, 3, rng);
    BeamformingState st;
    st.precoder = oracles::random_matrix(3, n_users, rng);
    st.phases = oracles::random_phases(4, rng);
    for (int k = 0; k < n_users; ++k) {
      const double arg =
          multi_indicator_arg(st.precoder, st.phases, s.equivalent[k], k, p);
      const double g = sinr(st, s, k, p.sigma2);
      if (arg > 0.0) REQUIRE(g < p.gamma);
      if (arg < 0.0) REQUIRE(g > p.gamma);
      REQUIRE((smooth_multi(st, s, k, p) > 0.5) == (arg > 0.0));
    }
  }
}

TEST_CASE("multiuser indicator is one half exactly at the threshold") {
  Rng rng(6);
  SmoothingParams p;
  p.theta = 2.2;
  p.gamma = 1.1;
  p.sigma2 = 0.6;
  const int n_users = 2;
  ChannelSample s = synthetic_sample(n_users, 4, 3, rng);
  BeamformingState st;
  st.precoder = oracles::random_matrix(3, n_users, rng);
  st.phases = oracles::random_phases(4, rng);
  // Rescale user 0's desired column so SINR_0 == gamma exactly.
  const Eigen::RowVectorXcd row = st.phases.adjoint() * s.equivalent[0];
  const double interference = std::norm((row * st.precoder.col(1)).value());
  const double need = p.gamma * (interference + p.sigma2);
  const double have = std::norm((row * st.precoder.col(0)).value());
  st.precoder.col(0) *= std::sqrt(need / have);
  REQUIRE(sinr(st, s, 0, p.sigma2) == Catch::Approx(p.gamma).epsilon(1e-12));
  REQUIRE(smooth_multi(st, s, 0, p) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("log-sum-exp smoothed max identities") {
  REQUIRE(logsumexp_max({0.42}, 0.05) == Catch::Approx(0.42).epsilon(1e-14));
  const double c = 0.3, mu = 0.07;
  REQUIRE(logsumexp_max({c, c, c, c}, mu) ==
          Catch::Approx(c + mu * std::log(4.0)).epsilon(1e-12));
  const double v = logsumexp_max({0.9, 0.1, 0.5}, 0.01);
  REQUIRE(v >= 0.9);
  REQUIRE(v <= 0.9 + 0.01 * std::log(3.0) + 1e-15);
}

TEST_CASE("log-sum-exp sandwich bound on random inputs") {
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6);
    std::vector<double> vals(n);
    double vmax = -1e300;
    for (double& v : vals) {
      v = rng.uniform(-5.0, 5.0);
      vmax = std::max(vmax, v);
    }
    const double mu = rng.uniform(1e-3, 1.0);
    const double lse = logsumexp_max(vals, mu);
    REQUIRE(lse >= vmax - 1e-12);
    REQUIRE(lse <= vmax + mu * std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("log-sum-exp is stable for tiny temperatures") {
  REQUIRE(logsumexp_max({1.0, 0.0}, 1e-6) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(std::isfinite(logsumexp_max({1000.0, -1000.0}, 1e-4)));
}

TEST_CASE("softmax weights: equal indicators split evenly") {
  Rng rng(8);
  SmoothingParams p;
  p.theta = 1.7;
  p.gamma = 0.8;
  p.sigma2 = 0.5;
  p.mu = 0.02;
  const int n_users = 3;
  ChannelSample s = synthetic_sample(1, 4, 3, rng);
  // Identical channels and a shared precoder column make all f_k equal.
  ChannelSample s_eq;
  s_eq.equivalent.assign(n_users, s.equivalent[0]);
  BeamformingState st;
  const CVec col = oracles::random_vector(3, rng);
  st.precoder = col.replicate(1, n_users);
  st.phases = oracles::random_phases(4, rng);
  const auto w = softmax_sigmoid_weights(st.precoder, st.phases, s_eq, p);
  for (int k = 1; k < n_users; ++k)
    REQUIRE(w[k] == Catch::Approx(w[0]).epsilon(1e-10));
  // Softmax factor is exactly 1/K: divide out the slope part.
  const double arg =
      multi_indicator_arg(st.precoder, st.phases, s_eq.equivalent[0], 0, p);
  const double slope = sigmoid_derivative(arg, p.theta);
  REQUIRE(w[0] / slope == Catch::Approx(1.0 / n_users).epsilon(1e-10));
}

TEST_CASE("softmax weights: slope factor is theta/4 at a zero argument") {
  Rng rng(9);
  SmoothingParams p;
  p.theta = 3.0;
  p.gamma = 1.0;
  p.sigma2 = 0.25;
  p.mu = 0.01;
  ChannelSample s = synthetic_sample(1, 3, 2, rng);
  BeamformingState st;
  st.precoder = oracles::random_matrix(2, 1, rng);
  st.phases = oracles::random_phases(3, rng);
  // K = 1: argument gamma*sigma2 - |e^H G f|^2; rescale f to zero it.
  const cxd gain = (st.phases.adjoint() * s.equivalent[0] * st.precoder.col(0)).value();
  st.precoder *= std::sqrt(p.gamma * p.sigma2) / std::abs(gain);
  const auto w = softmax_sigmoid_weights(st.precoder, st.phases, s, p);
  REQUIRE(w[0] == Catch::Approx(p.theta / 4.0).epsilon(1e-9));
}

TEST_CASE("softmax weights match finite differences of the smoothed max") {
  // l_k is the derivative of mu ln sum exp(u(x_k)/mu) w.r.t. x_k.
  Rng rng(10);
  SmoothingParams p;
  p.theta = 1.9;
  p.mu = 0.05;
  p.gamma = 0.8;
  p.sigma2 = 0.5;
  const int n_users = 3;
  ChannelSample s = synthetic_sample(n_users, 4, 3, rng);
  BeamformingState st;
  st.precoder = oracles::random_matrix(3, n_users, rng);
  st.phases = oracles::random_phases(4, rng);
  std::vector<double> args(n_users);
  for (int k = 0; k < n_users; ++k)
    args[k] = multi_indicator_arg(st.precoder, st.phases, s.equivalent[k], k, p);
  const auto w = softmax_sigmoid_weights(st.precoder, st.phases, s, p);
  auto phi = [&](const std::vector<double>& x) {
    std::vector<double> vals(n_users);
    for (int k = 0; k < n_users; ++k) vals[k] = sigmoid(x[k], p.theta);
    return logsumexp_max(vals, p.mu);
  };
  const double h = 1e-6;
  for (int k = 0; k < n_users; ++k) {
    std::vector<double> xp = args, xm = args;
    xp[k] += h;
    xm[k] -= h;
    const double fd = (phi(xp) - phi(xm)) / (2.0 * h);
    REQUIRE(w[k] == Catch::Approx(fd).epsilon(1e-4).margin(1e-8));
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(11);
  SmoothingParams p;
  p.theta = 1.4;
  p.mu = 0.04;
  p.gamma = 0.9;
  p.sigma2 = 0.6;
  const int n_users = 2, n_tx = 3, dim = 4;
  for (int t = 0; t < 10; ++t) {
    ChannelSample s = synthetic_sample(n_users, dim, n_tx, rng);
    const CMat f = oracles::random_matrix(n_tx, n_users, rng);
    const CVec e = oracles::random_phases(dim, rng);

    const CMat analytic_f = gradient_precoder(f, e, s, p);
    const CMat fd_f = oracles::fd_gradient(
        [&](const CMat& x) { return smoothed_objective(x, e, s, p); }, f);
    REQUIRE((analytic_f - fd_f).norm() <= 1e-4 * std::max(1.0, fd_f.norm()));

    const CVec analytic_e = gradient_phases(f, e, s, p);
    const CMat fd_e = oracles::fd_gradient(
        [&](const CMat& x) { return smoothed_objective(f, x, s, p); }, CMat(e));
    REQUIRE((analytic_e - CVec(fd_e)).norm() <= 1e-4 * std::max(1.0, fd_e.norm()));
  }
}

TEST_CASE("single-user gradient of the smoothed indicator vs finite differences") {
  Rng rng(12);
  SmoothingParams p;
  p.theta = 2.1;
  p.gamma = 1.2;
  p.sigma2 = 0.5;
  p.mu = 1.0;  // K = 1: log-sum-exp is the identity
  ChannelSample s = synthetic_sample(1, 3, 2, rng);
  const CMat f = oracles::random_matrix(2, 1, rng);
  const CVec e = oracles::random_phases(3, rng);
  const CMat grad_f = gradient_precoder(f, e, s, p);
  const CMat fd_f = oracles::fd_gradient(
      [&](const CMat& x) {
        return smooth_single(x.col(0), e, s.equivalent[0], p);
      },
      f);
  REQUIRE((grad_f - fd_f).norm() <= 1e-4 * std::max(1.0, fd_f.norm()));
}
