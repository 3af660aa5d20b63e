#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "zenosense/common.hpp"

namespace zeno {

// Stationary colored Gaussian environment with exponential correlation
// C(d) = C0 exp(-|d|/tau_c) (Ornstein-Uhlenbeck). The probe acquires phase
// phi = 2 lambda * integral of B(t) dt while it sits on a site; the factor 2
// is the relative |0>/|1> phase rate of the sigma_z coupling, which makes
// the short-time envelope e^{-gamma^2 tau^2} with gamma = sqrt(2 lambda^2 C0).
struct EnvModel {
  double lambda = 1.0;
  double C0 = 1.0;
  double tau_c = 1.0;
  std::uint64_t seed = 1;
};

inline void check_env(const EnvModel& env) {
  if (!(env.C0 >= 0.0) || !(env.tau_c > 0.0))
    throw std::invalid_argument("need C0 >= 0 and tau_c > 0");
}

// Exact-in-distribution stationary update:
// B_{k+1} = B_k e^{-dt/tau_c} + xi sqrt(C0 (1 - e^{-2 dt/tau_c})), B_0 ~ N(0, C0).
inline std::vector<double> sample_trajectory(const EnvModel& env, double dt, long long steps,
                                             std::uint64_t stream = 0) {
  check_env(env);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(dt <= env.tau_c / 20.0))
    throw std::invalid_argument("dt too coarse: need dt <= tau_c/20 to resolve the correlation");
  auto rng = make_rng(env.seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> path(static_cast<std::size_t>(steps) + 1);
  const double a = std::exp(-dt / env.tau_c);
  const double kick = std::sqrt(env.C0 * (1.0 - a * a));
  path[0] = std::sqrt(env.C0) * normal(rng);
  for (long long k = 0; k < steps; ++k)
    path[static_cast<std::size_t>(k) + 1] = a * path[static_cast<std::size_t>(k)] + kick * normal(rng);
  return path;
}

// ---- ring schedules ------------------------------------------------------

// 2L environment slots in a ring; the probe advances by `stride` sites per
// teleportation (1 for the separable layout, M for the entangled one).
// stride = 0 pins the probe to one site (no teleportation / shared
// environment). Revisits start once the segment count exceeds
// n_tilde + 1 = num_sites / stride.
struct RingTopology {
  long long num_sites = 2;
  long long stride = 1;
};

inline long long n_tilde(const RingTopology& ring) {
  if (ring.stride < 1 || ring.num_sites < 1 || ring.num_sites % ring.stride != 0)
    throw std::invalid_argument("schedule/topology mismatch: stride must divide num_sites");
  return ring.num_sites / ring.stride - 1;
}

inline std::vector<long long> ring_schedule(const RingTopology& ring, long long segments) {
  if (segments < 1) throw std::invalid_argument("need at least one segment");
  if (ring.num_sites < 1) throw std::invalid_argument("need at least one site");
  if (ring.stride < 0 || (ring.stride > 0 && ring.num_sites % ring.stride != 0))
    throw std::invalid_argument("schedule/topology mismatch: stride must divide num_sites");
  std::vector<long long> schedule(static_cast<std::size_t>(segments));
  for (long long k = 0; k < segments; ++k)
    schedule[static_cast<std::size_t>(k)] = (k * ring.stride) % ring.num_sites;
  return schedule;
}

// ---- closed-form OU double integrals --------------------------------------

// Integral of exp(-|t'-t''|/tau_c) over [0,w]^2 = 2 tau_c (w - tau_c(1 - e^{-w/tau_c})).
inline double ou_window_integral(double w, double tau_c) {
  const double u = w / tau_c;
  if (u < 1e-3)  // series; the closed form cancels catastrophically here
    return w * w * (1.0 - u / 3.0 + u * u / 12.0 - u * u * u / 60.0);
  return 2.0 * tau_c * (w + tau_c * std::expm1(-u));
}

// Same integral over [a2,b2] x [a1,b1] for disjoint windows (a2 >= b1):
// tau_c^2 e^{-gap/tau_c} (1 - e^{-w1/tau_c})(1 - e^{-w2/tau_c}).
inline double ou_cross_integral(double gap, double w1, double w2, double tau_c) {
  return tau_c * tau_c * std::exp(-gap / tau_c) * std::expm1(-w1 / tau_c) *
         std::expm1(-w2 / tau_c);
}

// Exact Gaussian envelope for a scheduled run: Var(phi) = 4 lambda^2 C0 *
// [sum of window integrals + 2 * cross terms between same-site windows],
// envelope = exp(-Var/2). `include_cross` = false gives the independent-error
// prediction that the revisit experiments are compared against.
inline double envelope_quadrature(const EnvModel& env, const std::vector<long long>& schedule,
                                  double tau, bool include_cross = true) {
  check_env(env);
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  std::map<long long, std::vector<double>> starts;  // site -> window start times
  for (std::size_t k = 0; k < schedule.size(); ++k)
    starts[schedule[k]].push_back(static_cast<double>(k) * tau);
  double total = 0.0;
  for (const auto& [site, w] : starts) {
    total += static_cast<double>(w.size()) * ou_window_integral(tau, env.tau_c);
    if (include_cross) {
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j)
          total += 2.0 * ou_cross_integral(w[j] - (w[i] + tau), tau, tau, env.tau_c);
    }
  }
  const double var_phi = 4.0 * env.lambda * env.lambda * env.C0 * total;
  return std::exp(-0.5 * var_phi);
}

// ---- Monte-Carlo envelopes -------------------------------------------------

struct Envelope {
  double value = 1.0;
  double std_error = 0.0;
  long long trajectories = 0;
};

namespace detail {

// Joint sample of (B_end, integral of B dt) over one segment, conditional on
// B at the segment start; exact for the OU process, no time discretization.
struct SegmentSampler {
  double a, mean_coeff, sd_b, cov_over_sd, resid_sd;
  SegmentSampler(const EnvModel& env, double tau) {
    const double tc = env.tau_c;
    const double u = tau / tc;
    a = std::exp(-u);
    const double one_minus_a = -std::expm1(-u);
    mean_coeff = tc * one_minus_a;  // E[I|B] = B * tc (1-a)
    const double var_b = env.C0 * (1.0 - a * a);
    double var_i;
    if (u < 1e-3)
      var_i = (2.0 / 3.0) * env.C0 * tau * tau * tau / tc * (1.0 - 0.75 * u + 0.35 * u * u);
    else
      var_i = env.C0 * (2.0 * tc * tau - tc * tc * one_minus_a * (3.0 - a));
    const double cov = env.C0 * tc * one_minus_a * one_minus_a;
    sd_b = std::sqrt(var_b);
    cov_over_sd = (sd_b > 0.0) ? cov / sd_b : 0.0;
    resid_sd = std::sqrt(std::max(var_i - cov_over_sd * cov_over_sd, 0.0));
  }
};

}  // namespace detail

// Scheduled Monte-Carlo envelope. Each site carries its own trajectory;
// a fresh site starts from the stationary distribution, a revisited site is
// the same trajectory advanced through the gap. Deterministic per-trajectory
// seeding makes the estimate independent of evaluation order.
inline Envelope run_scheduled_envelope(const EnvModel& env, const std::vector<long long>& schedule,
                                       double tau, long long trajectories) {
  check_env(env);
  if (trajectories < 1000) throw std::invalid_argument("need at least 10^3 trajectories");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (schedule.empty()) throw std::invalid_argument("empty schedule");
  long long max_site = 0;
  for (long long s : schedule) {
    if (s < 0) throw std::invalid_argument("schedule/topology mismatch: negative site");
    max_site = std::max(max_site, s);
  }
  const detail::SegmentSampler seg(env, tau);
  const double sqrt_c0 = std::sqrt(env.C0);
  const std::size_t nsites = static_cast<std::size_t>(max_site) + 1;

  double sum_cos = 0.0, sum_sin = 0.0, sum_cos2 = 0.0;
  std::vector<double> b(nsites), t_last(nsites);
  std::vector<char> seen(nsites);
  for (long long traj = 0; traj < trajectories; ++traj) {
    auto rng = make_rng(env.seed, static_cast<std::uint64_t>(traj));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::fill(seen.begin(), seen.end(), 0);
    double phi = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const std::size_t site = static_cast<std::size_t>(schedule[k]);
      const double t0 = static_cast<double>(k) * tau;
      double b_now;
      if (!seen[site]) {
        b_now = sqrt_c0 * normal(rng);
        seen[site] = 1;
      } else {
        const double ag = std::exp(-(t0 - t_last[site]) / env.tau_c);
        b_now = ag * b[site] + std::sqrt(env.C0 * (1.0 - ag * ag)) * normal(rng);
      }
      const double x1 = normal(rng);
      const double x2 = normal(rng);
      const double integral = b_now * seg.mean_coeff + seg.cov_over_sd * x1 + seg.resid_sd * x2;
      b[site] = seg.a * b_now + seg.sd_b * x1;
      t_last[site] = t0 + tau;
      phi += 2.0 * env.lambda * integral;
    }
    const double c = std::cos(phi);
    sum_cos += c;
    sum_sin += std::sin(phi);
    sum_cos2 += c * c;
  }
  const double r = static_cast<double>(trajectories);
  Envelope out;
  out.trajectories = trajectories;
  out.value = std::hypot(sum_cos / r, sum_sin / r);
  const double var_cos = std::max(sum_cos2 / r - (sum_cos / r) * (sum_cos / r), 0.0);
  out.std_error = std::sqrt(var_cos / r);
  return out;
}

// Single-site envelope |<e^{i phi}>| over [0, tau].
inline Envelope dephasing_envelope(const EnvModel& env, double tau, long long trajectories) {
  return run_scheduled_envelope(env, {0}, tau, trajectories);
}

inline Envelope run_teleported_envelope(const EnvModel& env, const RingTopology& ring,
                                        long long segments, double tau, long long trajectories) {
  return run_scheduled_envelope(env, ring_schedule(ring, segments), tau, trajectories);
}

}  // namespace zeno
