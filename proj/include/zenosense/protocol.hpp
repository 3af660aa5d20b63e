#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "zenosense/channels.hpp"
#include "zenosense/common.hpp"
#include "zenosense/core.hpp"

namespace zeno {

// One full sensing cycle: starting from c = 1, n alternating
// [evolve(tau = t/n), teleport] with exactly n-1 teleportations.
// Closed form: c = e^{-i M omega t} e^{-M gamma^2 t^2 / n} e^{-M Gamma t} (1-p)^{M(n-1)}.
inline BlockCoherence run_cycle(const ProtocolParams& raw) {
  const ProtocolParams params = validate(raw);
  const double tau = params.t / static_cast<double>(params.n);
  const SegmentRates rates{params.gamma, params.omega, params.big_gamma};
  BlockCoherence block;
  for (long long k = 0; k < params.n; ++k) {
    block = evolve_segment(block, params.M, rates, tau);
    if (k + 1 < params.n) block = apply_teleport(block, params.M, params.p);
  }
  return block;
}

enum class Projector { plus, minus };

struct ReadoutPoint {
  double expectation = 0.5;  // <P_sign> in [0, 1]
  Projector sign = Projector::plus;
};

// <P_+-> = (1 +- Im c) / 2. Under the pinned phase convention
// (c picks up e^{-i M omega tau}) the "+" label corresponds to the
// projector onto (|0..0> - i|1..1>)/sqrt(2); see the dense-oracle test.
inline ReadoutPoint readout(const BlockCoherence& block, Projector sign) {
  if (std::abs(block.c) > 1.0 + 1e-9) throw std::invalid_argument("|c| must be <= 1");
  ReadoutPoint out;
  out.sign = sign;
  const double s = (sign == Projector::plus) ? 1.0 : -1.0;
  out.expectation = 0.5 * (1.0 + s * block.c.imag());
  return out;
}

// General sensitivity with real-valued M and n; the continuum form used
// throughout the optimizer:
// delta_omega = e^{M Gamma t + M gamma^2 t^2 / n} / ((1-p)^{M(n-1)} sqrt(M L T t)).
inline double general_delta_omega(double gamma, double p, double big_gamma, double L, double M,
                                  double n, double t, double T) {
  const double expo = M * big_gamma * t + M * gamma * gamma * t * t / n;
  const double qt = std::pow(1.0 - p, M * (n - 1.0));
  return std::exp(expo) / (qt * std::sqrt(M * L * T * t));
}

inline SensitivityResult sensitivity_closed_form(const ProtocolParams& raw) {
  const ProtocolParams params = validate(raw);
  const double M = static_cast<double>(params.M);
  const double n = static_cast<double>(params.n);
  const double amp = std::exp(-M * params.gamma * params.gamma * params.t * params.t / n -
                              M * params.big_gamma * params.t) *
                     std::pow(1.0 - params.p, M * (n - 1.0));
  const double slope = 0.5 * M * params.t * amp;
  const double reps = params.T * static_cast<double>(params.L) / (params.t * M);
  return make_sensitivity(slope, 0.25, reps);
}

// Same uncertainty assembled from the state pipeline: <P>(omega) via
// run_cycle + readout, analytic slope (M t / 2) |c| cos(M omega t),
// variance <P>(1-<P>), N = T L / (t M).
inline SensitivityResult sensitivity_from_pipeline(const ProtocolParams& raw) {
  const ProtocolParams params = validate(raw);
  const BlockCoherence block = run_cycle(params);
  const double M = static_cast<double>(params.M);
  const double slope =
      0.5 * M * params.t * std::abs(block.c) * std::cos(M * params.omega * params.t);
  if (!(slope > 0.0)) throw std::domain_error("no signal: slope vanished");
  const double pexp = readout(block, Projector::plus).expectation;
  const double reps = params.T * static_cast<double>(params.L) / (params.t * M);
  return make_sensitivity(slope, pexp * (1.0 - pexp), reps);
}

// Standard Ramsey uncertainty for the comparable sensor:
// delta_omega_R = e^{1/4} sqrt(gamma / (T L)). L here is the probe count of
// the teleportation scheme; the Ramsey sensor uses all 2L physical qubits,
// which this formula already folds in.
inline double ramsey_baseline(double gamma, double T, double L) {
  if (!(gamma > 0.0) || !(T > 0.0) || !(L > 0.0))
    throw std::invalid_argument("ramsey_baseline requires positive arguments");
  return std::exp(0.25) * std::sqrt(gamma / (T * L));
}

struct McSensitivity {
  SensitivityResult result;
  double standard_error = 0.0;  // delta-method standard error of delta_omega
  double f_plus = 0.0;          // pooled <P_+> estimate at omega + delta
  double f_minus = 0.0;         // pooled <P_+> estimate at omega - delta
  long long shots = 0;
};

// Stochastic estimate of delta_omega. Simulates binary projective readouts
// (N * L/M outcomes per cycle batch) at two bias phases omega +- delta
// (phase dither M*t*delta = 0.1 rad), pools the counts, and assembles
// slope = (f_- - f_+) / (2 delta), variance = mean of f(1-f).
// Reproducible for a fixed seed; chunked so batch order never matters.
inline McSensitivity sensitivity_monte_carlo(const ProtocolParams& raw, long long shots,
                                             std::uint64_t seed) {
  const ProtocolParams params = validate(raw);
  if (shots < 10000) throw std::invalid_argument("shots must be >= 10^4");
  constexpr double kDitherPhase = 0.1;  // M*t*delta in radians
  const double M = static_cast<double>(params.M);
  const double delta = kDitherPhase / (M * params.t);

  auto p_plus_at = [&params](double omega_bias) {
    ProtocolParams q = params;
    q.omega = omega_bias;
    return readout(run_cycle(q), Projector::plus).expectation;
  };
  const double prob_hi = p_plus_at(params.omega + delta);
  const double prob_lo = p_plus_at(params.omega - delta);

  const long long per_side = shots / 2;
  constexpr long long kChunk = 1LL << 16;
  auto draw_side = [&](double prob, std::uint64_t side) {
    long long successes = 0;
    long long remaining = per_side;
    std::uint64_t chunk_index = 0;
    while (remaining > 0) {
      const long long count = std::min(remaining, kChunk);
      auto rng = make_rng(seed, 2 * chunk_index + side);
      std::binomial_distribution<long long> bin(count, prob);
      successes += bin(rng);
      remaining -= count;
      ++chunk_index;
    }
    return successes;
  };
  const double f_plus = static_cast<double>(draw_side(prob_hi, 0)) / per_side;
  const double f_minus = static_cast<double>(draw_side(prob_lo, 1)) / per_side;

  const double slope = (f_minus - f_plus) / (2.0 * delta);
  if (!(slope > 0.0)) throw std::domain_error("no signal: monte-carlo slope vanished");
  const double variance = 0.5 * (f_plus * (1.0 - f_plus) + f_minus * (1.0 - f_minus));
  const double reps = params.T * static_cast<double>(params.L) / (params.t * M);

  McSensitivity mc;
  mc.result = make_sensitivity(slope, variance, reps);
  mc.f_plus = f_plus;
  mc.f_minus = f_minus;
  mc.shots = 2 * per_side;

  // delta-method error bar from the two independent binomial fractions
  const double var_fp = f_plus * (1.0 - f_plus) / per_side;
  const double var_fm = f_minus * (1.0 - f_minus) / per_side;
  const double sqrt_n = std::sqrt(reps);
  auto ddelta_df = [&](double f, double dslope_df) {
    const double dvar_df = 0.5 * (1.0 - 2.0 * f);
    return 0.5 * dvar_df / (std::sqrt(variance) * slope * sqrt_n) -
           std::sqrt(variance) * dslope_df / (slope * slope * sqrt_n);
  };
  const double dp = ddelta_df(f_plus, -1.0 / (2.0 * delta));
  const double dm = ddelta_df(f_minus, 1.0 / (2.0 * delta));
  mc.standard_error = std::sqrt(dp * dp * var_fp + dm * dm * var_fm);
  return mc;
}

}  // namespace zeno
