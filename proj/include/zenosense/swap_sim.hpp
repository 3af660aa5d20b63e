#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zenosense/core.hpp"

namespace zeno {

// Exact state-vector simulation of the flip-flop-ring implementation.
// Everything runs in the frame rotating at the common base frequency, so
// only the engineered detunings (delta_a/b/c) and the sensing shift omega
// appear in the Hamiltonian. sigma_z|0> = +|0>; qubit j is bit K-1-j.

struct ChainConfig {
  int K = 8;             // total qubits on the ring (even, <= 12)
  double g = 1.0;        // flip-flop coupling
  double omega = 0.0;    // field-induced frequency shift (the signal)
  double delta_a = 50.0;   // fixed-site frequency A (rotating frame)
  double delta_b = -50.0;  // fixed-site frequency B
  double delta_c = 0.0;    // parking frequency for tunable sites
  double min_detuning_ratio = 20.0;
};

inline void validate_chain(const ChainConfig& cfg) {
  if (cfg.K < 2 || cfg.K % 2 != 0) throw std::invalid_argument("K must be even and >= 2");
  if (cfg.K > 12) throw std::invalid_argument("K > 12 rejected (memory guard)");
  if (!(cfg.g > 0.0)) throw std::invalid_argument("g must be > 0");
  const double floor_gap = cfg.min_detuning_ratio * cfg.g;
  if (std::abs(cfg.delta_a - cfg.delta_b) < floor_gap ||
      std::abs(cfg.delta_a - cfg.delta_c) < floor_gap ||
      std::abs(cfg.delta_b - cfg.delta_c) < floor_gap)
    throw std::invalid_argument("schedule violating the detuning invariants (|gap| >= ratio*g)");
}

struct PureState {
  int K = 1;
  Eigen::VectorXcd amps;
};

inline double norm_error(const PureState& s) { return std::abs(s.amps.norm() - 1.0); }

inline double excitation_expectation(const PureState& s) {
  double acc = 0.0;
  for (long long i = 0; i < s.amps.size(); ++i)
    acc += std::norm(s.amps(i)) * std::popcount(static_cast<unsigned long long>(i));
  return acc;
}

// Per-site detunings for one schedule segment, given the two tunable-group
// settings wt (sites j = 0 mod 4) and wtp (sites j = 2 mod 4).
inline std::vector<double> site_detunings(const ChainConfig& cfg, double wt, double wtp) {
  std::vector<double> d(static_cast<std::size_t>(cfg.K));
  for (int j = 0; j < cfg.K; ++j) {
    switch (j % 4) {
      case 0: d[j] = wt; break;
      case 1: d[j] = cfg.delta_a; break;
      case 2: d[j] = wtp; break;
      default: d[j] = cfg.delta_b; break;
    }
  }
  return d;
}

// H = sum_j (omega + delta_j)/2 sigma_z^(j) + g sum (s+_j s-_{j+1} + h.c.)
// with periodic closure; the K = 2 ring keeps a single coupling edge.
inline Eigen::SparseMatrix<std::complex<double>> build_hamiltonian(
    const ChainConfig& cfg, const std::vector<double>& detunings, bool periodic = true) {
  validate_chain(cfg);
  if (detunings.size() != static_cast<std::size_t>(cfg.K))
    throw std::invalid_argument("detuning list must have K entries");
  const long long dim = 1LL << cfg.K;
  std::vector<Eigen::Triplet<std::complex<double>>> trips;
  for (long long s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int j = 0; j < cfg.K; ++j) {
      const int z = ((s >> (cfg.K - 1 - j)) & 1) ? -1 : 1;
      diag += 0.5 * (cfg.omega + detunings[j]) * z;
    }
    trips.emplace_back(s, s, diag);
  }
  std::vector<std::pair<int, int>> edges;
  const int last = periodic ? cfg.K : cfg.K - 1;
  for (int j = 0; j < last; ++j) {
    const int a = j, b = (j + 1) % cfg.K;
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    bool dup = false;
    for (const auto& e : edges) dup |= (e == key);
    if (!dup) edges.push_back(key);
  }
  for (const auto& [a, b] : edges) {
    const long long ma = 1LL << (cfg.K - 1 - a);
    const long long mb = 1LL << (cfg.K - 1 - b);
    for (long long s = 0; s < dim; ++s) {
      if (((s & ma) != 0) && ((s & mb) == 0))  // |1_a 0_b> -> |0_a 1_b|
        trips.emplace_back((s ^ ma) ^ mb, s, cfg.g);
      if (((s & ma) == 0) && ((s & mb) != 0))
        trips.emplace_back((s ^ ma) ^ mb, s, cfg.g);
    }
  }
  Eigen::SparseMatrix<std::complex<double>> H(dim, dim);
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

// Excitation-sector eigendecomposition; [H, sum sigma_z] = 0 so each
// popcount block evolves independently.
class Propagator {
 public:
  Propagator(const Eigen::SparseMatrix<std::complex<double>>& H, int K) : K_(K) {
    const long long dim = 1LL << K;
    sector_of_.resize(dim);
    pos_in_sector_.resize(dim);
    indices_.resize(K + 1);
    for (long long s = 0; s < dim; ++s) {
      const int sec = std::popcount(static_cast<unsigned long long>(s));
      sector_of_[s] = sec;
      pos_in_sector_[s] = static_cast<long long>(indices_[sec].size());
      indices_[sec].push_back(s);
    }
    vectors_.resize(K + 1);
    values_.resize(K + 1);
    std::vector<Eigen::MatrixXcd> blocks(K + 1);
    for (int sec = 0; sec <= K; ++sec)
      blocks[sec] = Eigen::MatrixXcd::Zero(indices_[sec].size(), indices_[sec].size());
    for (int outer = 0; outer < H.outerSize(); ++outer) {
      for (Eigen::SparseMatrix<std::complex<double>>::InnerIterator it(H, outer); it; ++it) {
        if (sector_of_[it.row()] != sector_of_[it.col()])
          throw std::logic_error("Hamiltonian does not conserve excitation number");
        blocks[sector_of_[it.row()]](pos_in_sector_[it.row()], pos_in_sector_[it.col()]) +=
            it.value();
      }
    }
    for (int sec = 0; sec <= K; ++sec) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blocks[sec]);
      vectors_[sec] = es.eigenvectors();
      values_[sec] = es.eigenvalues();
    }
  }

  void apply(PureState& state, double duration) const {
    if (!(duration >= 0.0)) throw std::invalid_argument("duration must be >= 0");
    for (int sec = 0; sec <= K_; ++sec) {
      const auto& idx = indices_[sec];
      if (idx.empty()) continue;
      Eigen::VectorXcd x(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) x(i) = state.amps(idx[i]);
      Eigen::VectorXcd y = vectors_[sec].adjoint() * x;
      for (long long i = 0; i < y.size(); ++i)
        y(i) *= std::polar(1.0, -values_[sec](i) * duration);
      x = vectors_[sec] * y;
      for (std::size_t i = 0; i < idx.size(); ++i) state.amps(idx[i]) = x(i);
    }
  }

 private:
  int K_;
  std::vector<int> sector_of_;
  std::vector<long long> pos_in_sector_;
  std::vector<std::vector<long long>> indices_;
  std::vector<Eigen::MatrixXcd> vectors_;
  std::vector<Eigen::VectorXd> values_;
};

inline PureState evolve(const PureState& state, const Eigen::SparseMatrix<std::complex<double>>& H,
                        double duration) {
  PureState out = state;
  Propagator prop(H, state.K);
  prop.apply(out, duration);
  return out;
}

// ---- transport protocol ----------------------------------------------------

struct TransportOptions {
  long long n_segments = 4;   // sensing intervals; n-1 swap hops in between
  double tau = 100.0;         // sensing interval (needs g*tau >= 10)
  bool simultaneous = false;  // overlap the two swap-pulse groups
  bool all_probes = false;    // |+> on every odd (1-based) site, else site 1 only
  bool idle_parking = true;   // single-probe runs park the idle tunable group at A
  double mistune = 1.0;       // pulse duration scale (1 = pi/(2g))
};

struct TransportStep {
  long long index = 0;
  std::string kind;          // "sense" or "pulse"
  double fidelity = 1.0;     // pulse: transfer fidelity; sense: cumulative overlap
  long long probe_site = 0;  // tracked probe position after the step
};

struct TransportResult {
  std::vector<TransportStep> steps;
  std::vector<double> pulse_fidelities;
  double min_pulse_fidelity = 1.0;
  double end_overlap = 1.0;            // |<ideal|actual>|^2 at the end
  double norm_error = 0.0;             // | ||psi|| - 1 | after the full schedule
  long long final_site = 0;
  std::complex<double> coherence{1.0, 0.0};        // c = 2 <0|rho_probe|1>
  std::complex<double> ideal_coherence{1.0, 0.0};  // ideal-SWAP circuit reference
  double sensing_time = 0.0;
  double engineered_phase = 0.0;        // known detuning phase, subtracted in readout
  double raw_phase_error = 0.0;         // before zero-field calibration
  double calibrated_phase_error = 0.0;  // against the omega = 0 reference run
};

namespace detail {

struct CoreOutcome {
  std::vector<TransportStep> steps;
  std::vector<double> pulse_fidelities;
  double end_overlap = 1.0;
  double norm_error = 0.0;
  long long final_site = 0;
  std::complex<double> coherence{0.0, 0.0};
  std::complex<double> ideal_coherence{0.0, 0.0};  // ideal-SWAP circuit reference
  double sensing_time = 0.0;
  double engineered_phase = 0.0;  // sum of delta_site * tau over sensing segments
};

inline CoreOutcome transport_core(const ChainConfig& cfg, const TransportOptions& opts,
                                  double omega) {
  ChainConfig run_cfg = cfg;
  run_cfg.omega = omega;
  const int K = cfg.K;
  const long long dim = 1LL << K;
  const double tau_pulse = opts.mistune * M_PI / (2.0 * cfg.g);

  // initial state: probes |+> on even 0-based sites (odd 1-based), |0> ancillas
  PureState psi{K, Eigen::VectorXcd::Zero(dim)};
  psi.amps(0) = 1.0;
  for (int j = 0; j < K; j += 2) {
    if (!opts.all_probes && j != 0) continue;
    const long long mask = 1LL << (K - 1 - j);
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(dim);
    for (long long s = 0; s < dim; ++s) {
      if (psi.amps(s) == std::complex<double>(0.0, 0.0)) continue;
      next(s) += psi.amps(s) / std::sqrt(2.0);
      next(s | mask) += psi.amps(s) / std::sqrt(2.0);
    }
    psi.amps = next;
  }
  Eigen::VectorXcd ideal = psi.amps;

  std::map<std::pair<double, double>, Propagator> props;
  auto propagator_for = [&](double wt, double wtp) -> const Propagator& {
    const auto key = std::make_pair(wt, wtp);
    auto it = props.find(key);
    if (it == props.end()) {
      const auto H = build_hamiltonian(run_cfg, site_detunings(run_cfg, wt, wtp), true);
      it = props.emplace(key, Propagator(H, K)).first;
    }
    return it->second;
  };
  auto diag_phases = [&](const std::vector<double>& d, double duration, Eigen::VectorXcd& v) {
    // e^{-i duration * sum_j (omega + d_j) z_j / 2}
    for (long long s = 0; s < dim; ++s) {
      double zsum = 0.0;
      for (int j = 0; j < K; ++j)
        zsum += (((s >> (K - 1 - j)) & 1) ? -1.0 : 1.0) * (omega + d[j]);
      v(s) *= std::polar(1.0, -0.5 * duration * zsum);
    }
  };
  auto swap_bits = [&](const Eigen::VectorXcd& v, const std::vector<std::pair<int, int>>& pairs) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (long long s = 0; s < dim; ++s) {
      long long tgt = s;
      for (const auto& [a, b] : pairs) {
        const long long ma = 1LL << (K - 1 - a);
        const long long mb = 1LL << (K - 1 - b);
        const bool ba = tgt & ma, bb = tgt & mb;
        if (ba != bb) tgt = (tgt ^ ma) ^ mb;
      }
      out(tgt) += v(s);
    }
    return out;
  };

  CoreOutcome out;
  long long probe = 0;
  int hop_parity = 0;
  long long step_index = 0;
  const double wA = cfg.delta_a, wB = cfg.delta_b, wC = cfg.delta_c;
  for (long long seg = 0; seg < opts.n_segments; ++seg) {
    // sensing interval
    double wt = wC, wtp = wC;
    if (!opts.all_probes && opts.idle_parking) {
      // park the idle tunable group at A so no empty site is degenerate
      // with the probe's parking frequency
      if (probe % 4 == 0) wtp = wA;
      if (probe % 4 == 2) wt = wA;
    }
    const auto d = site_detunings(run_cfg, wt, wtp);
    propagator_for(wt, wtp).apply(psi, opts.tau);
    diag_phases(d, opts.tau, ideal);
    out.sensing_time += opts.tau;
    out.engineered_phase += d[probe] * opts.tau;
    {
      double overlap = std::norm(ideal.dot(psi.amps));
      out.steps.push_back({step_index++, "sense", overlap, probe});
    }
    if (seg + 1 == opts.n_segments) break;

    // swap hop: every probe moves one site clockwise
    std::vector<std::pair<double, double>> cfgs;
    std::vector<std::pair<int, int>> hop_pairs;
    if (hop_parity == 0) {
      cfgs = opts.simultaneous ? std::vector<std::pair<double, double>>{{wA, wB}}
                               : std::vector<std::pair<double, double>>{{wA, wC}, {wC, wB}};
      for (int j = 0; j < K; j += 4) hop_pairs.emplace_back(j, (j + 1) % K);
      for (int j = 2; j < K; j += 4) hop_pairs.emplace_back(j, (j + 1) % K);
    } else {
      cfgs = opts.simultaneous ? std::vector<std::pair<double, double>>{{wB, wA}}
                               : std::vector<std::pair<double, double>>{{wC, wA}, {wB, wC}};
      for (int j = 1; j < K; j += 4) hop_pairs.emplace_back(j, (j + 1) % K);
      for (int j = 3; j < K; j += 4) hop_pairs.emplace_back(j, (j + 1) % K);
    }
    for (const auto& [wt_p, wtp_p] : cfgs) {
      const auto dp = site_detunings(run_cfg, wt_p, wtp_p);
      std::vector<std::pair<int, int>> resonant;
      for (const auto& pr : hop_pairs)
        if (std::abs(dp[pr.first] - dp[pr.second]) < 1e-9) resonant.push_back(pr);
      // corrected pulse: undo the free z phases and the -i exchange phase;
      // exact SWAP on the occupied sectors, verified against the two-qubit
      // closed solution
      Eigen::VectorXcd corr(dim);
      for (long long s = 0; s < dim; ++s) {
        double zsum = 0.0;
        for (int j = 0; j < K; ++j)
          zsum += (((s >> (K - 1 - j)) & 1) ? -1.0 : 1.0) * (omega + dp[j]);
        std::complex<double> c = std::polar(1.0, 0.5 * tau_pulse * zsum);
        for (const auto& [a, b] : resonant)
          if ((s >> (K - 1 - b)) & 1) c *= std::complex<double>(0.0, 1.0);
        corr(s) = c;
      }
      const Propagator& prop = propagator_for(wt_p, wtp_p);
      // transfer fidelity of this pulse on the ideal pre-state
      Eigen::VectorXcd ideal_post = swap_bits(ideal, resonant);
      {
        PureState probe_state{K, ideal};
        prop.apply(probe_state, tau_pulse);
        const Eigen::VectorXcd pulsed = corr.cwiseProduct(probe_state.amps);
        const double fid = std::norm(ideal_post.dot(pulsed));
        out.pulse_fidelities.push_back(fid);
        out.steps.push_back({step_index++, "pulse", fid, probe});
      }
      prop.apply(psi, tau_pulse);
      psi.amps = corr.cwiseProduct(psi.amps);
      ideal = ideal_post;
      for (const auto& [a, b] : resonant)
        if (a == probe) probe = b;
      out.steps.back().probe_site = probe;
    }
    hop_parity ^= 1;
  }

  out.end_overlap = std::norm(ideal.dot(psi.amps));
  out.norm_error = std::abs(psi.amps.norm() - 1.0);
  out.final_site = probe;
  const long long mask = 1LL << (K - 1 - probe);
  std::complex<double> rho01(0.0, 0.0);
  std::complex<double> ideal01(0.0, 0.0);
  for (long long s = 0; s < dim; ++s) {
    if (s & mask) continue;
    rho01 += psi.amps(s) * std::conj(psi.amps(s | mask));
    ideal01 += ideal(s) * std::conj(ideal(s | mask));
  }
  out.coherence = 2.0 * rho01;
  out.ideal_coherence = 2.0 * ideal01;
  return out;
}

}  // namespace detail

// Runs the schedule, an ideal-SWAP reference of the same schedule, and a
// zero-field calibration run. The sensing phase is read interferometrically
// from the probe's reduced coherence; engineered detuning phases and the
// (field-independent) calibration offset are subtracted.
inline TransportResult run_transport_protocol(const ChainConfig& cfg,
                                              const TransportOptions& opts) {
  validate_chain(cfg);
  if (cfg.K % 4 != 0)
    throw std::invalid_argument("ring transport needs K = 0 mod 4 (L even)");
  if (opts.n_segments < 1) throw std::invalid_argument("need at least one segment");
  if (!(opts.tau * cfg.g >= 10.0))
    throw std::invalid_argument("sensing interval too short: need g*tau >= 10");

  const detail::CoreOutcome run = detail::transport_core(cfg, opts, cfg.omega);
  const detail::CoreOutcome cal = detail::transport_core(cfg, opts, 0.0);

  TransportResult res;
  res.steps = run.steps;
  res.pulse_fidelities = run.pulse_fidelities;
  res.min_pulse_fidelity = 1.0;
  for (double f : run.pulse_fidelities) res.min_pulse_fidelity = std::min(res.min_pulse_fidelity, f);
  res.end_overlap = run.end_overlap;
  res.norm_error = run.norm_error;
  res.final_site = run.final_site;
  res.coherence = run.coherence;
  res.ideal_coherence = run.ideal_coherence;
  res.sensing_time = run.sensing_time;
  res.engineered_phase = run.engineered_phase;
  const std::complex<double> expected =
      std::polar(1.0, -(cfg.omega * run.sensing_time + run.engineered_phase));
  res.raw_phase_error = std::abs(std::arg(run.coherence / expected));
  res.calibrated_phase_error = std::abs(std::arg(
      (run.coherence / cal.coherence) * std::polar(1.0, cfg.omega * run.sensing_time)));
  return res;
}

}  // namespace zeno
