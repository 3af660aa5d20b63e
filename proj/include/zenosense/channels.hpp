#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "zenosense/core.hpp"

namespace zeno {

// Noise channels acting on a GHZ block coherence. Sign convention, fixed
// once here and used by every consumer: c = 2<0..0|rho|1..1> acquires
// phase e^{-i M omega tau} during an evolve segment.

struct SegmentRates {
  double gamma = 1.0;
  double omega = 0.0;
  double big_gamma = 0.0;
};

// One free-evolution segment of length tau on an M-qubit block:
// c' = c * exp(-i M omega tau - M gamma^2 tau^2 - M Gamma tau).
inline BlockCoherence evolve_segment(BlockCoherence block, long long M, const SegmentRates& r,
                                     double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  const double decay = static_cast<double>(M) * (r.gamma * r.gamma * tau * tau + r.big_gamma * tau);
  const double phase = -static_cast<double>(M) * r.omega * tau;
  block.c *= std::polar(std::exp(-decay), phase);
  return block;
}

// Imperfect teleportation of the whole block: c' = c * (1-p)^M.
// Populations are untouched (the error branch is the dephased state).
inline BlockCoherence apply_teleport(BlockCoherence block, long long M, double p) {
  if (!(p >= 0.0) || p >= 1.0) throw std::invalid_argument("p must satisfy 0 <= p < 1");
  block.c *= std::pow(1.0 - p, static_cast<double>(M));
  return block;
}

struct PerturbativeRate {
  double epsilon = 0.0;  // lambda^2 C0 tau^2
  double gamma = 0.0;    // sqrt(2 lambda^2 C0)
};

// Short-time error rate of the microscopic model. Valid only in the
// perturbative regime; inputs with epsilon > 0.1 are rejected.
inline PerturbativeRate perturbative_error_rate(double lambda, double C0, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (C0 < 0.0) throw std::invalid_argument("C0 must be >= 0");
  PerturbativeRate out;
  out.epsilon = lambda * lambda * C0 * tau * tau;
  if (out.epsilon > 0.1) {
    std::ostringstream msg;
    msg << "perturbative regime requires lambda^2*C0*tau^2 <= 0.1, got " << out.epsilon;
    throw std::domain_error(msg.str());
  }
  out.gamma = std::sqrt(2.0 * lambda * lambda * C0);
  return out;
}

// ---------------------------------------------------------------------
// Dense oracle: the full 2^M x 2^M density matrix of one block. The noise
// family is diagonal in the computational basis, so GHZ-form inputs never
// leave the {|0..0>, |1..1>} subspace; the dense pipeline exists to prove
// that and to cross-check the scalar pipeline.

struct DenseBlockState {
  long long M = 1;
  Eigen::MatrixXcd rho;
};

inline DenseBlockState dense_ghz(long long M) {
  if (M < 1 || M > 6) throw std::invalid_argument("dense oracle supports 1 <= M <= 6");
  const long long dim = 1LL << M;
  DenseBlockState s;
  s.M = M;
  s.rho = Eigen::MatrixXcd::Zero(dim, dim);
  s.rho(0, 0) = 0.5;
  s.rho(0, dim - 1) = 0.5;
  s.rho(dim - 1, 0) = 0.5;
  s.rho(dim - 1, dim - 1) = 0.5;
  return s;
}

// Applies E_1 ... E_M (each the single-qubit dephasing channel with
// U = e^{-i omega tau sigma_z / 2}) plus the high-frequency decay factor
// e^{-Gamma tau} per qubit. Each channel is diagonal in the matrix-unit
// basis, so the action is elementwise.
inline DenseBlockState dense_evolve_segment(DenseBlockState s, const SegmentRates& r, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  const long long dim = 1LL << s.M;
  const double per_qubit_decay = r.gamma * r.gamma * tau * tau + r.big_gamma * tau;
  for (long long a = 0; a < dim; ++a) {
    // sigma_z eigenvalue sum: +1 for bit 0, -1 for bit 1
    const int za = static_cast<int>(s.M) - 2 * std::popcount(static_cast<unsigned long long>(a));
    for (long long b = 0; b < dim; ++b) {
      const int zb = static_cast<int>(s.M) - 2 * std::popcount(static_cast<unsigned long long>(b));
      const int differing = std::popcount(static_cast<unsigned long long>(a ^ b));
      const double phase = -0.5 * r.omega * tau * static_cast<double>(za - zb);
      s.rho(a, b) *= std::polar(std::exp(-per_qubit_decay * differing), phase);
    }
  }
  return s;
}

// rho' = (1-p)^M rho + (1 - (1-p)^M) rho_error with
// rho_error = (|0..0><0..0| + |1..1><1..1|) / 2.
inline DenseBlockState dense_apply_teleport(DenseBlockState s, double p) {
  if (!(p >= 0.0) || p >= 1.0) throw std::invalid_argument("p must satisfy 0 <= p < 1");
  const long long dim = 1LL << s.M;
  const double keep = std::pow(1.0 - p, static_cast<double>(s.M));
  s.rho *= keep;
  s.rho(0, 0) += (1.0 - keep) * 0.5;
  s.rho(dim - 1, dim - 1) += (1.0 - keep) * 0.5;
  return s;
}

inline std::complex<double> dense_coherence(const DenseBlockState& s) {
  return 2.0 * s.rho(0, (1LL << s.M) - 1);
}

inline double dense_trace_error(const DenseBlockState& s) {
  return std::abs(s.rho.trace() - std::complex<double>(1.0, 0.0));
}

inline double dense_hermiticity_error(const DenseBlockState& s) {
  return (s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff();
}

inline double dense_min_eigenvalue(const DenseBlockState& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.rho);
  return es.eigenvalues().minCoeff();
}

// Largest matrix element outside the four GHZ corners; stays at zero for
// GHZ-form inputs under every channel above.
inline double dense_max_off_corner(const DenseBlockState& s) {
  const long long dim = 1LL << s.M;
  double worst = 0.0;
  for (long long a = 0; a < dim; ++a)
    for (long long b = 0; b < dim; ++b) {
      const bool corner = (a == 0 || a == dim - 1) && (b == 0 || b == dim - 1);
      if (!corner) worst = std::max(worst, std::abs(s.rho(a, b)));
    }
  return worst;
}

}  // namespace zeno
