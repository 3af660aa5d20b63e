#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace zeno {

// All quantities in natural units with gamma = 1 as the default scale.
// Derived quantities tau = t/n and N = T*L/(t*M) are never stored.
struct ProtocolParams {
  double gamma = 1.0;      // dephasing rate
  double omega = 0.0;      // frequency shift to estimate (rad / time)
  double p = 0.0;          // per-qubit teleportation error probability
  double big_gamma = 0.0;  // high-frequency decay rate
  long long L = 1;         // number of probe qubits
  long long M = 1;         // GHZ block size (M divides L)
  long long n = 1;         // evolve segments per cycle; n-1 teleportations
  double t = 1.0;          // interrogation time per cycle
  double T = 1.0;          // total measurement time
};

// Returns params unchanged if every invariant holds; otherwise throws
// naming the first failed invariant.
inline ProtocolParams validate(const ProtocolParams& params) {
  if (!std::isfinite(params.gamma) || params.gamma < 0.0)
    throw std::invalid_argument("gamma must be >= 0 and finite");
  if (!std::isfinite(params.omega))
    throw std::invalid_argument("omega must be finite");
  if (!std::isfinite(params.p) || params.p < 0.0)
    throw std::invalid_argument("p must be >= 0");
  if (params.p >= 1.0)
    throw std::invalid_argument("p must be < 1");
  if (!std::isfinite(params.big_gamma) || params.big_gamma < 0.0)
    throw std::invalid_argument("big_gamma must be >= 0 and finite");
  if (params.L < 1)
    throw std::invalid_argument("L must be >= 1");
  if (params.M < 1)
    throw std::invalid_argument("M must be >= 1");
  if (params.L % params.M != 0)
    throw std::invalid_argument("M must divide L");
  if (params.n < 1)
    throw std::invalid_argument("n must be >= 1");
  if (!std::isfinite(params.t) || params.t <= 0.0)
    throw std::invalid_argument("t must be > 0");
  if (!std::isfinite(params.T) || params.T < params.t)
    throw std::invalid_argument("T must be >= t");
  return params;
}

// The single complex number describing an M-qubit GHZ block under this
// noise family: c = 2 <0..0| rho |1..1>, diagonal fixed at (1/2, 1/2).
struct BlockCoherence {
  std::complex<double> c{1.0, 0.0};
};

struct SensitivityResult {
  double delta_omega = 0.0;  // uncertainty (rad / time)
  double slope = 0.0;        // |d<P>/domega| (time)
  double variance = 0.0;     // <dP^2>
  double repetitions = 0.0;  // N = T*L/(t*M), real-valued
};

// delta_omega = sqrt(variance) / (slope * sqrt(repetitions)), by construction.
inline SensitivityResult make_sensitivity(double slope, double variance, double repetitions) {
  SensitivityResult r;
  r.slope = slope;
  r.variance = variance;
  r.repetitions = repetitions;
  r.delta_omega = std::sqrt(variance) / (slope * std::sqrt(repetitions));
  return r;
}

}  // namespace zeno
