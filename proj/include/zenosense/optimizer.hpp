#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zenosense/protocol.hpp"

namespace zeno {

enum class Regime { noiseless, short_T, long_T_separable, long_T_ghz, high_frequency };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::noiseless: return "noiseless";
    case Regime::short_T: return "short-T";
    case Regime::long_T_separable: return "long-T-separable";
    case Regime::long_T_ghz: return "long-T-ghz";
    case Regime::high_frequency: return "high-frequency";
  }
  return "?";
}

struct Optimum {
  Regime regime = Regime::noiseless;
  double t_opt = 0.0;
  long long n_opt = 1;    // realized integer segment count
  double n_real = 1.0;    // continuum optimizer value behind it
  long long m_opt = 1;    // realized integer GHZ size
  double m_real = 1.0;
  double delta_omega = 0.0;  // exact closed form at the realized point
  double table_value = 0.0;  // the printed closed form for this regime
  std::string note;
};

struct RegimeQuery {
  double gamma = 1.0;
  double p = 0.0;
  double big_gamma = 0.0;
  double L = 1.0;
  double T = 1.0;
  long long M = 1;  // GHZ size for the noiseless / short-T prescriptions
};

// ---- optimal interaction times -------------------------------------

// t_opt = sqrt(n) / (2 gamma) for the separable sensor.
inline double t_opt_separable(double n, double gamma) {
  if (!(n >= 1.0) || !(gamma > 0.0)) throw std::invalid_argument("need n >= 1, gamma > 0");
  return std::sqrt(n) / (2.0 * gamma);
}

// t_opt = sqrt(n / M) / (2 gamma) for a size-M GHZ sensor.
inline double t_opt_ghz(double n, double M, double gamma) {
  if (!(n >= 1.0) || !(M >= 1.0) || !(gamma > 0.0))
    throw std::invalid_argument("need n >= 1, M >= 1, gamma > 0");
  return std::sqrt(n / M) / (2.0 * gamma);
}

// With high-frequency decay Gamma = m*gamma:
// t_opt = (-sqrt(n) m + sqrt(n m^2 + 4)) / (4 gamma / sqrt(n)); reduces to
// sqrt(n)/(2 gamma) at m = 0.
inline double t_opt_high_freq(double n, double gamma, double big_gamma) {
  if (!(n >= 1.0) || !(gamma > 0.0) || !(big_gamma >= 0.0))
    throw std::invalid_argument("need n >= 1, gamma > 0, Gamma >= 0");
  const double m = big_gamma / gamma;
  return (-std::sqrt(n) * m + std::sqrt(n * m * m + 4.0)) / (4.0 * gamma / std::sqrt(n));
}

// ---- printed table cells --------------------------------------------

inline double table_perfect_qt(double T, double M, double L) {
  return std::exp(0.25) / (T * std::sqrt(M * L));
}

inline double table_long_t_separable(double p, double gamma, double T, double L) {
  return 2.0 * std::sqrt(std::exp(1.0) * std::sqrt(p) * gamma / (T * L));
}

inline double table_long_t_ghz(double p, double gamma, double T, double L) {
  return std::pow(2.0, 0.75) * std::sqrt(std::exp(1.0) * std::sqrt(p) * gamma / (T * L));
}

// ---- long-T optima ----------------------------------------------------

struct LongTimeChoice {
  double real_value = 1.0;   // continuum optimum, clamped at 1
  long long integer = 1;     // floor/ceil neighbor with the smaller delta_omega
};

namespace detail {

inline LongTimeChoice pick_integer(double real_value,
                                   const std::function<double(double)>& delta_at) {
  LongTimeChoice out;
  out.real_value = real_value;
  const double clamped = std::max(1.0, real_value);
  const long long lo = std::max<long long>(1, static_cast<long long>(std::floor(clamped)));
  const long long hi = std::max<long long>(1, static_cast<long long>(std::ceil(clamped)));
  out.integer = (delta_at(static_cast<double>(lo)) <= delta_at(static_cast<double>(hi))) ? lo : hi;
  return out;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo * fhi > 0.0) throw std::domain_error("bisection endpoints do not bracket a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Long-T optimal teleportation number for the separable sensor:
// n_opt = -1 / (4 log(1-p)); the realized value is the better of its
// integer neighbors. Undefined at p = 0 (short-T branch applies there).
inline LongTimeChoice n_opt_long_t(double p, double gamma = 1.0, double L = 1.0, double T = 1.0) {
  if (!(p > 0.0) || p >= 1.0)
    throw std::domain_error("long-T optimum requires 0 < p < 1; short-T branch applies at p = 0");
  const double n_real = -1.0 / (4.0 * std::log1p(-p));
  auto delta_at = [&](double n) {
    return general_delta_omega(gamma, p, 0.0, L, 1.0, n, t_opt_separable(n, gamma), T);
  };
  return detail::pick_integer(n_real, delta_at);
}

// Long-T GHZ regime: n = 2 pinned, M_opt = -1 / (4 log(1-p)).
inline LongTimeChoice m_opt_long_t(double p, double gamma = 1.0, double L = 1.0, double T = 1.0) {
  if (!(p > 0.0) || p >= 1.0) throw std::domain_error("long-T optimum requires 0 < p < 1");
  const double m_real = -1.0 / (4.0 * std::log1p(-p));
  auto delta_at = [&](double M) {
    return general_delta_omega(gamma, p, 0.0, L, M, 2.0, t_opt_ghz(2.0, M, gamma), T);
  };
  return detail::pick_integer(m_real, delta_at);
}

// ---- regime optimizer -------------------------------------------------

inline Optimum optimum_for_regime(const RegimeQuery& q, Regime regime) {
  if (!(q.gamma > 0.0) || !(q.L > 0.0) || !(q.T > 0.0))
    throw std::invalid_argument("gamma, L, T must be positive");
  if (q.p < 0.0 || q.p >= 1.0) throw std::invalid_argument("p must satisfy 0 <= p < 1");
  Optimum opt;
  opt.regime = regime;
  const double M = static_cast<double>(q.M);
  switch (regime) {
    case Regime::noiseless:
    case Regime::short_T: {
      if (regime == Regime::noiseless && q.p != 0.0)
        throw std::domain_error("noiseless regime requires p = 0");
      // t = T, n = 4 M gamma^2 T^2 keeps the decay exponent at 1/4
      opt.t_opt = q.T;
      opt.n_real = 4.0 * M * q.gamma * q.gamma * q.T * q.T;
      auto delta_at = [&](double n) {
        return general_delta_omega(q.gamma, q.p, 0.0, q.L, M, n, q.T, q.T);
      };
      const LongTimeChoice pick = detail::pick_integer(opt.n_real, delta_at);
      opt.n_opt = pick.integer;
      opt.m_opt = q.M;
      opt.m_real = M;
      opt.delta_omega = delta_at(static_cast<double>(opt.n_opt));
      opt.table_value = table_perfect_qt(q.T, M, q.L);
      if (regime == Regime::short_T && q.p > 0.0) {
        const double t_limit = 1.0 / (std::sqrt(q.p) * q.gamma * M);
        if (q.T >= t_limit) opt.note = "outside short-T validity (T >= 1/(sqrt(p) gamma M))";
      }
      break;
    }
    case Regime::long_T_separable: {
      const LongTimeChoice pick = n_opt_long_t(q.p, q.gamma, q.L, q.T);
      opt.n_opt = pick.integer;
      opt.n_real = pick.real_value;
      opt.m_opt = 1;
      opt.m_real = 1.0;
      opt.t_opt = t_opt_separable(static_cast<double>(opt.n_opt), q.gamma);
      opt.delta_omega = general_delta_omega(q.gamma, q.p, 0.0, q.L, 1.0,
                                            static_cast<double>(opt.n_opt), opt.t_opt, q.T);
      opt.table_value = table_long_t_separable(q.p, q.gamma, q.T, q.L);
      break;
    }
    case Regime::long_T_ghz: {
      const LongTimeChoice pick = m_opt_long_t(q.p, q.gamma, q.L, q.T);
      opt.n_opt = 2;
      opt.n_real = 2.0;
      opt.m_opt = pick.integer;
      opt.m_real = pick.real_value;
      const double Mi = static_cast<double>(opt.m_opt);
      opt.t_opt = t_opt_ghz(2.0, Mi, q.gamma);
      opt.delta_omega = general_delta_omega(q.gamma, q.p, 0.0, q.L, Mi, 2.0, opt.t_opt, q.T);
      opt.table_value = table_long_t_ghz(q.p, q.gamma, q.T, q.L);
      // n = 2 is pinned; report (not override) when n = 3 would do better.
      const double d3 = general_delta_omega(q.gamma, q.p, 0.0, q.L, Mi, 3.0,
                                            t_opt_ghz(3.0, Mi, q.gamma), q.T);
      if (d3 < opt.delta_omega * (1.0 - 0.01)) {
        std::ostringstream msg;
        msg << "pinned n=2 is beaten by n=3 by " << (1.0 - d3 / opt.delta_omega) * 100.0 << "%";
        opt.note = msg.str();
      }
      break;
    }
    case Regime::high_frequency:
      throw std::invalid_argument("use high_freq_optimum for the high-frequency regime");
  }
  return opt;
}

// ---- break-even against the Ramsey baseline ---------------------------

// Continuum long-T separable optimum; the scale (gamma, T, L) cancels in
// the ratio, so defaults of 1 are used for threshold searches.
inline double long_t_separable_delta_continuum(double p, double gamma = 1.0, double T = 1.0,
                                               double L = 1.0) {
  if (!(p > 0.0) || p >= 1.0) throw std::domain_error("requires 0 < p < 1");
  const double n = std::max(1.0, -1.0 / (4.0 * std::log1p(-p)));
  return general_delta_omega(gamma, p, 0.0, L, 1.0, n, t_opt_separable(n, gamma), T);
}

inline double ramsey_teleport_ratio(double p) {
  return ramsey_baseline(1.0, 1.0, 1.0) / long_t_separable_delta_continuum(p);
}

// Root of ramsey_teleport_ratio(p) = 1 by bisection on (1e-6, 0.5).
inline double break_even_p(double tol = 1e-6) {
  return detail::bisect([](double p) { return ramsey_teleport_ratio(p) - 1.0; }, 1e-6, 0.5, tol);
}

// ---- high-frequency appendix ------------------------------------------

// The printed minimized-over-t uncertainty at integer n (m = Gamma/gamma):
// delta = 2 sqrt(gamma) e^{1/4 + (-n m^2 + m sqrt(n(n m^2 + 4)))/8} /
//         ((1-p)^{n-1} sqrt((-n m + sqrt(n(n m^2 + 4))) L T)).
inline double high_freq_delta(double n, double gamma, double m, double p, double L, double T) {
  const double s = std::sqrt(n * (n * m * m + 4.0));
  const double expo = 0.25 + (-n * m * m + m * s) / 8.0;
  const double w = -n * m + s;
  return 2.0 * std::sqrt(gamma) * std::exp(expo) / (std::pow(1.0 - p, n - 1.0) * std::sqrt(w * L * T));
}

// Ramsey baseline under the same high-frequency noise: the n = 1, p = 0
// member of the family above, with all 2L qubits probing. Reduces to
// e^{1/4} sqrt(gamma/(T L)) at m = 0.
inline double high_freq_ramsey(double gamma, double m, double L, double T) {
  return high_freq_delta(1.0, gamma, m, 0.0, 2.0 * L, T);
}

inline long long high_freq_n_max(double m, double p) {
  if (p > 0.0) return std::max<long long>(10, static_cast<long long>(std::ceil(1.0 / p)));
  const double cap = 10.0 / (m * m + 1e-12);
  return static_cast<long long>(std::min(cap, 1e6));
}

// Exhaustive integer argmin of high_freq_delta over n in [1, n_max].
inline Optimum high_freq_optimum(double gamma, double big_gamma, double p, double T, double L) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (big_gamma < 0.0) throw std::invalid_argument("Gamma must be >= 0");
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("p must satisfy 0 <= p < 1");
  const double m = big_gamma / gamma;
  const long long n_max = high_freq_n_max(m, p);
  Optimum opt;
  opt.regime = Regime::high_frequency;
  double best = std::numeric_limits<double>::infinity();
  long long best_n = 1;
  for (long long n = 1; n <= n_max; ++n) {
    const double d = high_freq_delta(static_cast<double>(n), gamma, m, p, L, T);
    if (d < best) {
      best = d;
      best_n = n;
    }
  }
  opt.n_opt = best_n;
  opt.n_real = static_cast<double>(best_n);
  opt.m_opt = 1;
  opt.m_real = 1.0;
  opt.t_opt = t_opt_high_freq(static_cast<double>(best_n), gamma, big_gamma);
  opt.delta_omega = best;
  opt.table_value = best;
  return opt;
}

// delta_R / delta_opt in the (Gamma/gamma, p) plane; scale-invariant.
inline double high_freq_ratio(double m, double p) {
  const Optimum opt = high_freq_optimum(1.0, m, p, 1.0, 1.0);
  return high_freq_ramsey(1.0, m, 1.0, 1.0) / opt.delta_omega;
}

// p on the unit contour at fixed m (ratio decreasing in p).
inline double high_freq_contour_p_at(double m, double tol = 1e-7) {
  return detail::bisect([m](double p) { return high_freq_ratio(m, p) - 1.0; }, 1e-6, 0.49, tol);
}

// m on the unit contour at fixed p; scans for the first sign change and
// refines by bisection.
inline double high_freq_contour_m_at(double p, double tol = 1e-6) {
  double lo = 1e-4;
  double flo = high_freq_ratio(lo, p) - 1.0;
  if (flo < 0.0) throw std::domain_error("no advantage region at this p");
  for (double hi = 0.02; hi <= 1.2; hi += 0.02) {
    const double fhi = high_freq_ratio(hi, p) - 1.0;
    if (fhi < 0.0)
      return detail::bisect([p](double m) { return high_freq_ratio(m, p) - 1.0; }, lo, hi, tol);
    lo = hi;
  }
  throw std::domain_error("unit contour not found for m <= 1.2");
}

// ---- local-minimum certificate -----------------------------------------

struct Certificate {
  bool ok = true;
  double max_gain = 0.0;  // largest relative improvement a perturbation found
  std::string detail;
};

// Perturbs t by +-1% and the free integer dimension by +-1 within the
// regime's feasible set; a genuine optimum never improves by more than
// 1e-6 relative. Pinned dimensions (short-T n, GHZ n=2) are excluded.
inline Certificate certify(const Optimum& opt, const RegimeQuery& q) {
  Certificate cert;
  const double gamma = q.gamma;
  auto delta_at = [&](double t, double n, double M) {
    if (opt.regime == Regime::high_frequency)
      return general_delta_omega(gamma, q.p, q.big_gamma, q.L, M, n, t, q.T);
    return general_delta_omega(gamma, q.p, 0.0, q.L, M, n, t, q.T);
  };
  const double M = static_cast<double>(opt.m_opt);
  const double n = static_cast<double>(opt.n_opt);
  auto consider = [&](double d, const char* what) {
    const double gain = (opt.delta_omega - d) / opt.delta_omega;
    if (gain > cert.max_gain) {
      cert.max_gain = gain;
      cert.detail = what;
    }
  };
  const bool t_pinned_at_T =
      (opt.regime == Regime::noiseless || opt.regime == Regime::short_T);
  consider(delta_at(opt.t_opt * 0.99, n, M), "t -1%");
  if (!t_pinned_at_T) consider(delta_at(opt.t_opt * 1.01, n, M), "t +1%");
  if (opt.regime == Regime::long_T_separable || opt.regime == Regime::high_frequency) {
    if (opt.n_opt > 1) consider(delta_at(opt.t_opt, n - 1.0, M), "n -1");
    consider(delta_at(opt.t_opt, n + 1.0, M), "n +1");
  }
  if (opt.regime == Regime::long_T_ghz) {
    if (opt.m_opt > 1)
      consider(delta_at(t_opt_ghz(2.0, M - 1.0, gamma), 2.0, M - 1.0), "M -1");
    consider(delta_at(t_opt_ghz(2.0, M + 1.0, gamma), 2.0, M + 1.0), "M +1");
  }
  cert.ok = cert.max_gain <= 1e-6;
  return cert;
}

}  // namespace zeno
