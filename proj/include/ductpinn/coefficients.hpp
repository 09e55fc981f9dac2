#pragma once

// Complex coefficients of the acoustic equations on a steady mean flow,
// harmonic time dependence exp(-j omega t).
//
//   continuity:  A p + B dp/dx + du/dx = 0
//   momentum:    C u + D dp/dx + du/dx + F p = 0
//   pressure:    zeta1 p'' + zeta2 p' + zeta3 p = 0
//
// The pressure equation keeps Mach-number terms up to M^2 and assumes
// |M alpha| << k; validity_check() reports that ratio.

#include <cmath>
#include <complex>
#include <numbers>

#include "ductpinn/errors.hpp"
#include "ductpinn/medium.hpp"

namespace ductpinn {

using Complex = std::complex<double>;

inline constexpr Complex kJ{0.0, 1.0};

inline double angular_frequency(double frequency) { return 2.0 * std::numbers::pi * frequency; }

struct ZetaCoefficients {
  Complex zeta1;
  Complex zeta2;
  Complex zeta3;
};

struct MomentumCoefficients {
  Complex A;
  Complex B;
  Complex C;
  Complex D;
  Complex F;
};

inline ZetaCoefficients zeta_at(const MeanFlowSample& s, double gamma) {
  if (!(std::abs(s.k) > 0.0)) throw Error(ErrorCode::InvalidArgument, "wavenumber must be non-zero");
  const double M = s.M;
  const double M2 = M * M;
  const double k = s.k;
  const double a = s.alpha;
  const double b = s.beta;
  const double dM = s.dMdx;

  ZetaCoefficients z;
  z.zeta1 = {1.0 - M2, -2.0 * M2 * dM / k};
  z.zeta2 = {-(1.0 - (3.0 + gamma) * M2) * a, 2.0 * M * k + M * b / k - 2.0 * M * a * a / k};
  z.zeta3 = {k * k + (2.0 - gamma) * M2 * b + (4.0 * gamma - 5.0) * M2 * a * a,
             -((2.0 + gamma) * M * k * a - 2.0 * gamma * k * M2 * dM)};
  return z;
}

inline constexpr double kZeroFlowTolerance = 1e-12;

/// omega is passed explicitly; the wavenumber inside B is omega / c so that
/// omega -> -omega conjugates every coefficient.
inline MomentumCoefficients momentum_coeffs_at(const MeanFlowSample& s, double gamma,
                                               double omega) {
  if (!(s.ubar > kZeroFlowTolerance))
    throw Error(ErrorCode::ZeroMeanFlow, "mean velocity must be positive");
  const double u = s.ubar;
  const double a = s.alpha;
  const double gp = gamma * s.pbar;
  const double k = omega / s.cbar;
  const double ma_k = s.M * a / k;

  MomentumCoefficients c;
  c.A = Complex{-gamma * u * a, -omega} / gp;
  c.B = (u / gp) * Complex{1.0 + ma_k * ma_k, -ma_k};
  c.C = Complex{-a, -omega / u};
  c.D = 1.0 / (s.rhobar * u);
  c.F = -u * a / gp;
  return c;
}

/// |M alpha| / k; the pressure equation is derived for values well below 1.
inline double validity_check(const MeanFlowSample& s) {
  if (!(s.k > 0.0)) throw Error(ErrorCode::InvalidArgument, "wavenumber must be positive");
  return std::abs(s.M * s.alpha) / s.k;
}

inline constexpr double kValidityWarnRatio = 0.1;

}  // namespace ductpinn
