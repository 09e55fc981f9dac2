#pragma once

// Steady mean-flow field inside a uniform duct with an axial temperature
// profile. The flow is inviscid, perfect-gas and obeys
//
//   rho u = rho0 u0,   p + rho0 u0 u = p0 + rho0 u0^2,   p = rho R T,
//
// which combine into the quadratic  a1 u^2 + a2 u + a3 T(x) = 0  for u(x).
// Every derivative below is the exact derivative of that model.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "ductpinn/errors.hpp"

namespace ductpinn {

enum class ProfileKind { linear, sinusoidal, constant };

inline std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::linear: return "linear";
    case ProfileKind::sinusoidal: return "sinusoidal";
    case ProfileKind::constant: return "constant";
  }
  return "unknown";
}

inline ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "linear") return ProfileKind::linear;
  if (name == "sinusoidal" || name == "sin") return ProfileKind::sinusoidal;
  if (name == "constant" || name == "uniform") return ProfileKind::constant;
  throw Error(ErrorCode::InvalidArgument, "unknown temperature profile '" + std::string(name) + "'");
}

/// Analytic mean temperature T(x) on [0, L].
///
/// - linear:     T = T0 + Tm x,                     Tm = -(T0 - TL)/L
/// - sinusoidal: T = (Td sin(5 pi x/(4L) + pi/4) + Ts)/2,  Td = T0 - TL, Ts = T0 + TL
/// - constant:   T = Ts/2
///
/// For the sinusoidal profile T0 is the interior maximum (at x = L/5), not T(0).
struct TemperatureProfile {
  ProfileKind kind = ProfileKind::linear;
  double inlet_temperature = 1600.0;   // T0 [K]
  double outlet_temperature = 800.0;   // TL [K]
  double length = 1.0;                 // L [m]

  static TemperatureProfile linear(double t0, double tl, double length) {
    return {ProfileKind::linear, t0, tl, length};
  }
  static TemperatureProfile sinusoidal(double t0, double tl, double length) {
    return {ProfileKind::sinusoidal, t0, tl, length};
  }
  static TemperatureProfile constant(double t0, double tl, double length) {
    return {ProfileKind::constant, t0, tl, length};
  }

  double difference() const { return inlet_temperature - outlet_temperature; }
  double sum() const { return inlet_temperature + outlet_temperature; }

  double value(double x) const {
    switch (kind) {
      case ProfileKind::linear: return inlet_temperature - difference() * x / length;
      case ProfileKind::sinusoidal: return 0.5 * (difference() * std::sin(phase(x)) + sum());
      case ProfileKind::constant: return 0.5 * sum();
    }
    return 0.0;
  }

  double first_derivative(double x) const {
    switch (kind) {
      case ProfileKind::linear: return -difference() / length;
      case ProfileKind::sinusoidal: return 0.5 * difference() * wavenumber() * std::cos(phase(x));
      case ProfileKind::constant: return 0.0;
    }
    return 0.0;
  }

  double second_derivative(double x) const {
    switch (kind) {
      case ProfileKind::linear: return 0.0;
      case ProfileKind::sinusoidal: {
        const double w = wavenumber();
        return -0.5 * difference() * w * w * std::sin(phase(x));
      }
      case ProfileKind::constant: return 0.0;
    }
    return 0.0;
  }

  /// Smallest temperature over [0, L].
  double minimum() const {
    switch (kind) {
      case ProfileKind::linear: return std::min(inlet_temperature, outlet_temperature);
      case ProfileKind::constant: return 0.5 * sum();
      case ProfileKind::sinusoidal: {
        // phase sweeps [pi/4, 3pi/2]; sin covers [-1, 1] there.
        return 0.5 * (sum() - std::abs(difference()));
      }
    }
    return 0.0;
  }

  void validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
      throw Error(ErrorCode::InvalidArgument, "duct length must be positive");
    if (!std::isfinite(inlet_temperature) || !std::isfinite(outlet_temperature))
      throw Error(ErrorCode::InvalidArgument, "temperatures must be finite");
    if (!(minimum() > 0.0))
      throw Error(ErrorCode::InvalidArgument, "temperature profile must stay positive on [0, L]");
  }

 private:
  double wavenumber() const { return 5.0 * std::numbers::pi / (4.0 * length); }
  double phase(double x) const { return wavenumber() * x + 0.25 * std::numbers::pi; }
};

/// Steady inlet state of the gas (x = 0).
struct InletConditions {
  double pressure = 1.0e5;       // p0 [Pa]
  double temperature = 1600.0;   // T0 [K]
  double mach = 0.2;             // M0 [-]
  double gamma = 1.4;            // [-]
  double gas_constant = 287.0;   // R [J/(kg K)]

  /// Air at the combustor-like inlet state used throughout the studies.
  static InletConditions table1() { return {}; }

  double sound_speed() const { return std::sqrt(gamma * gas_constant * temperature); }
  double velocity() const { return mach * sound_speed(); }
  double density() const { return pressure / (gas_constant * temperature); }

  void validate() const {
    if (!(pressure > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlet pressure must be positive");
    if (!(temperature > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlet temperature must be positive");
    if (!(mach > 0.0 && mach < 1.0)) throw Error(ErrorCode::InvalidArgument, "inlet Mach number must lie in (0, 1)");
    if (!(gamma > 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must exceed 1");
    if (!(gas_constant > 0.0)) throw Error(ErrorCode::InvalidArgument, "gas constant must be positive");
  }
};

/// Coefficients of a1 u^2 + a2 u + a3 T = 0, always built from the inlet state.
struct VelocityQuadratic {
  double a1 = 0.0;  // rho0 u0
  double a2 = 0.0;  // -(p0 + rho0 u0^2)
  double a3 = 0.0;  // p0 u0 / T0

  static VelocityQuadratic from_inlet(const InletConditions& inlet) {
    const double u0 = inlet.velocity();
    const double rho0 = inlet.density();
    return {rho0 * u0, -(inlet.pressure + rho0 * u0 * u0), inlet.pressure * u0 / inlet.temperature};
  }
};

/// Both real roots of the mean-velocity quadratic at one temperature.
struct VelocityRoots {
  double selected = 0.0;  // smaller root, the physical (subsonic) branch
  double rejected = 0.0;
};

inline constexpr double kSonicTolerance = 1e-8;
inline constexpr double kDenominatorTolerance = 1e-12;
inline constexpr double kDoubleRootTolerance = 1e-7;

/// Steady quantities at one axial position and frequency.
struct MeanFlowSample {
  double x = 0.0;          // [m]
  double frequency = 0.0;  // [Hz]
  double Tbar = 0.0;       // [K]
  double dTdx = 0.0;       // [K/m]
  double d2Tdx2 = 0.0;     // [K/m^2]
  double ubar = 0.0;       // [m/s]
  double pbar = 0.0;       // [Pa]
  double rhobar = 0.0;     // [kg/m^3]
  double cbar = 0.0;       // [m/s]
  double M = 0.0;          // [-]
  double k = 0.0;          // [rad/m]
  double alpha = 0.0;      // (1/rho) d rho/dx [1/m]
  double beta = 0.0;       // (1/rho) d2 rho/dx2 [1/m^2]
  double dMdx = 0.0;       // [1/m]
  double dpdx = 0.0;       // [Pa/m]
  double d2pdx2 = 0.0;     // [Pa/m^2]
};

inline VelocityRoots mean_velocity_roots(const InletConditions& inlet, double temperature) {
  if (!(temperature > 0.0))
    throw Error(ErrorCode::InvalidArgument, "mean temperature must be positive");
  const auto q = VelocityQuadratic::from_inlet(inlet);
  const double disc = q.a2 * q.a2 - 4.0 * q.a1 * q.a3 * temperature;
  if (disc < 0.0)
    throw Error(ErrorCode::NegativeDiscriminant,
                "no subsonic mean flow exists at T = " + std::to_string(temperature) + " K");
  // Near gamma M^2 = 1 the two roots merge and rounding in disc alone
  // (~eps a2^2) shifts them by ~sqrt(eps); treat that band as sonic.
  if (std::sqrt(disc) < kDoubleRootTolerance * std::abs(q.a2))
    throw Error(ErrorCode::SonicSingularity,
                "mean flow is sonic at T = " + std::to_string(temperature) + " K (double root)");
  // Cancellation-free pair of roots.
  const double big = -0.5 * (q.a2 + std::copysign(std::sqrt(disc), q.a2));
  const double r1 = big / q.a1;
  const double r2 = q.a3 * temperature / big;
  VelocityRoots roots{std::min(r1, r2), std::max(r1, r2)};
  if (!(roots.selected > 0.0))
    throw Error(ErrorCode::NonPositiveRoot, "inlet data give a non-positive mean velocity");
  return roots;
}

inline double solve_mean_velocity(const TemperatureProfile& profile, const InletConditions& inlet,
                                  double x) {
  return mean_velocity_roots(inlet, profile.value(x)).selected;
}

inline double mean_pressure(const InletConditions& inlet, double ubar) {
  const double u0 = inlet.velocity();
  return inlet.pressure + inlet.density() * u0 * (u0 - ubar);
}

inline double mean_density(double pbar, double Tbar, double gas_constant) {
  return pbar / (gas_constant * Tbar);
}

namespace detail {

inline double sonic_denominator(double gamma, double mach) {
  const double den = gamma * mach * mach - 1.0;
  if (std::abs(den) < kSonicTolerance)
    throw Error(ErrorCode::SonicSingularity, "gamma M^2 is too close to 1");
  return den;
}

inline double alpha_from(double gamma, double mach, double T, double dTdx) {
  return dTdx / (T * sonic_denominator(gamma, mach));
}

inline double dmach_from(double gamma, double mach, double alpha) {
  return -0.5 * mach * alpha * (1.0 + gamma * mach * mach);
}

struct PressureDerivatives {
  double first = 0.0;
  double second = 0.0;
};

// Differentiate p + a1 u = const and the quadratic twice:
//   u' = -u alpha,  (2 a1 u + a2) u'' = -(2 a1 u'^2 + a3 T''),  p'' = -a1 u''.
inline PressureDerivatives pressure_derivatives(const VelocityQuadratic& q, double ubar,
                                                double alpha, double d2Tdx2) {
  const double den = 2.0 * q.a1 * ubar + q.a2;
  if (std::abs(den) < kDenominatorTolerance * std::abs(q.a2))
    throw Error(ErrorCode::DegenerateDenominator, "2 a1 u + a2 vanishes (double root)");
  const double first = q.a1 * alpha * ubar;
  const double second = q.a1 * (2.0 * q.a1 * alpha * alpha * ubar * ubar + q.a3 * d2Tdx2) / den;
  return {first, second};
}

inline double beta_from(double pbar, const PressureDerivatives& dp, double T, double dTdx,
                        double d2Tdx2) {
  const double lt = dTdx / T;
  const double lp = dp.first / pbar;
  return dp.second / pbar + 2.0 * (lt - lp) * lt - d2Tdx2 / T;
}

}  // namespace detail

inline double alpha_at(const TemperatureProfile& profile, const InletConditions& inlet, double x) {
  const double T = profile.value(x);
  const double u = mean_velocity_roots(inlet, T).selected;
  const double mach = u / std::sqrt(inlet.gamma * inlet.gas_constant * T);
  return detail::alpha_from(inlet.gamma, mach, T, profile.first_derivative(x));
}

inline double dmach_dx_at(const TemperatureProfile& profile, const InletConditions& inlet,
                          double x) {
  const double T = profile.value(x);
  const double u = mean_velocity_roots(inlet, T).selected;
  const double mach = u / std::sqrt(inlet.gamma * inlet.gas_constant * T);
  const double alpha = detail::alpha_from(inlet.gamma, mach, T, profile.first_derivative(x));
  return detail::dmach_from(inlet.gamma, mach, alpha);
}

inline double beta_at(const TemperatureProfile& profile, const InletConditions& inlet, double x) {
  const double T = profile.value(x);
  const double dT = profile.first_derivative(x);
  const double d2T = profile.second_derivative(x);
  const double u = mean_velocity_roots(inlet, T).selected;
  const double mach = u / std::sqrt(inlet.gamma * inlet.gas_constant * T);
  const double alpha = detail::alpha_from(inlet.gamma, mach, T, dT);
  const auto dp = detail::pressure_derivatives(VelocityQuadratic::from_inlet(inlet), u, alpha, d2T);
  return detail::beta_from(mean_pressure(inlet, u), dp, T, dT, d2T);
}

/// All mean-flow quantities at x for a given acoustic frequency [Hz].
inline MeanFlowSample sample(const TemperatureProfile& profile, const InletConditions& inlet,
                             double frequency, double x) {
  const double slack = 1e-12 * profile.length;
  if (!(x >= -slack && x <= profile.length + slack))
    throw Error(ErrorCode::InvalidArgument, "x lies outside [0, L]");

  MeanFlowSample s;
  s.x = x;
  s.frequency = frequency;
  s.Tbar = profile.value(x);
  s.dTdx = profile.first_derivative(x);
  s.d2Tdx2 = profile.second_derivative(x);
  s.ubar = mean_velocity_roots(inlet, s.Tbar).selected;
  s.pbar = mean_pressure(inlet, s.ubar);
  s.rhobar = mean_density(s.pbar, s.Tbar, inlet.gas_constant);
  s.cbar = std::sqrt(inlet.gamma * inlet.gas_constant * s.Tbar);
  s.M = s.ubar / s.cbar;
  s.k = 2.0 * std::numbers::pi * frequency / s.cbar;
  s.alpha = detail::alpha_from(inlet.gamma, s.M, s.Tbar, s.dTdx);
  s.dMdx = detail::dmach_from(inlet.gamma, s.M, s.alpha);
  const auto dp =
      detail::pressure_derivatives(VelocityQuadratic::from_inlet(inlet), s.ubar, s.alpha, s.d2Tdx2);
  s.dpdx = dp.first;
  s.d2pdx2 = dp.second;
  s.beta = detail::beta_from(s.pbar, dp, s.Tbar, s.dTdx, s.d2Tdx2);
  return s;
}

}  // namespace ductpinn
