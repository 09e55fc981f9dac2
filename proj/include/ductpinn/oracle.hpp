#pragma once

// Reference solutions for the pressure equation.
//
// Shooting: the equation is linear, so p = P + c H where P solves the IVP
// p(0) = p0, p'(0) = 0 and H solves p(0) = 0, p'(0) = 1; c is fixed by
// p(L) = pL. Both IVPs are integrated together with classical RK4 and the
// coefficients evaluated analytically at every stage point.
//
// Analytic: for a uniform medium the equation has constant coefficients and
// p = C+ exp(j k+ x) + C- exp(j k- x), k+ = k/(1+M), k- = -k/(1-M).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "ductpinn/coefficients.hpp"
#include "ductpinn/errors.hpp"
#include "ductpinn/field.hpp"
#include "ductpinn/pinn.hpp"
#include "ductpinn/velocity.hpp"

namespace ductpinn {

inline constexpr std::size_t kDefaultOracleSteps = 20000;
inline constexpr std::size_t kDefaultTestPoints = 500;

namespace detail {

struct Ode2 {
  Complex zeta1, zeta2, zeta3;

  // (p, p') -> (p', p'')
  std::array<Complex, 2> operator()(const std::array<Complex, 2>& y) const {
    return {y[1], -(zeta2 * y[1] + zeta3 * y[0]) / zeta1};
  }
};

inline Ode2 ode_at(const FrequencyCase& c, double x) {
  const ZetaCoefficients z = zeta_at(c.at(x), c.inlet.gamma);
  if (!(std::abs(z.zeta1) > 1e-12))
    throw Error(ErrorCode::SingularZeta1, "leading coefficient vanishes at x = " + std::to_string(x));
  return {z.zeta1, z.zeta2, z.zeta3};
}

inline std::array<Complex, 2> axpy(const std::array<Complex, 2>& y, double h,
                                   const std::array<Complex, 2>& k) {
  return {y[0] + h * k[0], y[1] + h * k[1]};
}

}  // namespace detail

/// Shooting solution sampled at `output_points` equally spaced points. The
/// step count is rounded up to a multiple of (output_points - 1) so every
/// output point is an integration node.
inline FieldSolution solve_bvp_shooting(const FrequencyCase& c,
                                        std::size_t n_steps = kDefaultOracleSteps,
                                        std::size_t output_points = kDefaultTestPoints) {
  c.validate();
  if (output_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two output points");
  if (n_steps == 0) throw Error(ErrorCode::InvalidArgument, "need at least one step");
  const std::size_t intervals = output_points - 1;
  const std::size_t per_interval = (n_steps + intervals - 1) / intervals;
  const std::size_t steps = per_interval * intervals;
  const double L = c.length();
  const double h = L / static_cast<double>(steps);

  std::array<Complex, 2> part{c.boundary.inlet, Complex{0.0, 0.0}};
  std::array<Complex, 2> homo{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
  std::vector<std::array<Complex, 2>> part_out, homo_out;
  part_out.reserve(output_points);
  homo_out.reserve(output_points);
  part_out.push_back(part);
  homo_out.push_back(homo);

  double homo_peak = 1.0;
  detail::Ode2 f_left = detail::ode_at(c, 0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double x0 = L * static_cast<double>(i) / static_cast<double>(steps);
    const double x1 = L * static_cast<double>(i + 1) / static_cast<double>(steps);
    const detail::Ode2 f_mid = detail::ode_at(c, 0.5 * (x0 + x1));
    const detail::Ode2 f_right = detail::ode_at(c, x1);
    for (auto* y : {&part, &homo}) {
      const auto k1 = f_left(*y);
      const auto k2 = f_mid(detail::axpy(*y, 0.5 * h, k1));
      const auto k3 = f_mid(detail::axpy(*y, 0.5 * h, k2));
      const auto k4 = f_right(detail::axpy(*y, h, k3));
      for (int j = 0; j < 2; ++j) (*y)[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    homo_peak = std::max(homo_peak, std::abs(homo[0]));
    f_left = f_right;
    if ((i + 1) % per_interval == 0) {
      part_out.push_back(part);
      homo_out.push_back(homo);
    }
  }

  const Complex hL = homo_out.back()[0];
  if (!(std::abs(hL) > 1e-12 * homo_peak))
    throw Error(ErrorCode::DegenerateHomogeneous,
                "homogeneous solution vanishes at x = L (duct resonance of the shooting basis)");
  const Complex coef = (c.boundary.outlet - part_out.back()[0]) / hL;

  FieldSolution field;
  field.provenance = Provenance::shooting;
  field.x = linspace(L, output_points);
  field.pressure.resize(output_points);
  field.pressure_dx.resize(output_points);
  for (std::size_t i = 0; i < output_points; ++i) {
    field.pressure[i] = part_out[i][0] + coef * homo_out[i][0];
    field.pressure_dx[i] = part_out[i][1] + coef * homo_out[i][1];
  }
  // Superposition is exact; pin the far end against rounding in the sum.
  field.pressure.back() = c.boundary.outlet;
  return field;
}

/// Wavenumbers k/(1+M) and -k/(1-M) of the uniform-flow plane waves.
struct UniformWavenumbers {
  double downstream = 0.0;
  double upstream = 0.0;
};

inline UniformWavenumbers uniform_wavenumbers(double k, double mach) {
  return {k / (1.0 + mach), -k / (1.0 - mach)};
}

/// Plane-wave amplitudes of the uniform solution.
struct UniformAmplitudes {
  UniformWavenumbers kappa;
  Complex downstream;
  Complex upstream;
  double rho_c = 0.0;  // characteristic impedance rho c
};

inline UniformAmplitudes uniform_amplitudes(const FrequencyCase& c) {
  c.validate();
  if (c.profile.kind != ProfileKind::constant)
    throw Error(ErrorCode::InvalidArgument, "analytic solution needs a constant temperature profile");
  const MeanFlowSample s = c.at(0.0);
  UniformAmplitudes a;
  a.kappa = uniform_wavenumbers(s.k, s.M);
  a.rho_c = s.rhobar * s.cbar;
  const double L = c.length();
  const Complex ep = std::exp(kJ * (a.kappa.downstream * L));
  const Complex em = std::exp(kJ * (a.kappa.upstream * L));
  const Complex det = em - ep;
  if (!(std::abs(det) > 1e-12))
    throw Error(ErrorCode::DegenerateBoundarySystem, "boundary matrix of the plane-wave basis is singular");
  a.downstream = (c.boundary.inlet * em - c.boundary.outlet) / det;
  a.upstream = (c.boundary.outlet - c.boundary.inlet * ep) / det;
  return a;
}

/// Closed-form uniform-medium field, with the plane-wave velocity
/// u = (C+ e+ - C- e-) / (rho c).
inline FieldSolution analytic_uniform(const FrequencyCase& c, std::span<const double> grid) {
  const UniformAmplitudes a = uniform_amplitudes(c);
  FieldSolution f;
  f.provenance = Provenance::analytic;
  f.x.assign(grid.begin(), grid.end());
  for (double x : grid) {
    const Complex ep = a.downstream * std::exp(kJ * (a.kappa.downstream * x));
    const Complex em = a.upstream * std::exp(kJ * (a.kappa.upstream * x));
    f.pressure.push_back(ep + em);
    f.pressure_dx.push_back(kJ * a.kappa.downstream * ep + kJ * a.kappa.upstream * em);
    f.velocity.push_back((ep - em) / a.rho_c);
  }
  return f;
}

inline FieldSolution analytic_uniform(const FrequencyCase& c,
                                      std::size_t points = kDefaultTestPoints) {
  const auto grid = linspace(c.length(), points);
  return analytic_uniform(c, grid);
}

/// Velocity from the reference pressure and its integrated derivative.
inline FieldSolution oracle_velocity(FieldSolution field, const FrequencyCase& c) {
  field.validate();
  if (!field.has_pressure_dx())
    throw Error(ErrorCode::InvalidArgument, "field carries no pressure derivative");
  field.velocity.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    field.velocity[i] =
        velocity_from_pressure(momentum_at(c, field.x[i]), field.pressure[i], field.pressure_dx[i]);
  return field;
}

/// |p|^2 at every grid point.
inline std::vector<double> amplitude(const FieldSolution& field) {
  std::vector<double> a;
  a.reserve(field.size());
  for (const auto& p : field.pressure) a.push_back(std::norm(p));
  return a;
}

/// Local maxima of a sampled curve and how they evolve along the duct.
struct PeakEnvelope {
  std::vector<std::size_t> indices;
  std::vector<double> values;
  bool increasing = false;      // every peak exceeds the one before it
  double relative_spread = 0.0; // (max - min) / max over the peaks
};

inline PeakEnvelope peak_envelope(std::span<const double> a) {
  PeakEnvelope e;
  for (std::size_t i = 1; i + 1 < a.size(); ++i)
    if (a[i] > a[i - 1] && a[i] >= a[i + 1]) {
      e.indices.push_back(i);
      e.values.push_back(a[i]);
    }
  if (e.values.empty()) return e;
  e.increasing = e.values.size() >= 2;
  for (std::size_t i = 1; i < e.values.size(); ++i) e.increasing = e.increasing && e.values[i] > e.values[i - 1];
  const auto [lo, hi] = std::minmax_element(e.values.begin(), e.values.end());
  e.relative_spread = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  return e;
}

/// Velocity obtained by integrating the momentum equation
/// u' = -C u - (D p' + F p) with RK4 from u(0) = anchor, the pressure taken
/// from a trained network at every stage point. This is what the transfer
/// network converges to when its residual is driven to zero.
inline VelocityField velocity_by_momentum_integration(const NetworkParameters& pressure,
                                                      const FrequencyCase& c, Complex anchor,
                                                      std::size_t n_steps = kDefaultOracleSteps,
                                                      std::size_t output_points = kDefaultTestPoints) {
  c.validate();
  if (output_points < 2 || n_steps == 0)
    throw Error(ErrorCode::InvalidArgument, "need at least one step and two output points");
  const std::size_t intervals = output_points - 1;
  const std::size_t per_interval = (n_steps + intervals - 1) / intervals;
  const std::size_t steps = per_interval * intervals;
  const double L = c.length();
  const double h = L / static_cast<double>(steps);
  auto slope_terms = [&](double x) {
    const MomentumCoefficients m = momentum_at(c, x);
    const TrialJet p = trial_pressure(pressure, c.boundary, L, x);
    return std::pair<Complex, Complex>{m.C, m.D * p.dx + m.F * p.value};
  };
  VelocityField v;
  v.method = VelocityMethod::transfer;
  v.x = linspace(L, output_points);
  v.values.push_back(anchor);
  Complex u = anchor;
  auto left = slope_terms(0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double x0 = L * static_cast<double>(i) / static_cast<double>(steps);
    const double x1 = L * static_cast<double>(i + 1) / static_cast<double>(steps);
    const auto mid = slope_terms(0.5 * (x0 + x1));
    const auto right = slope_terms(x1);
    auto f = [](const std::pair<Complex, Complex>& t, Complex y) { return -t.first * y - t.second; };
    const Complex k1 = f(left, u);
    const Complex k2 = f(mid, u + 0.5 * h * k1);
    const Complex k3 = f(mid, u + 0.5 * h * k2);
    const Complex k4 = f(right, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    left = right;
    if ((i + 1) % per_interval == 0) v.values.push_back(u);
  }
  return v;
}

}  // namespace ductpinn
