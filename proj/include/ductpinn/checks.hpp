#pragma once

// Fast invariant checks run by `ductpinn check`. Each check is
// self-contained and finishes in well under a second.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ductpinn/coefficients.hpp"
#include "ductpinn/medium.hpp"
#include "ductpinn/network.hpp"
#include "ductpinn/oracle.hpp"
#include "ductpinn/pinn.hpp"

namespace ductpinn {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
};

namespace detail {

// Relative difference; `floor` keeps zero references (e.g. alpha at a
// temperature extremum) from dividing by zero.
inline double rel(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline CheckResult bounded(std::string name, double measured, double limit) {
  return {std::move(name), measured <= limit, measured, limit};
}

}  // namespace detail

inline CheckResult check_mean_flow_closure() {
  const InletConditions in = InletConditions::table1();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (ProfileKind k : {ProfileKind::linear, ProfileKind::sinusoidal}) {
    const TemperatureProfile p{k, 1600.0, 800.0, 1.0};
    for (int i = 0; i < 100; ++i) {
      const MeanFlowSample s = sample(p, in, 500.0, u(rng));
      worst = std::max(worst, detail::rel(s.rhobar * s.ubar, in.density() * in.velocity()));
      worst = std::max(worst, detail::rel(s.pbar, s.rhobar * in.gas_constant * s.Tbar));
    }
  }
  return detail::bounded("mean flow: mass flux and state equation", worst, 1e-10);
}

inline CheckResult check_uniform_reduction() {
  const InletConditions in{1e5, 1200.0, 0.2, 1.4, 287.0};
  const TemperatureProfile p{ProfileKind::constant, 1600.0, 800.0, 1.0};
  double worst = 0.0;
  for (double f : {250.0, 500.0, 1000.0, 2000.0})
    for (double x : {0.0, 0.3, 0.7, 1.0}) {
      const MeanFlowSample s = sample(p, in, f, x);
      const ZetaCoefficients z = zeta_at(s, in.gamma);
      worst = std::max({worst, std::abs(z.zeta1 - (1.0 - s.M * s.M)),
                        std::abs(z.zeta2 - kJ * (2.0 * s.k * s.M)) / s.k,
                        std::abs(z.zeta3 - s.k * s.k) / (s.k * s.k)});
    }
  return detail::bounded("coefficients: uniform reduction", worst, 1e-12);
}

inline CheckResult check_density_derivatives() {
  const InletConditions in = InletConditions::table1();
  const double h = 1e-4;
  double worst = 0.0;
  for (ProfileKind k : {ProfileKind::linear, ProfileKind::sinusoidal}) {
    const TemperatureProfile p{k, 1600.0, 800.0, 1.0};
    auto rho = [&](double x) { return sample(p, in, 500.0, x).rhobar; };
    auto mach = [&](double x) { return sample(p, in, 500.0, x).M; };
    for (double x : {0.1, 0.2, 0.45, 0.8}) {
      const MeanFlowSample s = sample(p, in, 500.0, x);
      const double r0 = rho(x), rp = rho(x + h), rm = rho(x - h);
      worst = std::max(worst, detail::rel(s.alpha, (rp - rm) / (2 * h) / r0, 1e-2));
      worst = std::max(worst, detail::rel(s.beta, (rp - 2 * r0 + rm) / (h * h) / r0, 1e-2));
      worst = std::max(worst, detail::rel(s.dMdx, (mach(x + h) - mach(x - h)) / (2 * h), 1e-3));
    }
  }
  return detail::bounded("medium: alpha, beta, dM/dx vs finite differences", worst, 1e-5);
}

inline CheckResult check_network_jets() {
  const NetworkParameters p = init_he({3, 8, Activation::sine, 1.0}, 5);
  const double h = 1e-4;
  double worst = 0.0;
  for (double x : {0.1, 0.5, 0.9}) {
    const NetworkJet j = forward_jet(p, x);
    const NetworkJet a = forward_jet(p, x + h), b = forward_jet(p, x - h);
    for (int c = 0; c < 2; ++c) {
      // measured as a fraction of the tolerance: 1e-6 first, 1e-5 second derivative
      worst = std::max(worst, detail::rel(j.dx[c], (a.value[c] - b.value[c]) / (2 * h)) / 1e-6);
      worst = std::max(worst, detail::rel(j.dxx[c], (a.value[c] - 2 * j.value[c] + b.value[c]) / (h * h)) / 1e-5);
    }
  }
  return detail::bounded("network: jet derivatives vs central differences", worst, 1.0);
}

inline CheckResult check_hard_boundary() {
  const FrequencyCase c{500.0, TemperatureProfile::linear(1600, 800, 1), InletConditions::table1(), {}};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NetworkParameters p = init_he({3, 8, Activation::sine, 1.0}, seed);
    worst = std::max(worst, std::abs(trial_pressure(p, c.boundary, c.length(), 0.0).value - c.boundary.inlet));
    worst = std::max(worst, std::abs(trial_pressure(p, c.boundary, c.length(), c.length()).value - c.boundary.outlet));
  }
  return detail::bounded("pinn: trial solution meets boundary data", worst, 1e-15);
}

inline CheckResult check_oracle_uniform() {
  FrequencyCase c{500.0, TemperatureProfile::constant(1600, 800, 1), InletConditions::table1(), {}};
  c = uniform_companion(c);
  const FieldSolution s = solve_bvp_shooting(c);
  const ChannelErrors e = relative_error(s, analytic_uniform(c, s.x));
  return detail::bounded("oracle: shooting vs analytic uniform solution", e.max(), 1e-8);
}

inline CheckResult check_oracle_order() {
  const FrequencyCase c{1000.0, TemperatureProfile::linear(1600, 800, 1), InletConditions::table1(), {}};
  const FieldSolution a = solve_bvp_shooting(c, 100, 11);
  const FieldSolution b = solve_bvp_shooting(c, 200, 11);
  const FieldSolution r = solve_bvp_shooting(c, 3200, 11);
  const ChannelErrors ea = relative_error(a, r), eb = relative_error(b, r);
  const double ratio = (ea.real + ea.imag) / (eb.real + eb.imag);
  CheckResult out{"oracle: RK4 error ratio for step halving in [12, 20]", ratio >= 12.0 && ratio <= 20.0,
                  ratio, 20.0};
  return out;
}

inline std::vector<CheckResult> run_checks() {
  return {check_mean_flow_closure(), check_uniform_reduction(), check_density_derivatives(),
          check_network_jets(),      check_hard_boundary(),     check_oracle_uniform(),
          check_oracle_order()};
}

}  // namespace ductpinn
