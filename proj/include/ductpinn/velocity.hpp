#pragma once

// Particle velocity from a trained pressure network.
//
// direct:   u = ((A - F)/C) p + ((B - D)/C) dp/dx
// transfer: a second network trained against the momentum residual
//           C u + D p' + u' + F p with the pressure network frozen.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "ductpinn/coefficients.hpp"
#include "ductpinn/errors.hpp"
#include "ductpinn/field.hpp"
#include "ductpinn/network.hpp"
#include "ductpinn/pinn.hpp"

namespace ductpinn {

enum class VelocityMethod { direct, transfer };

inline std::string_view to_string(VelocityMethod m) {
  return m == VelocityMethod::direct ? "direct" : "transfer";
}

/// Velocity samples on a grid and how they were obtained.
struct VelocityField {
  std::vector<double> x;
  std::vector<Complex> values;
  VelocityMethod method = VelocityMethod::direct;
};

inline Complex velocity_from_pressure(const MomentumCoefficients& m, Complex p, Complex dpdx) {
  if (!(std::abs(m.C) > 0.0)) throw Error(ErrorCode::ZeroC, "momentum coefficient C vanishes");
  return ((m.A - m.F) / m.C) * p + ((m.B - m.D) / m.C) * dpdx;
}

inline MomentumCoefficients momentum_at(const FrequencyCase& c, double x) {
  return momentum_coeffs_at(c.at(x), c.inlet.gamma, c.omega());
}

inline Complex velocity_direct(const NetworkParameters& pressure, const FrequencyCase& c, double x) {
  const TrialJet t = trial_pressure(pressure, c.boundary, c.length(), x);
  return velocity_from_pressure(momentum_at(c, x), t.value, t.dx);
}

inline VelocityField velocity_direct(const NetworkParameters& pressure, const FrequencyCase& c,
                                     std::span<const double> grid) {
  VelocityField v;
  v.method = VelocityMethod::direct;
  v.x.assign(grid.begin(), grid.end());
  const auto jets = trial_pressure(pressure, c.boundary, c.length(), grid);
  v.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    v.values.push_back(velocity_from_pressure(momentum_at(c, grid[i]), jets[i].value, jets[i].dx));
  return v;
}

/// Velocity trial solution u_t(x) = anchor + (x/L) * scale * net(x).
///
/// The momentum equation alone is first order and carries no boundary
/// condition for u, so its residual cannot see c * exp(-int C dx); the anchor
/// (the direct velocity at x = 0) removes that freedom.
struct VelocityTrial {
  Complex anchor;
  double scale = 1.0;
  double length = 1.0;

  Complex value(double x, Complex n) const { return anchor + (x / length) * scale * n; }
  Complex dx(double x, Complex n, Complex nx) const {
    return scale * (n / length + (x / length) * nx);
  }
};

/// Characteristic velocity |p|max / (rho0 c0) used to scale the network output.
inline double velocity_scale(const FrequencyCase& c) {
  const MeanFlowSample s = c.at(0.0);
  const double pmax = std::max(std::abs(c.boundary.inlet), std::abs(c.boundary.outlet));
  return (pmax > 0.0 ? pmax : 1.0) / (s.rhobar * s.cbar);
}

/// Momentum-residual problem with the pressure terms frozen at every
/// collocation point. Residuals are divided by the velocity scale s so the
/// loss is O(1) like the pressure loss and the same tolerances apply.
class VelocityProblem {
 public:
  VelocityProblem(const NetworkParameters& pressure, FrequencyCase c, CollocationSet colloc)
      : case_(std::move(c)), colloc_(std::move(colloc)) {
    case_.validate();
    trial_.anchor = velocity_direct(pressure, case_, 0.0);
    trial_.scale = velocity_scale(case_);
    trial_.length = case_.length();
    const auto jets = trial_pressure(pressure, case_.boundary, case_.length(), colloc_.points);
    coeffs_.reserve(colloc_.size());
    forcing_.reserve(colloc_.size());
    for (std::size_t i = 0; i < colloc_.size(); ++i) {
      const double x = colloc_.points[i];
      if (!(x > 0.0 && x < case_.length()))
        throw Error(ErrorCode::InvalidArgument, "collocation points must be interior");
      const MomentumCoefficients m = momentum_at(case_, x);
      coeffs_.push_back(m.C);
      forcing_.push_back(m.D * jets[i].dx + m.F * jets[i].value);
    }
  }

  const VelocityTrial& trial() const { return trial_; }
  const CollocationSet& collocation() const { return colloc_; }

  /// Momentum residual loss for arbitrary velocity samples (u, du/dx) at the
  /// collocation points.
  ResidualLoss loss_for(std::span<const Complex> u, std::span<const Complex> dudx) const {
    if (u.size() != colloc_.size() || dudx.size() != colloc_.size())
      throw Error(ErrorCode::InvalidArgument, "velocity samples do not match collocation set");
    ResidualLoss loss;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Complex r = (coeffs_[i] * u[i] + dudx[i] + forcing_[i]) / trial_.scale;
      loss.real += r.real() * r.real();
      loss.imag += r.imag() * r.imag();
    }
    const double inv = 1.0 / static_cast<double>(u.size());
    loss.real *= inv;
    loss.imag *= inv;
    loss.total = loss.real + loss.imag;
    return loss;
  }

  LossGradient loss_and_gradient(const NetworkParameters& params, std::size_t chunk,
                                 ResidualLoss* split = nullptr) const {
    const double inv_n = 1.0 / static_cast<double>(colloc_.size());
    double sum_re = 0.0;
    double sum_im = 0.0;
    LossEvaluator eval = [&](std::size_t offset, const JetBatch& jets, JetBatch& seeds) {
      double part = 0.0;
      for (Eigen::Index i = 0; i < jets.size(); ++i) {
        const std::size_t k = offset + static_cast<std::size_t>(i);
        const double x = colloc_.points[k];
        const Complex n = detail::channel(jets.value, i);
        const Complex nx = detail::channel(jets.dx, i);
        const Complex u = trial_.value(x, n);
        const Complex ux = trial_.dx(x, n, nx);
        const Complex r = (coeffs_[k] * u + ux + forcing_[k]) / trial_.scale;
        sum_re += r.real() * r.real() * inv_n;
        sum_im += r.imag() * r.imag() * inv_n;
        part += std::norm(r) * inv_n;
        const Complex rs = 2.0 * inv_n * r / trial_.scale;
        const Complex su = std::conj(coeffs_[k]) * rs;  // dL/du
        const Complex sux = rs;                         // dL/du'
        const double xl = x / trial_.length;
        const Complex n0 = trial_.scale * (xl * su + sux / trial_.length);
        const Complex n1 = trial_.scale * xl * sux;
        seeds.value(0, i) = n0.real();
        seeds.value(1, i) = n0.imag();
        seeds.dx(0, i) = n1.real();
        seeds.dx(1, i) = n1.imag();
      }
      return part;
    };
    auto out = loss_and_param_gradient(params, colloc_.points, eval, chunk);
    if (split) *split = {sum_re + sum_im, sum_re, sum_im};
    return out;
  }

  VelocityField evaluate(const NetworkParameters& params, std::span<const double> grid) const {
    VelocityField v;
    v.method = VelocityMethod::transfer;
    v.x.assign(grid.begin(), grid.end());
    const JetBatch jets = forward_jets(params, grid);
    v.values.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      v.values.push_back(
          trial_.value(grid[i], detail::channel(jets.value, static_cast<Eigen::Index>(i))));
    return v;
  }

 private:
  FrequencyCase case_;
  CollocationSet colloc_;
  VelocityTrial trial_;
  std::vector<Complex> coeffs_;   // C at each point
  std::vector<Complex> forcing_;  // D p' + F p at each point
};

inline TrainedNetwork train_velocity_transfer(const VelocityProblem& problem,
                                              NetworkParameters initial,
                                              const TrainingConfig& config) {
  return detail::train_network(std::move(initial), config,
                               [&](const NetworkParameters& p, ResidualLoss* split) {
                                 return problem.loss_and_gradient(p, config.chunk, split);
                               });
}

inline TrainedNetwork train_velocity_transfer(const NetworkParameters& pressure,
                                              const FrequencyCase& c,
                                              const NetworkArchitecture& arch_u,
                                              const CollocationSet& colloc_u,
                                              const TrainingConfig& config) {
  const VelocityProblem problem(pressure, c, colloc_u);
  return train_velocity_transfer(problem, init_he(arch_u, config.seed), config);
}

inline void attach_velocity(FieldSolution& field, const VelocityField& v) {
  detail::check_same_grid(field.x, v.x);
  field.velocity = v.values;
}

}  // namespace ductpinn
