#pragma once

// Physics-informed solution of the duct pressure equation
//
//   zeta1 p'' + zeta2 p' + zeta3 p = 0,   p(0) = p0,  p(L) = pL,
//
// with the boundary data built into the trial solution
//
//   p_t(x) = (L - x)/L p0 + x/L pL + x (L - x)/L^2 net(x)
//
// so that training is unconstrained. The complex residual is split into its
// real and imaginary parts, each contributing a mean-squared loss.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ductpinn/coefficients.hpp"
#include "ductpinn/errors.hpp"
#include "ductpinn/field.hpp"
#include "ductpinn/lbfgs.hpp"
#include "ductpinn/medium.hpp"
#include "ductpinn/network.hpp"

namespace ductpinn {

/// Dirichlet pressure data at both duct ends.
struct BoundaryData {
  Complex inlet{1.0, 0.0};    // p(0) [Pa]
  Complex outlet{-1.0, 0.0};  // p(L) [Pa]

  void validate() const {
    if (!std::isfinite(inlet.real()) || !std::isfinite(inlet.imag()) ||
        !std::isfinite(outlet.real()) || !std::isfinite(outlet.imag()))
      throw Error(ErrorCode::InvalidArgument, "boundary data must be finite");
  }
};

/// Interior points where the residual is penalised; drawn once and held fixed.
struct CollocationSet {
  std::vector<double> points;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

inline CollocationSet make_collocation(std::size_t count, double length, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "need at least one collocation point");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "duct length must be positive");
  CollocationSet set;
  set.seed = seed;
  set.points.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, length);
  while (set.points.size() < count) {
    const double x = uniform(rng);
    if (x > 0.0 && x < length) set.points.push_back(x);
  }
  std::sort(set.points.begin(), set.points.end());
  return set;
}

struct TrainingConfig {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-9;
  double loss_tolerance = 1e-14;
  int lbfgs_memory = 100;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  std::uint64_t seed = 0;  // network initialisation
  std::size_t chunk = kDefaultChunk;

  LbfgsOptions lbfgs() const {
    LbfgsOptions o;
    o.max_iterations = max_iterations;
    o.gradient_tolerance = gradient_tolerance;
    o.loss_tolerance = loss_tolerance;
    o.memory = lbfgs_memory;
    o.c1 = wolfe_c1;
    o.c2 = wolfe_c2;
    return o;
  }

  void validate() const {
    lbfgs().validate();
    if (chunk == 0) throw Error(ErrorCode::InvalidArgument, "chunk size must be positive");
  }
};

/// One boundary-value problem: a medium at one frequency with pressure data.
struct FrequencyCase {
  double frequency = 500.0;  // [Hz]
  TemperatureProfile profile;
  InletConditions inlet;
  BoundaryData boundary;

  double length() const { return profile.length; }
  double omega() const { return angular_frequency(frequency); }
  MeanFlowSample at(double x) const { return sample(profile, inlet, frequency, x); }

  void validate() const {
    if (!(frequency > 0.0)) throw Error(ErrorCode::InvalidArgument, "frequency must be positive");
    profile.validate();
    inlet.validate();
    boundary.validate();
  }
};

/// Uniform-medium companion of a case: constant temperature (T0 + TL)/2 and
/// the inlet state re-referenced to that temperature, so the Mach number is
/// the inlet Mach number everywhere.
inline FrequencyCase uniform_companion(const FrequencyCase& c) {
  FrequencyCase u = c;
  u.profile.kind = ProfileKind::constant;
  u.inlet.temperature = u.profile.value(0.0);
  return u;
}

struct TrainingReport {
  double final_loss = 0.0;
  double final_loss_real = 0.0;
  double final_loss_imag = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  Termination termination = Termination::MaxIterations;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;
};

struct TrainedNetwork {
  NetworkParameters params;
  TrainingReport report;
};

/// Complex trial-solution value and derivatives at one point.
struct TrialJet {
  Complex value;
  Complex dx;
  Complex dxx;
};

namespace detail {

struct Blend {
  double w0, w0x;         // (L - x)/L and derivative
  double w1, w1x;         // x/L
  double b, bx, bxx;      // x (L - x)/L^2
};

inline Blend blend(double length, double x) {
  const double inv = 1.0 / length;
  return {(length - x) * inv, -inv, x * inv, inv, x * (length - x) * inv * inv,
          (length - 2.0 * x) * inv * inv, -2.0 * inv * inv};
}

inline TrialJet trial_from_net(const BoundaryData& bd, const Blend& w, const Complex& n,
                               const Complex& nx, const Complex& nxx) {
  return {w.w0 * bd.inlet + w.w1 * bd.outlet + w.b * n,
          w.w0x * bd.inlet + w.w1x * bd.outlet + w.bx * n + w.b * nx,
          w.bxx * n + 2.0 * w.bx * nx + w.b * nxx};
}

inline Complex channel(const Eigen::Matrix<double, 2, Eigen::Dynamic>& m, Eigen::Index i) {
  return {m(0, i), m(1, i)};
}

}  // namespace detail

inline TrialJet trial_pressure(const NetworkParameters& params, const BoundaryData& boundary,
                               double length, double x) {
  const NetworkJet j = forward_jet(params, x);
  return detail::trial_from_net(boundary, detail::blend(length, x), {j.value(0), j.value(1)},
                                {j.dx(0), j.dx(1)}, {j.dxx(0), j.dxx(1)});
}

inline std::vector<TrialJet> trial_pressure(const NetworkParameters& params,
                                            const BoundaryData& boundary, double length,
                                            std::span<const double> xs) {
  const JetBatch jets = forward_jets(params, xs);
  std::vector<TrialJet> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out[i] = detail::trial_from_net(boundary, detail::blend(length, xs[i]),
                                    detail::channel(jets.value, c), detail::channel(jets.dx, c),
                                    detail::channel(jets.dxx, c));
  }
  return out;
}

struct ResidualLoss {
  double total = 0.0;
  double real = 0.0;
  double imag = 0.0;
};

/// Mean-squared real and imaginary residuals of the pressure equation for
/// any set of trial jets (network-based or manufactured).
inline ResidualLoss residual_loss(std::span<const ZetaCoefficients> zetas,
                                  std::span<const TrialJet> jets) {
  if (zetas.size() != jets.size() || jets.empty())
    throw Error(ErrorCode::InvalidArgument, "coefficient and jet counts differ");
  ResidualLoss loss;
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const Complex r = zetas[i].zeta1 * jets[i].dxx + zetas[i].zeta2 * jets[i].dx +
                      zetas[i].zeta3 * jets[i].value;
    loss.real += r.real() * r.real();
    loss.imag += r.imag() * r.imag();
  }
  const double inv = 1.0 / static_cast<double>(jets.size());
  loss.real *= inv;
  loss.imag *= inv;
  loss.total = loss.real + loss.imag;
  if (!std::isfinite(loss.total)) throw Error(ErrorCode::NonFiniteLoss, "residual loss is not finite");
  return loss;
}

/// Pressure problem on a fixed collocation set with the coefficients cached.
class PressureProblem {
 public:
  PressureProblem(FrequencyCase c, CollocationSet colloc)
      : case_(std::move(c)), colloc_(std::move(colloc)) {
    case_.validate();
    zetas_.reserve(colloc_.size());
    blends_.reserve(colloc_.size());
    for (double x : colloc_.points) {
      if (!(x > 0.0 && x < case_.length()))
        throw Error(ErrorCode::InvalidArgument, "collocation points must be interior");
      zetas_.push_back(zeta_at(case_.at(x), case_.inlet.gamma));
      blends_.push_back(detail::blend(case_.length(), x));
    }
  }

  const FrequencyCase& frequency_case() const { return case_; }
  const CollocationSet& collocation() const { return colloc_; }
  std::span<const ZetaCoefficients> zetas() const { return zetas_; }

  ResidualLoss loss(const NetworkParameters& params) const {
    const auto jets = trial_pressure(params, case_.boundary, case_.length(), colloc_.points);
    return residual_loss(zetas_, jets);
  }

  /// Loss and gradient; the split into real/imaginary parts of the last call
  /// is kept in `split` when given.
  LossGradient loss_and_gradient(const NetworkParameters& params, std::size_t chunk,
                                 ResidualLoss* split = nullptr) const {
    const double inv_n = 1.0 / static_cast<double>(colloc_.size());
    double sum_re = 0.0;
    double sum_im = 0.0;
    LossEvaluator eval = [&](std::size_t offset, const JetBatch& jets, JetBatch& seeds) {
      double part = 0.0;
      for (Eigen::Index i = 0; i < jets.size(); ++i) {
        const std::size_t k = offset + static_cast<std::size_t>(i);
        const auto& w = blends_[k];
        const auto& z = zetas_[k];
        const TrialJet t = detail::trial_from_net(case_.boundary, w, detail::channel(jets.value, i),
                                                  detail::channel(jets.dx, i),
                                                  detail::channel(jets.dxx, i));
        const Complex r = z.zeta1 * t.dxx + z.zeta2 * t.dx + z.zeta3 * t.value;
        sum_re += r.real() * r.real() * inv_n;
        sum_im += r.imag() * r.imag() * inv_n;
        part += std::norm(r) * inv_n;
        // dL/d(trial) for each derivative order: 2/N * conj(zeta) * r,
        // written as (re, im) = seeds for (real channel, imag channel).
        const Complex rs = 2.0 * inv_n * r;
        const Complex s2 = std::conj(z.zeta1) * rs;
        const Complex s1 = std::conj(z.zeta2) * rs;
        const Complex s0 = std::conj(z.zeta3) * rs;
        const Complex n0 = w.b * s0 + w.bx * s1 + w.bxx * s2;
        const Complex n1 = w.b * s1 + 2.0 * w.bx * s2;
        const Complex n2 = w.b * s2;
        seeds.value(0, i) = n0.real();
        seeds.value(1, i) = n0.imag();
        seeds.dx(0, i) = n1.real();
        seeds.dx(1, i) = n1.imag();
        seeds.dxx(0, i) = n2.real();
        seeds.dxx(1, i) = n2.imag();
      }
      return part;
    };
    auto out = loss_and_param_gradient(params, colloc_.points, eval, chunk);
    if (split) *split = {sum_re + sum_im, sum_re, sum_im};
    return out;
  }

 private:
  FrequencyCase case_;
  CollocationSet colloc_;
  std::vector<ZetaCoefficients> zetas_;
  std::vector<detail::Blend> blends_;
};

namespace detail {

// Drives L-BFGS over a network whose loss is supplied by `lg(params, split)`.
template <class LossFn>
TrainedNetwork train_network(NetworkParameters init, const TrainingConfig& config, LossFn&& lg) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  NetworkParameters work = init;
  ResidualLoss split;
  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    work.values() = theta;
    LossGradient r = lg(work, &split);
    grad = std::move(r.gradient);
    return r.loss;
  };
  LbfgsResult res = minimize_lbfgs(objective, init.values(), config.lbfgs());

  TrainedNetwork out{NetworkParameters(init.architecture(), res.x), {}};
  lg(out.params, &split);
  auto& rep = out.report;
  rep.final_loss = res.loss;
  rep.final_loss_real = split.real;
  rep.final_loss_imag = split.imag;
  rep.gradient_norm = res.gradient_norm;
  rep.iterations = res.iterations;
  rep.evaluations = res.evaluations;
  rep.termination = res.termination;
  rep.seed = config.seed;
  rep.loss_history = std::move(res.loss_history);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace detail

/// Trains a pressure network from `initial` (warm start / restart).
inline TrainedNetwork train(const PressureProblem& problem, NetworkParameters initial,
                            const TrainingConfig& config) {
  return detail::train_network(std::move(initial), config,
                               [&](const NetworkParameters& p, ResidualLoss* split) {
                                 return problem.loss_and_gradient(p, config.chunk, split);
                               });
}

inline TrainedNetwork train(const FrequencyCase& c, const NetworkArchitecture& arch,
                            const CollocationSet& colloc, const TrainingConfig& config) {
  const PressureProblem problem(c, colloc);
  return train(problem, init_he(arch, config.seed), config);
}

/// Samples a trained pressure network on a grid.
inline FieldSolution pinn_field(const NetworkParameters& params, const FrequencyCase& c,
                                std::span<const double> grid) {
  FieldSolution f;
  f.provenance = Provenance::pinn;
  f.x.assign(grid.begin(), grid.end());
  const auto jets = trial_pressure(params, c.boundary, c.length(), grid);
  f.pressure.reserve(jets.size());
  f.pressure_dx.reserve(jets.size());
  for (const auto& j : jets) {
    f.pressure.push_back(j.value);
    f.pressure_dx.push_back(j.dx);
  }
  return f;
}

/// Per-channel relative L2 error.
struct ChannelErrors {
  double real = 0.0;
  double imag = 0.0;

  double max() const { return std::max(real, imag); }
};

namespace detail {

inline void check_same_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::InvalidArgument, "fields are sampled on different grids");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(b[i])))
      throw Error(ErrorCode::InvalidArgument, "fields are sampled on different grids");
}

}  // namespace detail

inline ChannelErrors relative_error(std::span<const Complex> predicted, std::span<const Complex> truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw Error(ErrorCode::InvalidArgument, "sample counts differ");
  double num_re = 0.0, num_im = 0.0, den_re = 0.0, den_im = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const Complex d = predicted[i] - truth[i];
    num_re += d.real() * d.real();
    num_im += d.imag() * d.imag();
    den_re += truth[i].real() * truth[i].real();
    den_im += truth[i].imag() * truth[i].imag();
  }
  if (!(den_re > 0.0) || !(den_im > 0.0))
    throw Error(ErrorCode::ZeroReference, "reference channel is identically zero");
  return {std::sqrt(num_re / den_re), std::sqrt(num_im / den_im)};
}

inline ChannelErrors relative_error(const FieldSolution& predicted, const FieldSolution& truth) {
  detail::check_same_grid(predicted.x, truth.x);
  return relative_error(std::span<const Complex>(predicted.pressure),
                        std::span<const Complex>(truth.pressure));
}

inline ChannelErrors velocity_relative_error(const FieldSolution& predicted,
                                             const FieldSolution& truth) {
  detail::check_same_grid(predicted.x, truth.x);
  if (!predicted.has_velocity() || !truth.has_velocity())
    throw Error(ErrorCode::InvalidArgument, "both fields need velocity samples");
  return relative_error(std::span<const Complex>(predicted.velocity),
                        std::span<const Complex>(truth.velocity));
}

}  // namespace ductpinn
