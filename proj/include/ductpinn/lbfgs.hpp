#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (bracketing + zoom
// with safeguarded cubic interpolation).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ductpinn/errors.hpp"

namespace ductpinn {

enum class Termination { GradientTolerance, LossTolerance, MaxIterations, LineSearchFailure };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::LossTolerance: return "loss_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

struct LbfgsOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-9;  // on max |g_i|
  double loss_tolerance = 1e-14;
  int memory = 100;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_evaluations = 25;

  void validate() const {
    if (max_iterations < 0) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 0");
    if (!(gradient_tolerance > 0.0) || !(loss_tolerance > 0.0))
      throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    if (memory < 1) throw Error(ErrorCode::InvalidArgument, "L-BFGS memory must be >= 1");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0))
      throw Error(ErrorCode::InvalidArgument, "Wolfe constants need 0 < c1 < c2 < 1");
  }
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double loss = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  Termination termination = Termination::MaxIterations;
  std::vector<double> loss_history;  // accepted losses, starting with the initial one
};

namespace detail {

// Minimiser of the cubic interpolating (x1, f1, g1), (x2, f2, g2), clamped to
// the bracket; falls back to bisection when the cubic has no real minimum.
inline double cubic_minimizer(double x1, double f1, double g1, double x2, double f2, double g2,
                              double lo, double hi) {
  const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
  const double rad = d1 * d1 - g1 * g2;
  if (rad >= 0.0) {
    const double d2 = std::copysign(std::sqrt(rad), x2 - x1);
    const double t = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2));
    if (std::isfinite(t)) return std::clamp(t, lo, hi);
  }
  return 0.5 * (lo + hi);
}

struct LinePoint {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;
  Eigen::VectorXd g;
};

}  // namespace detail

/// Minimise `objective(x, grad) -> f` starting at x0. The objective writes
/// the gradient into `grad` (pre-sized). Accepted losses never increase.
template <class Objective>
LbfgsResult minimize_lbfgs(Objective&& objective, Eigen::VectorXd x0, const LbfgsOptions& opt) {
  opt.validate();
  const Eigen::Index n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  Eigen::VectorXd g(n);
  double f = objective(res.x, g);
  ++res.evaluations;
  if (!std::isfinite(f) || !g.allFinite())
    throw Error(ErrorCode::NonFiniteLoss, "objective is not finite at the starting point");
  res.loss_history.push_back(f);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd d(n), x_trial(n), g_trial(n);
  std::vector<double> alpha_buf;
  bool previous_failed = false;

  auto finish = [&](Termination t) {
    res.loss = f;
    res.gradient_norm = g.cwiseAbs().maxCoeff();
    res.termination = t;
    return res;
  };

  auto evaluate = [&](double step, detail::LinePoint& p) {
    x_trial = res.x + step * d;
    p.step = step;
    p.f = objective(x_trial, g_trial);
    ++res.evaluations;
    if (!std::isfinite(p.f) || !g_trial.allFinite())
      throw Error(ErrorCode::NonFiniteLoss,
                  "objective became non-finite during line search (step " + std::to_string(step) + ")");
    p.slope = g_trial.dot(d);
    p.g = g_trial;
  };

  for (;;) {
    if (g.cwiseAbs().maxCoeff() <= opt.gradient_tolerance) return finish(Termination::GradientTolerance);
    if (f <= opt.loss_tolerance) return finish(Termination::LossTolerance);
    if (res.iterations >= opt.max_iterations) return finish(Termination::MaxIterations);

    // Two-loop recursion.
    d = -g;
    const std::size_t m = s_hist.size();
    alpha_buf.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      alpha_buf[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha_buf[i] * y_hist[i];
    }
    if (m > 0) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha_buf[i] - beta) * s_hist[i];
    }
    double slope0 = g.dot(d);
    if (!(slope0 < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope0 = g.dot(d);
    }
    const double step0 = m == 0 ? std::min(1.0, 1.0 / g.lpNorm<1>()) : 1.0;

    // Strong-Wolfe search: bracket phase then zoom.
    detail::LinePoint prev{0.0, f, slope0, g};
    detail::LinePoint cur;
    detail::LinePoint best = prev;
    bool found = false;
    int evals = 0;
    double step = step0;
    detail::LinePoint lo, hi;
    bool zoom = false;

    while (evals < opt.max_line_search_evaluations) {
      evaluate(step, cur);
      ++evals;
      if (cur.f < best.f) best = cur;
      if (cur.f > f + opt.c1 * step * slope0 || (evals > 1 && cur.f >= prev.f)) {
        lo = prev;
        hi = cur;
        zoom = true;
        break;
      }
      if (std::abs(cur.slope) <= -opt.c2 * slope0) {
        found = true;
        break;
      }
      if (cur.slope >= 0.0) {
        lo = cur;
        hi = prev;
        zoom = true;
        break;
      }
      const double next = detail::cubic_minimizer(prev.step, prev.f, prev.slope, cur.step, cur.f,
                                                  cur.slope, step * 1.01, step * 10.0);
      prev = cur;
      step = next;
    }

    while (zoom && !found && evals < opt.max_line_search_evaluations) {
      const double a = std::min(lo.step, hi.step);
      const double b = std::max(lo.step, hi.step);
      const double width = b - a;
      if (width <= std::numeric_limits<double>::epsilon() * std::max(1.0, b)) break;
      double trial = detail::cubic_minimizer(lo.step, lo.f, lo.slope, hi.step, hi.f, hi.slope, a, b);
      // keep the trial away from the bracket ends
      const double margin = 0.1 * width;
      if (trial - a < margin || b - trial < margin) trial = 0.5 * (a + b);
      evaluate(trial, cur);
      ++evals;
      if (cur.f < best.f) best = cur;
      if (cur.f > f + opt.c1 * trial * slope0 || cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -opt.c2 * slope0) {
          found = true;
          break;
        }
        if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = cur;
      }
    }

    const detail::LinePoint& accept = found ? cur : best;
    if (!found) {
      if (!(best.f < f)) return finish(Termination::LineSearchFailure);
      if (previous_failed) {
        res.x += best.step * d;
        f = best.f;
        g = best.g;
        res.loss_history.push_back(f);
        ++res.iterations;
        return finish(Termination::LineSearchFailure);
      }
      previous_failed = true;
    } else {
      previous_failed = false;
    }

    Eigen::VectorXd s = accept.step * d;
    Eigen::VectorXd y = accept.g - g;
    res.x += s;
    f = accept.f;
    g = accept.g;
    res.loss_history.push_back(f);
    ++res.iterations;

    const double sy = s.dot(y);
    if (!found) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    } else if (sy > 1e-10 * y.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
  }
}

}  // namespace ductpinn
