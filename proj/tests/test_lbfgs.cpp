#include <gtest/gtest.h>

#include <cmath>

#include "ductpinn/lbfgs.hpp"

using namespace ductpinn;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  double f = 0.0;
  g.setZero();
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
    g[i] += -400.0 * a * x[i] - 2.0 * b;
    g[i + 1] += 200.0 * a;
  }
  return f;
}

}  // namespace

TEST(Lbfgs, RosenbrockConverges) {
  Eigen::VectorXd x0(6);
  x0 << -1.2, 1.0, -1.2, 1.0, -1.2, 1.0;
  LbfgsOptions opt;
  opt.max_iterations = 2000;
  opt.loss_tolerance = 1e-30;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_LE((r.x - Eigen::VectorXd::Ones(6)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(r.termination == Termination::GradientTolerance ||
              r.termination == Termination::LineSearchFailure)
      << to_string(r.termination);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i)
    EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
  EXPECT_EQ(r.loss_history.size(), static_cast<std::size_t>(r.iterations) + 1);
}

TEST(Lbfgs, QuadraticHitsGradientTolerance) {
  Eigen::VectorXd d(5);
  d << 1, 10, 100, 3, 0.5;
  auto quad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = d.cwiseProduct(x);
    return 0.5 * x.dot(g);
  };
  LbfgsOptions opt;
  opt.loss_tolerance = 1e-40;
  const LbfgsResult r = minimize_lbfgs(quad, Eigen::VectorXd::Ones(5), opt);
  EXPECT_EQ(r.termination, Termination::GradientTolerance);
  EXPECT_LE(r.gradient_norm, opt.gradient_tolerance);
  EXPECT_LT(r.iterations, 50);
}

TEST(Lbfgs, RestartFromConvergedPointTakesNoIterations) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.loss_tolerance = 1e-40;
  const LbfgsResult first = minimize_lbfgs(rosenbrock, x0, opt);
  ASSERT_EQ(first.termination, Termination::GradientTolerance);
  const LbfgsResult again = minimize_lbfgs(rosenbrock, first.x, opt);
  EXPECT_LE(again.iterations, 1);
  EXPECT_EQ(again.termination, Termination::GradientTolerance);
}

TEST(Lbfgs, LossToleranceAndIterationCap) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.max_iterations = 3;
  const LbfgsResult capped = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_EQ(capped.termination, Termination::MaxIterations);
  EXPECT_EQ(capped.iterations, 3);

  opt.max_iterations = 1000;
  opt.loss_tolerance = 1e-3;
  const LbfgsResult loose = minimize_lbfgs(rosenbrock, x0, opt);
  EXPECT_EQ(loose.termination, Termination::LossTolerance);
  EXPECT_LE(loose.loss, 1e-3);
}

TEST(Lbfgs, NonFiniteObjectiveThrows) {
  auto bad = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g.setZero();
    return std::numeric_limits<double>::infinity();
  };
  try {
    (void)minimize_lbfgs(bad, Eigen::VectorXd::Zero(2), LbfgsOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
  }
}

TEST(Lbfgs, InvalidOptionsRejected) {
  LbfgsOptions opt;
  opt.memory = 0;
  EXPECT_THROW(opt.validate(), Error);
  opt = {};
  opt.c1 = 0.95;
  EXPECT_THROW(opt.validate(), Error);
  opt = {};
  opt.gradient_tolerance = 0.0;
  EXPECT_THROW(opt.validate(), Error);
}
