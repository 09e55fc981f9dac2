#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ductpinn/network.hpp"

using namespace ductpinn;

namespace {

NetworkParameters one_neuron(double w, double b, double v0, double v1, double c0 = 0.0, double c1 = 0.0) {
  NetworkParameters p({2, 1, Activation::sine, 1.0});
  p.weight(0)(0, 0) = w;
  p.bias(0)(0) = b;
  p.weight(1)(0, 0) = v0;
  p.weight(1)(1, 0) = v1;
  p.bias(1)(0) = c0;
  p.bias(1)(1) = c1;
  return p;
}

// Fixed random quadratic functional of the jets:
//   sum_i sum_c  a_ic value^2 + b_ic dx * value + c_ic dxx
struct RandomLoss {
  std::vector<double> xs;
  Eigen::MatrixXd a, b, c;

  explicit RandomLoss(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(0.5 + 0.5 * u(rng));
    a = Eigen::MatrixXd::NullaryExpr(2, static_cast<Eigen::Index>(n), [&] { return u(rng); });
    b = Eigen::MatrixXd::NullaryExpr(2, static_cast<Eigen::Index>(n), [&] { return u(rng); });
    c = Eigen::MatrixXd::NullaryExpr(2, static_cast<Eigen::Index>(n), [&] { return u(rng); });
  }

  LossEvaluator evaluator() const {
    return [this](std::size_t off, const JetBatch& j, JetBatch& s) {
      double loss = 0.0;
      for (Eigen::Index i = 0; i < j.size(); ++i) {
        const Eigen::Index k = static_cast<Eigen::Index>(off) + i;
        for (int ch = 0; ch < 2; ++ch) {
          const double v = j.value(ch, i), d = j.dx(ch, i), dd = j.dxx(ch, i);
          loss += a(ch, k) * v * v + b(ch, k) * d * v + c(ch, k) * dd;
          s.value(ch, i) = 2 * a(ch, k) * v + b(ch, k) * d;
          s.dx(ch, i) = b(ch, k) * v;
          s.dxx(ch, i) = c(ch, k);
        }
      }
      return loss;
    };
  }

  double loss(const NetworkParameters& p) const {
    JetBatch seeds(static_cast<Eigen::Index>(xs.size()));
    return evaluator()(0, forward_jets(p, xs), seeds);
  }
};

void check_gradient(const NetworkArchitecture& arch, std::uint64_t seed, std::size_t chunk) {
  NetworkParameters p = init_he(arch, seed);
  std::mt19937_64 rng(seed + 100);
  std::normal_distribution<double> nd(0.0, 0.3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.values()[i] += nd(rng);  // non-zero biases too
  const RandomLoss rl(16, seed);
  const LossGradient g = loss_and_param_gradient(p, rl.xs, rl.evaluator(), chunk);
  EXPECT_NEAR(g.loss, rl.loss(p), 1e-12 * (1 + std::abs(g.loss)));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(p.values()[i]));
    NetworkParameters a = p, b = p;
    a.values()[i] += h;
    b.values()[i] -= h;
    const double fd = (rl.loss(a) - rl.loss(b)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g.gradient[i]) / std::max(1.0, std::abs(fd)));
  }
  EXPECT_LE(worst, 1e-5);
}

}  // namespace

TEST(Architecture, ParameterCount) {
  EXPECT_EQ((NetworkArchitecture{7, 90, Activation::sine, 1.0}.parameter_count()),
            std::size_t(90 * 2 + 5 * (90 * 90 + 90) + 2 * 90 + 2));
  EXPECT_THROW((NetworkArchitecture{1, 10, Activation::sine, 1.0}.validate()), Error);
  EXPECT_THROW((NetworkArchitecture{3, 0, Activation::sine, 1.0}.validate()), Error);
  EXPECT_EQ(parse_activation("tanh"), Activation::tanh);
  EXPECT_THROW(parse_activation("relu"), Error);
}

TEST(InitHe, DeterministicForSeed) {
  const NetworkArchitecture arch{4, 12, Activation::sine, 1.0};
  EXPECT_EQ(init_he(arch, 9).values(), init_he(arch, 9).values());
  EXPECT_NE(init_he(arch, 9).values(), init_he(arch, 10).values());
}

TEST(InitHe, StandardDeviationAndZeroBiases) {
  const NetworkArchitecture arch{3, 90, Activation::sine, 1.0};
  const double target = std::sqrt(2.0 / 90.0);
  EXPECT_NEAR(target, 0.1491, 1e-4);
  double sq = 0.0, sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = init_he(arch, seed);
    const auto w = p.weight(1);  // 90 x 90 hidden layer
    sum += w.sum();
    sq += w.squaredNorm();
    count += static_cast<std::size_t>(w.size());
    for (int q = 0; q < arch.layers; ++q) EXPECT_EQ(p.bias(q).cwiseAbs().maxCoeff(), 0.0);
  }
  const double mean = sum / count;
  const double sd = std::sqrt(sq / count - mean * mean);
  EXPECT_NEAR(sd, target, 0.05 * target);
  EXPECT_NEAR(std::sqrt(init_he(arch, 1).weight(0).squaredNorm() / 90.0), std::sqrt(2.0), 0.5);
}

TEST(ForwardJet, OneNeuronClosedForm) {
  const double w = 1.7, b = 0.3, v0 = -0.8, v1 = 2.1, x = 0.45;
  const NetworkJet j = forward_jet(one_neuron(w, b, v0, v1), x);
  const double s = std::sin(w * x + b), c = std::cos(w * x + b);
  EXPECT_NEAR(j.value(0), v0 * s, 1e-15);
  EXPECT_NEAR(j.value(1), v1 * s, 1e-15);
  EXPECT_NEAR(j.dx(0), v0 * w * c, 1e-15);
  EXPECT_NEAR(j.dxx(1), -v1 * w * w * s, 1e-14);
}

TEST(ForwardJet, MatchesFiniteDifferencesOnRandomNets) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Activation act = trial % 5 == 4 ? Activation::tanh : Activation::sine;
    const NetworkParameters p = init_he({2 + trial % 4, 6 + trial % 7, act, trial % 3 == 0 ? 2.5 : 1.0},
                                        static_cast<std::uint64_t>(trial));
    const double x = u(rng);
    const NetworkJet j = forward_jet(p, x);
    const double h1 = 1e-5, h2 = 1e-4;
    const NetworkJet a = forward_jet(p, x + h1), b = forward_jet(p, x - h1);
    const NetworkJet c = forward_jet(p, x + h2), d = forward_jet(p, x - h2);
    for (int ch = 0; ch < 2; ++ch) {
      const double fd1 = (a.value(ch) - b.value(ch)) / (2 * h1);
      const double fd2 = (c.value(ch) - 2 * j.value(ch) + d.value(ch)) / (h2 * h2);
      EXPECT_LE(std::abs(j.dx(ch) - fd1), 1e-6 * (1 + std::abs(j.dx(ch))));
      EXPECT_LE(std::abs(j.dxx(ch) - fd2), 1e-5 * (1 + std::abs(j.dxx(ch))));
    }
  }
}

TEST(ForwardJet, BatchMatchesSinglePoint) {
  const NetworkParameters p = init_he({4, 10, Activation::sine, 1.0}, 3);
  std::vector<double> xs;
  for (int i = 0; i < 600; ++i) xs.push_back(i / 599.0);
  const JetBatch b = forward_jets(p, xs, 64);
  for (int i : {0, 63, 64, 599}) {
    const NetworkJet j = forward_jet(p, xs[static_cast<std::size_t>(i)]);
    EXPECT_NEAR((b.value.col(i) - j.value).norm(), 0.0, 1e-14);
    EXPECT_NEAR((b.dxx.col(i) - j.dxx).norm(), 0.0, 1e-13);
  }
}

TEST(ParamGradient, HandDerivedOneNeuron) {
  const double w = 0.9, b = -0.2, v0 = 0.5, v1 = -1.5, x0 = 0.7;
  const NetworkParameters p = one_neuron(w, b, v0, v1);
  const double xs[1] = {x0};
  // loss = |value(x0)|^2
  const LossEvaluator eval = [](std::size_t, const JetBatch& j, JetBatch& s) {
    s.value = 2.0 * j.value;
    return j.value.squaredNorm();
  };
  const LossGradient g = loss_and_param_gradient(p, std::span<const double>(xs, 1), eval);
  const double s = std::sin(w * x0 + b), c = std::cos(w * x0 + b);
  const double vv = v0 * v0 + v1 * v1;
  EXPECT_NEAR(g.loss, vv * s * s, 1e-15);
  // layout: W0, b0, W1 (v0, v1), b1
  EXPECT_NEAR(g.gradient[0], 2 * vv * s * c * x0, 1e-14);
  EXPECT_NEAR(g.gradient[1], 2 * vv * s * c, 1e-14);
  EXPECT_NEAR(g.gradient[2], 2 * v0 * s * s, 1e-14);
  EXPECT_NEAR(g.gradient[3], 2 * v1 * s * s, 1e-14);
  EXPECT_NEAR(g.gradient[4], 2 * v0 * s, 1e-14);
  EXPECT_NEAR(g.gradient[5], 2 * v1 * s, 1e-14);
}

TEST(ParamGradient, ZeroNetwork) {
  NetworkParameters p({3, 4, Activation::sine, 1.0});
  p.bias(2)(0) = 0.25;
  p.bias(2)(1) = -0.5;
  const NetworkJet j = forward_jet(p, 0.3);
  EXPECT_EQ(j.value(0), 0.25);
  EXPECT_EQ(j.value(1), -0.5);
  EXPECT_EQ(j.dx.norm(), 0.0);
  // loss = value_re: with all weights zero only the output bias receives
  // gradient; a unit output weight opens the path to hidden bias 0 via cos(0) = 1
  p.weight(2)(0, 0) = 1.0;
  p.weight(1)(0, 0) = 0.0;
  const double xs[1] = {0.3};
  const LossEvaluator eval = [](std::size_t, const JetBatch& jet, JetBatch& s) {
    s.value(0, 0) = 1.0;
    return jet.value(0, 0);
  };
  const LossGradient g = loss_and_param_gradient(p, std::span<const double>(xs, 1), eval);
  EXPECT_EQ(g.gradient[p.bias_offset(1)], 1.0);  // d/d b_1[0] = w_out * cos(0)
  EXPECT_EQ(g.gradient[p.bias_offset(0)], 0.0);  // blocked by zero W_1
  EXPECT_EQ(g.gradient[p.bias_offset(2)], 1.0);
}

TEST(ParamGradient, MatchesFiniteDifferencesSmallNets) {
  check_gradient({2, 4, Activation::sine, 1.0}, 1, kDefaultChunk);
  check_gradient({3, 5, Activation::sine, 1.0}, 2, 5);
  check_gradient({4, 3, Activation::tanh, 1.0}, 3, 7);
  check_gradient({3, 4, Activation::sine, 3.0}, 4, 16);
}

TEST(ParamGradient, ChunkingDoesNotChangeResult) {
  const NetworkParameters p = init_he({3, 8, Activation::sine, 1.0}, 8);
  const RandomLoss rl(50, 8);
  const auto a = loss_and_param_gradient(p, rl.xs, rl.evaluator(), 256);
  const auto b = loss_and_param_gradient(p, rl.xs, rl.evaluator(), 7);
  EXPECT_NEAR(a.loss, b.loss, 1e-13 * std::abs(a.loss));
  EXPECT_LE((a.gradient - b.gradient).cwiseAbs().maxCoeff(), 1e-12 * (1 + a.gradient.cwiseAbs().maxCoeff()));
  const auto c = loss_and_param_gradient(p, rl.xs, rl.evaluator(), 7);
  EXPECT_EQ(b.gradient, c.gradient);  // run-to-run identical
}

TEST(ParamGradient, NonFiniteLossThrows) {
  const NetworkParameters p = init_he({2, 3, Activation::sine, 1.0}, 1);
  const double xs[1] = {0.5};
  const LossEvaluator eval = [](std::size_t, const JetBatch&, JetBatch&) { return std::nan(""); };
  try {
    (void)loss_and_param_gradient(p, std::span<const double>(xs, 1), eval);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
  }
}
