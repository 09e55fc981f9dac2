#pragma once

// Fully connected network R -> R^2 with a shared trunk of periodic (or tanh)
// hidden layers and a linear two-neuron output (real and imaginary channel).
//
// Spatial derivatives are carried forward as second-order Taylor jets: every
// layer propagates (value, d/dx, d2/dx2) stacked side by side, so one GEMM
// per layer moves all three. Parameter gradients are obtained by reverse
// mode over that jet computation.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ductpinn/errors.hpp"

namespace ductpinn {

enum class Activation { sine, tanh };

inline std::string_view to_string(Activation a) { return a == Activation::sine ? "sine" : "tanh"; }

inline Activation parse_activation(std::string_view name) {
  if (name == "sine" || name == "sin") return Activation::sine;
  if (name == "tanh") return Activation::tanh;
  throw Error(ErrorCode::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

/// `layers` counts affine maps: layers - 1 hidden layers of `width` neurons
/// followed by the linear output layer.
struct NetworkArchitecture {
  int layers = 7;
  int width = 90;
  Activation activation = Activation::sine;
  double input_scale = 1.0;  // network sees input_scale * x

  static constexpr int input_dim = 1;
  static constexpr int output_dim = 2;

  void validate() const {
    if (layers < 2) throw Error(ErrorCode::InvalidArgument, "network needs at least 2 layers");
    if (width < 1) throw Error(ErrorCode::InvalidArgument, "hidden width must be positive");
    if (!(input_scale > 0.0) || !std::isfinite(input_scale))
      throw Error(ErrorCode::InvalidArgument, "input scale must be positive");
  }

  int fan_in(int layer) const { return layer == 0 ? input_dim : width; }
  int fan_out(int layer) const { return layer == layers - 1 ? output_dim : width; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (int q = 0; q < layers; ++q)
      n += static_cast<std::size_t>(fan_out(q)) * (fan_in(q) + 1);
    return n;
  }

  bool operator==(const NetworkArchitecture&) const = default;
};

/// All weights and biases in one flat vector, layer by layer: W_q
/// (column-major, fan_out x fan_in) followed by b_q.
class NetworkParameters {
 public:
  using Matrix = Eigen::MatrixXd;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  NetworkParameters() = default;

  explicit NetworkParameters(const NetworkArchitecture& arch)
      : arch_(arch), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(arch.parameter_count()))) {
    arch_.validate();
    index_layers();
  }

  NetworkParameters(const NetworkArchitecture& arch, Eigen::VectorXd values) : arch_(arch) {
    arch_.validate();
    if (values.size() != static_cast<Eigen::Index>(arch.parameter_count()))
      throw Error(ErrorCode::InvalidArgument, "parameter vector length does not match architecture");
    values_ = std::move(values);
    index_layers();
  }

  const NetworkArchitecture& architecture() const { return arch_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  ConstMatrixMap weight(int q) const {
    return {values_.data() + weight_offset_[q], arch_.fan_out(q), arch_.fan_in(q)};
  }
  ConstVectorMap bias(int q) const {
    return {values_.data() + bias_offset_[q], arch_.fan_out(q)};
  }
  Eigen::Map<Matrix> weight(int q) {
    return {values_.data() + weight_offset_[q], arch_.fan_out(q), arch_.fan_in(q)};
  }
  Eigen::Map<Eigen::VectorXd> bias(int q) {
    return {values_.data() + bias_offset_[q], arch_.fan_out(q)};
  }

  Eigen::Index weight_offset(int q) const { return weight_offset_[q]; }
  Eigen::Index bias_offset(int q) const { return bias_offset_[q]; }

  bool all_finite() const { return values_.allFinite(); }

 private:
  void index_layers() {
    weight_offset_.clear();
    bias_offset_.clear();
    Eigen::Index offset = 0;
    for (int q = 0; q < arch_.layers; ++q) {
      weight_offset_.push_back(offset);
      offset += static_cast<Eigen::Index>(arch_.fan_out(q)) * arch_.fan_in(q);
      bias_offset_.push_back(offset);
      offset += arch_.fan_out(q);
    }
  }

  NetworkArchitecture arch_;
  Eigen::VectorXd values_;
  std::vector<Eigen::Index> weight_offset_;
  std::vector<Eigen::Index> bias_offset_;
};

/// He-normal weights (std = sqrt(2 / fan_in)), zero biases.
inline NetworkParameters init_he(const NetworkArchitecture& arch, std::uint64_t seed) {
  NetworkParameters params(arch);
  std::mt19937_64 rng(seed);
  for (int q = 0; q < arch.layers; ++q) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / arch.fan_in(q)));
    auto w = params.weight(q);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = normal(rng);
  }
  return params;
}

/// Network output and its first two derivatives with respect to x at one point.
struct NetworkJet {
  Eigen::Vector2d value = Eigen::Vector2d::Zero();
  Eigen::Vector2d dx = Eigen::Vector2d::Zero();
  Eigen::Vector2d dxx = Eigen::Vector2d::Zero();
};

/// Jets for a batch of points; column i belongs to point i, row 0 is the
/// real channel, row 1 the imaginary channel.
struct JetBatch {
  Eigen::Matrix<double, 2, Eigen::Dynamic> value;
  Eigen::Matrix<double, 2, Eigen::Dynamic> dx;
  Eigen::Matrix<double, 2, Eigen::Dynamic> dxx;

  explicit JetBatch(Eigen::Index n = 0)
      : value(Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n)),
        dx(Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n)),
        dxx(Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n)) {}

  Eigen::Index size() const { return value.cols(); }
};

/// Loss contribution of one contiguous chunk of points. `offset` is the index
/// of the chunk's first point in the full point list. Must return the
/// chunk's additive share of the loss and write d(share)/d(jets) into `seeds`
/// (pre-sized like `jets`).
using LossEvaluator =
    std::function<double(std::size_t offset, const JetBatch& jets, JetBatch& seeds)>;

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

namespace detail {

// sigma and its first three derivatives evaluated elementwise on z.
struct ActivationDerivatives {
  Eigen::ArrayXXd s0, s1, s2, s3;
};

inline void activation_derivatives(Activation kind, const Eigen::ArrayXXd& z,
                                   ActivationDerivatives& out, bool need_third) {
  if (kind == Activation::sine) {
    out.s0 = z.sin();
    out.s1 = z.cos();
    out.s2 = -out.s0;
    if (need_third) out.s3 = -out.s1;
  } else {
    out.s0 = z.tanh();
    out.s1 = 1.0 - out.s0.square();
    out.s2 = -2.0 * out.s0 * out.s1;
    if (need_third) out.s3 = -2.0 * out.s1.square() + 4.0 * out.s0.square() * out.s1;
  }
}

// Stacked layer state [value | d/dx | d2/dx2], each block `width x n`.
struct LayerTape {
  Eigen::MatrixXd input;  // stacked input to this layer
  Eigen::ArrayXXd dz;     // d/dx of pre-activation
  Eigen::ArrayXXd ddz;    // d2/dx2 of pre-activation
  ActivationDerivatives act;
};

// Runs the jet forward pass on one chunk. When `tape` is non-null the
// intermediate quantities needed by the reverse sweep are recorded.
inline Eigen::MatrixXd forward_stack(const NetworkParameters& params, std::span<const double> xs,
                                     std::vector<LayerTape>* tape) {
  const auto& arch = params.architecture();
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd h(1, 3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(0, i) = arch.input_scale * xs[static_cast<std::size_t>(i)];
    h(0, n + i) = arch.input_scale;
    h(0, 2 * n + i) = 0.0;
  }
  if (tape) tape->resize(static_cast<std::size_t>(arch.layers - 1));

  for (int q = 0; q < arch.layers - 1; ++q) {
    Eigen::MatrixXd z = params.weight(q) * h;
    z.leftCols(n).colwise() += params.bias(q);

    LayerTape local;
    LayerTape& t = tape ? (*tape)[static_cast<std::size_t>(q)] : local;
    activation_derivatives(arch.activation, z.leftCols(n).array(), t.act, tape != nullptr);
    t.dz = z.middleCols(n, n).array();
    t.ddz = z.rightCols(n).array();

    Eigen::MatrixXd next(z.rows(), 3 * n);
    next.leftCols(n) = t.act.s0.matrix();
    next.middleCols(n, n) = (t.act.s1 * t.dz).matrix();
    next.rightCols(n) = (t.act.s1 * t.ddz + t.act.s2 * t.dz.square()).matrix();
    if (tape) t.input = std::move(h);
    h = std::move(next);
  }
  const int last = arch.layers - 1;
  Eigen::MatrixXd out = params.weight(last) * h;
  out.leftCols(n).colwise() += params.bias(last);
  if (tape) {
    LayerTape final_layer;
    final_layer.input = std::move(h);
    tape->push_back(std::move(final_layer));
  }
  return out;
}

inline void unstack(const Eigen::MatrixXd& out, JetBatch& jets) {
  const Eigen::Index n = out.cols() / 3;
  jets.value = out.leftCols(n);
  jets.dx = out.middleCols(n, n);
  jets.dxx = out.rightCols(n);
}

}  // namespace detail

inline constexpr std::size_t kDefaultChunk = 256;

/// Jets of the network output at every point in `xs`.
inline JetBatch forward_jets(const NetworkParameters& params, std::span<const double> xs,
                             std::size_t chunk = kDefaultChunk) {
  JetBatch all(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t start = 0; start < xs.size(); start += chunk) {
    const std::size_t len = std::min(chunk, xs.size() - start);
    JetBatch part;
    detail::unstack(detail::forward_stack(params, xs.subspan(start, len), nullptr), part);
    const auto s = static_cast<Eigen::Index>(start);
    const auto l = static_cast<Eigen::Index>(len);
    all.value.middleCols(s, l) = part.value;
    all.dx.middleCols(s, l) = part.dx;
    all.dxx.middleCols(s, l) = part.dxx;
  }
  return all;
}

inline NetworkJet forward_jet(const NetworkParameters& params, double x) {
  const double xs[1] = {x};
  const JetBatch b = forward_jets(params, std::span<const double>(xs, 1));
  return {b.value.col(0), b.dx.col(0), b.dxx.col(0)};
}

/// Loss value and its exact gradient with respect to every parameter.
/// Points are processed in fixed-size chunks in order, so the reduction
/// order (and therefore the result) is identical from run to run.
inline LossGradient loss_and_param_gradient(const NetworkParameters& params,
                                            std::span<const double> xs,
                                            const LossEvaluator& loss_eval,
                                            std::size_t chunk = kDefaultChunk) {
  const auto& arch = params.architecture();
  LossGradient result;
  result.gradient = Eigen::VectorXd::Zero(params.size());
  std::vector<detail::LayerTape> tape;

  for (std::size_t start = 0; start < xs.size(); start += chunk) {
    const std::size_t len = std::min(chunk, xs.size() - start);
    const auto n = static_cast<Eigen::Index>(len);
    const Eigen::MatrixXd out = detail::forward_stack(params, xs.subspan(start, len), &tape);
    JetBatch jets;
    detail::unstack(out, jets);
    JetBatch seeds(n);
    result.loss += loss_eval(start, jets, seeds);

    // Output layer (linear).
    Eigen::MatrixXd bar(2, 3 * n);
    bar << seeds.value, seeds.dx, seeds.dxx;
    int q = arch.layers - 1;
    {
      const auto& input = tape.back().input;
      Eigen::Map<Eigen::MatrixXd> gw(result.gradient.data() + params.weight_offset(q),
                                     arch.fan_out(q), arch.fan_in(q));
      gw.noalias() += bar * input.transpose();
      result.gradient.segment(params.bias_offset(q), arch.fan_out(q)) +=
          bar.leftCols(n).rowwise().sum();
    }
    Eigen::MatrixXd hbar = params.weight(q).transpose() * bar;

    for (q = arch.layers - 2; q >= 0; --q) {
      const auto& t = tape[static_cast<std::size_t>(q)];
      const auto a_bar = hbar.leftCols(n).array();
      const auto da_bar = hbar.middleCols(n, n).array();
      const auto dda_bar = hbar.rightCols(n).array();

      Eigen::MatrixXd zbar(hbar.rows(), 3 * n);
      zbar.leftCols(n) = (t.act.s1 * a_bar + t.act.s2 * t.dz * da_bar +
                          (t.act.s2 * t.ddz + t.act.s3 * t.dz.square()) * dda_bar)
                             .matrix();
      zbar.middleCols(n, n) = (t.act.s1 * da_bar + 2.0 * t.act.s2 * t.dz * dda_bar).matrix();
      zbar.rightCols(n) = (t.act.s1 * dda_bar).matrix();

      Eigen::Map<Eigen::MatrixXd> gw(result.gradient.data() + params.weight_offset(q),
                                     arch.fan_out(q), arch.fan_in(q));
      gw.noalias() += zbar * t.input.transpose();
      result.gradient.segment(params.bias_offset(q), arch.fan_out(q)) +=
          zbar.leftCols(n).rowwise().sum();
      if (q > 0) hbar = params.weight(q).transpose() * zbar;
    }
  }

  if (!std::isfinite(result.loss) || !result.gradient.allFinite())
    throw Error(ErrorCode::NonFiniteLoss, "loss or gradient contains non-finite entries");
  return result;
}

}  // namespace ductpinn
