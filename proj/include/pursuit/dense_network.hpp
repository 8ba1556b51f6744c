#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pursuit {

enum class OutputActivation : std::uint8_t { Linear = 0, Tanh = 1 };

/// Fully connected network with rectifier hidden layers. Inputs and outputs are
/// column-major batches: one column per sample.
template <typename Scalar>
class DenseNetwork {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };

  /// Per-layer parameter-shaped buffers (gradients, optimizer moments).
  using Params = std::vector<Layer>;

  struct Cache {
    std::vector<Matrix> activations;  // activations[0] is the input
    std::vector<Matrix> pre;          // pre-activation of each layer
  };

  DenseNetwork() = default;

  DenseNetwork(std::vector<int> sizes, OutputActivation out) : sizes_(std::move(sizes)), output_(out) {
    if (sizes_.size() < 2) throw std::invalid_argument("DenseNetwork: need at least input and output sizes");
    for (int s : sizes_) {
      if (s <= 0) throw std::invalid_argument("DenseNetwork: layer sizes must be positive");
    }
    layers_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weight = Matrix::Zero(sizes_[l + 1], sizes_[l]);
      layers_[l].bias = Vector::Zero(sizes_[l + 1]);
    }
  }

  /// W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  template <typename Gen>
  void init_uniform_fan_in(Gen& rng) {
    for (auto& layer : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = static_cast<Scalar>(u(rng));
      for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias(k) = static_cast<Scalar>(u(rng));
    }
  }

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  OutputActivation output_activation() const { return output_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  bool hidden_linear() const { return hidden_linear_; }
  /// Drops the rectifier on hidden layers (a purely affine network).
  void set_hidden_linear(bool v) { hidden_linear_ = v; }

  Matrix forward(const Matrix& input) const {
    check_input(input);
    Matrix a = input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Matrix z = layers_[l].weight * a;
      z.colwise() += layers_[l].bias;
      a = activate(z, l);
    }
    return a;
  }

  Matrix forward(const Matrix& input, Cache& cache) const {
    check_input(input);
    cache.activations.resize(layers_.size() + 1);
    cache.pre.resize(layers_.size());
    cache.activations[0] = input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      cache.pre[l].noalias() = layers_[l].weight * cache.activations[l];
      cache.pre[l].colwise() += layers_[l].bias;
      cache.activations[l + 1] = activate(cache.pre[l], l);
    }
    return cache.activations.back();
  }

  /// Back-propagates dL/d(output). Writes parameter gradients into `grads`
  /// (overwriting) and returns dL/d(input).
  Matrix backward(const Cache& cache, const Matrix& grad_output, Params& grads) const {
    if (grads.size() != layers_.size()) grads = zeros_like();
    Matrix delta = grad_output.cwiseProduct(derivative(cache, layers_.size() - 1));
    for (std::size_t l = layers_.size(); l-- > 0;) {
      grads[l].weight.noalias() = delta * cache.activations[l].transpose();
      grads[l].bias = delta.rowwise().sum();
      Matrix upstream = layers_[l].weight.transpose() * delta;
      if (l == 0) return upstream;
      delta = upstream.cwiseProduct(derivative(cache, l - 1));
    }
    return delta;  // unreachable
  }

  Params zeros_like() const {
    Params p(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      p[l].weight = Matrix::Zero(layers_[l].weight.rows(), layers_[l].weight.cols());
      p[l].bias = Vector::Zero(layers_[l].bias.size());
    }
    return p;
  }

  /// this <- tau * online + (1 - tau) * this
  void soft_update_from(const DenseNetwork& online, Scalar tau) {
    check_same_shape(online);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weight = tau * online.layers_[l].weight + (Scalar(1) - tau) * layers_[l].weight;
      layers_[l].bias = tau * online.layers_[l].bias + (Scalar(1) - tau) * layers_[l].bias;
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  /// Flat view over all weights then biases, layer by layer.
  Scalar& parameter(std::size_t idx) { return parameter_ref(layers_, idx); }
  Scalar parameter(std::size_t idx) const { return parameter_ref(const_cast<Params&>(layers_), idx); }

  static Scalar& parameter_ref(Params& p, std::size_t idx) {
    for (auto& l : p) {
      const auto nw = static_cast<std::size_t>(l.weight.size());
      if (idx < nw) return l.weight.data()[idx];
      idx -= nw;
      const auto nb = static_cast<std::size_t>(l.bias.size());
      if (idx < nb) return l.bias.data()[idx];
      idx -= nb;
    }
    throw std::out_of_range("DenseNetwork: parameter index out of range");
  }

  template <typename Other>
  DenseNetwork<Other> cast() const {
    DenseNetwork<Other> out(sizes_, output_);
    out.set_hidden_linear(hidden_linear_);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      out.layers()[l].weight = layers_[l].weight.template cast<Other>();
      out.layers()[l].bias = layers_[l].bias.template cast<Other>();
    }
    return out;
  }

  bool operator==(const DenseNetwork& o) const {
    if (sizes_ != o.sizes_ || output_ != o.output_ || hidden_linear_ != o.hidden_linear_) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l].weight != o.layers_[l].weight || layers_[l].bias != o.layers_[l].bias) return false;
    }
    return true;
  }

 private:
  bool is_output(std::size_t l) const { return l + 1 == layers_.size(); }

  Matrix activate(const Matrix& z, std::size_t l) const {
    if (is_output(l)) {
      return output_ == OutputActivation::Tanh ? Matrix(z.array().tanh()) : z;
    }
    return hidden_linear_ ? z : Matrix(z.cwiseMax(Scalar(0)));
  }

  // Derivative of layer l's activation evaluated at its pre-activation.
  Matrix derivative(const Cache& cache, std::size_t l) const {
    if (is_output(l)) {
      if (output_ == OutputActivation::Tanh) {
        return (Scalar(1) - cache.activations[l + 1].array().square()).matrix();
      }
      return Matrix::Ones(cache.pre[l].rows(), cache.pre[l].cols());
    }
    if (hidden_linear_) return Matrix::Ones(cache.pre[l].rows(), cache.pre[l].cols());
    return (cache.pre[l].array() > Scalar(0)).template cast<Scalar>().matrix();
  }

  void check_input(const Matrix& input) const {
    if (input.rows() != sizes_.front()) {
      throw std::invalid_argument("DenseNetwork: input has " + std::to_string(input.rows()) + " rows, expected " +
                                  std::to_string(sizes_.front()));
    }
  }

  void check_same_shape(const DenseNetwork& o) const {
    if (sizes_ != o.sizes_) throw std::invalid_argument("DenseNetwork: shape mismatch");
  }

  std::vector<int> sizes_;
  OutputActivation output_ = OutputActivation::Linear;
  bool hidden_linear_ = false;
  std::vector<Layer> layers_;
};

/// Adaptive-moment optimizer: first/second moment accumulators with bias correction.
///   m <- b1 m + (1 - b1) g;  v <- b2 v + (1 - b2) g^2
///   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <typename Scalar>
class Adam {
 public:
  using Net = DenseNetwork<Scalar>;

  Adam() = default;
  Adam(const Net& net, Scalar lr, Scalar beta1 = Scalar(0.9), Scalar beta2 = Scalar(0.999), Scalar eps = Scalar(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.zeros_like()), v_(net.zeros_like()) {}

  void step(Net& net, const typename Net::Params& grads) {
    ++t_;
    const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(static_cast<double>(beta1_), t_));
    const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(static_cast<double>(beta2_), t_));
    auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      apply(layers[l].weight, m_[l].weight, v_[l].weight, grads[l].weight, c1, c2);
      apply(layers[l].bias, m_[l].bias, v_[l].bias, grads[l].bias, c1, c2);
    }
  }

  long steps() const { return t_; }
  Scalar learning_rate() const { return lr_; }

 private:
  template <typename P, typename G>
  void apply(P& param, P& m, P& v, const G& g, Scalar c1, Scalar c2) {
    m = beta1_ * m + (Scalar(1) - beta1_) * g;
    v = beta2_ * v + (Scalar(1) - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  Scalar lr_ = Scalar(3e-4);
  Scalar beta1_ = Scalar(0.9);
  Scalar beta2_ = Scalar(0.999);
  Scalar eps_ = Scalar(1e-8);
  long t_ = 0;
  typename Net::Params m_, v_;
};

}  // namespace pursuit
