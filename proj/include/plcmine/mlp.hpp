#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "plcmine/errors.hpp"
#include "plcmine/rng.hpp"

namespace plcmine {

/// Column-wise softmax; every column of the result sums to one.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_columns(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      (logits.rowwise() - logits.colwise().maxCoeff()).array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

/// Mean cross-entropy of column-wise probabilities against integer labels.
template <typename Derived>
typename Derived::Scalar cross_entropy(const Eigen::MatrixBase<Derived>& probs,
                                       std::span<const int> labels) {
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  for (Eigen::Index j = 0; j < probs.cols(); ++j)
    total -= std::log(std::max(probs(labels[static_cast<std::size_t>(j)], j), Scalar(1e-300)));
  return total / static_cast<Scalar>(probs.cols());
}

/// Fully connected classifier: tanh hidden layers, softmax output. Samples
/// are columns.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  Mlp() = default;

  /// Glorot-uniform weights, zero biases.
  Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw DataError("a network needs at least input and output layers");
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int in = sizes_[l], out = sizes_[l + 1];
      if (in <= 0 || out <= 0) throw DataError("layer sizes must be positive");
      const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
      Matrix w(out, in);
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r)
          w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(out));
    }
  }

  Mlp(std::vector<Matrix> weights, std::vector<Vector> biases)
      : weights_(std::move(weights)), biases_(std::move(biases)) {
    if (weights_.empty() || weights_.size() != biases_.size())
      throw DataError("weights and biases disagree on the number of layers");
    sizes_.push_back(static_cast<int>(weights_.front().cols()));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (weights_[l].cols() != sizes_.back() || biases_[l].size() != weights_[l].rows())
        throw DataError("layer " + std::to_string(l) + " dimensions are incompatible");
      sizes_.push_back(static_cast<int>(weights_[l].rows()));
    }
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }

  Matrix logits(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (weights_[l] * a).colwise() + biases_[l];
      a = l + 1 < weights_.size() ? Matrix(z.array().tanh().matrix()) : std::move(z);
    }
    return a;
  }

  Matrix predict(const Matrix& x) const { return softmax_columns(logits(x)); }

  /// Mean cross-entropy over the batch and its gradient by backpropagation.
  Scalar loss_and_gradient(const Matrix& x, std::span<const int> labels, Gradients& g) const {
    check_input(x);
    if (static_cast<Eigen::Index>(labels.size()) != x.cols())
      throw DataError("label count does not match the batch");
    std::vector<Matrix> act{x};
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (weights_[l] * act.back()).colwise() + biases_[l];
      act.push_back(l + 1 < weights_.size() ? Matrix(z.array().tanh().matrix()) : std::move(z));
    }
    const Matrix probs = softmax_columns(act.back());
    const Scalar loss = cross_entropy(probs, labels);

    const auto n = static_cast<Scalar>(x.cols());
    Matrix delta = probs;
    for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(labels[static_cast<std::size_t>(j)], j) -= Scalar(1);
    delta /= n;

    g.weights.resize(weights_.size());
    g.biases.resize(biases_.size());
    for (std::size_t l = weights_.size(); l-- > 0;) {
      g.weights[l] = delta * act[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weights_[l].transpose() * delta;
        delta = (back.array() * (Scalar(1) - act[l].array().square())).matrix();
      }
    }
    return loss;
  }

  Scalar loss(const Matrix& x, std::span<const int> labels) const {
    return cross_entropy(predict(x), labels);
  }

  void apply(const Gradients& g, Scalar learning_rate) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      weights_[l].noalias() -= learning_rate * g.weights[l];
      biases_[l].noalias() -= learning_rate * g.biases[l];
    }
  }

 private:
  void check_input(const Matrix& x) const {
    if (weights_.empty()) throw DataError("network has no layers");
    if (x.rows() != sizes_.front())
      throw DataError("input has " + std::to_string(x.rows()) + " features, network expects " +
                      std::to_string(sizes_.front()));
  }

  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

}  // namespace plcmine
