#ifndef PASFORGE_NN_LAYERS_H_
#define PASFORGE_NN_LAYERS_H_

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pasforge/errors.h"
#include "pasforge/nn/init.h"
#include "pasforge/nn/parameter.h"

// Activations are column-per-example: a batch of B vectors of width d is a
// d x B matrix.
namespace pasforge::nn {

using SparseBatch = std::span<const std::vector<int>* const>;

// Affine layer y = W x + b. The input may be split into a dense block and a
// sparse 0/1 block; column `dense_in + k` of W is the weight of sparse id k.
template <typename T>
class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, int dense_in, int out, int sparse_in = 0)
      : weight(name + ".W", out, dense_in + sparse_in),
        bias(name + ".b", out, 1),
        dense_in_(dense_in),
        sparse_in_(sparse_in) {}

  int dense_in() const { return dense_in_; }
  int sparse_in() const { return sparse_in_; }
  int out_dim() const { return static_cast<int>(weight.value.rows()); }

  void InitGlorot(std::mt19937_64& rng) {
    UniformInit(weight.value, GlorotLimit(weight.value.cols(), weight.value.rows()), rng);
    bias.value.setZero();
  }

  Matrix<T> Forward(const Matrix<T>& x, SparseBatch sparse = {}) const {
    const Eigen::Index batch = BatchSize(x, sparse);
    Matrix<T> y(out_dim(), batch);
    if (dense_in_ > 0) {
      y.noalias() = weight.value.leftCols(dense_in_) * x;
    } else {
      y.setZero();
    }
    y.colwise() += bias.value.col(0);
    if (sparse_in_ > 0) {
      for (Eigen::Index b = 0; b < batch; ++b) {
        for (int id : *sparse[b]) {
          CheckSparseId(id);
          y.col(b) += weight.value.col(dense_in_ + id);
        }
      }
    }
    return y;
  }

  // Accumulates dW and db; returns the gradient for the dense input block.
  Matrix<T> Backward(const Matrix<T>& x, const Matrix<T>& dy, SparseBatch sparse = {}) {
    const Eigen::Index batch = dy.cols();
    if (dense_in_ > 0) weight.grad.leftCols(dense_in_).noalias() += dy * x.transpose();
    bias.grad.col(0) += dy.rowwise().sum();
    if (sparse_in_ > 0) {
      for (Eigen::Index b = 0; b < batch; ++b) {
        for (int id : *sparse[b]) weight.grad.col(dense_in_ + id) += dy.col(b);
      }
    }
    Matrix<T> dx(dense_in_, batch);
    if (dense_in_ > 0) dx.noalias() = weight.value.leftCols(dense_in_).transpose() * dy;
    return dx;
  }

  Parameter<T> weight;
  Parameter<T> bias;

 private:
  Eigen::Index BatchSize(const Matrix<T>& x, SparseBatch sparse) const {
    if (dense_in_ > 0 && x.rows() != dense_in_) {
      throw ShapeError(weight.name + ": expected input width " + std::to_string(dense_in_) +
                       ", got " + std::to_string(x.rows()));
    }
    if (sparse_in_ > 0 && dense_in_ > 0 &&
        static_cast<Eigen::Index>(sparse.size()) != x.cols()) {
      throw ShapeError(weight.name + ": dense and sparse batch sizes differ");
    }
    return dense_in_ > 0 ? x.cols() : static_cast<Eigen::Index>(sparse.size());
  }

  void CheckSparseId(int id) const {
    if (id < 0 || id >= sparse_in_) {
      throw ShapeError(weight.name + ": sparse feature id " + std::to_string(id) +
                       " out of range " + std::to_string(sparse_in_));
    }
  }

  int dense_in_ = 0;
  int sparse_in_ = 0;
};

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

template <typename T>
struct BatchNormCache {
  Matrix<T> xhat;
  Vector<T> inv_std;
};

// Per-feature batch normalisation with learned scale and shift.
template <typename T>
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(const std::string& name, int dim)
      : gamma(name + ".gamma", dim, 1),
        beta(name + ".beta", dim, 1),
        running_mean(Matrix<T>::Zero(dim, 1)),
        running_var(Matrix<T>::Ones(dim, 1)) {
    gamma.value.setOnes();
  }

  int dim() const { return static_cast<int>(gamma.value.rows()); }

  // Normalises with batch statistics. Updates the running statistics unless
  // `update_running` is false.
  Matrix<T> ForwardTrain(const Matrix<T>& x, BatchNormCache<T>* cache,
                         bool update_running = true) {
    const Eigen::Index batch = x.cols();
    if (batch < 2) throw ShapeError("batch norm in train mode needs a batch of at least 2");
    if (x.rows() != dim()) throw ShapeError("batch norm width mismatch");
    Vector<T> mean = x.rowwise().mean();
    Matrix<T> centered = x.colwise() - mean;
    Vector<T> var = centered.array().square().rowwise().mean();
    Vector<T> inv_std = (var.array() + T(kBatchNormEpsilon)).rsqrt();
    Matrix<T> xhat = centered.array().colwise() * inv_std.array();
    Matrix<T> y = (xhat.array().colwise() * gamma.value.col(0).array()).colwise() +
                  beta.value.col(0).array();
    if (update_running) {
      const T m = T(kBatchNormMomentum);
      const T unbias = T(batch) / T(batch - 1);
      running_mean.col(0) = m * running_mean.col(0) + (T(1) - m) * mean;
      running_var.col(0) = m * running_var.col(0) + (T(1) - m) * unbias * var;
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv_std);
    }
    return y;
  }

  Matrix<T> ForwardInfer(const Matrix<T>& x) const {
    if (x.rows() != dim()) throw ShapeError("batch norm width mismatch");
    Vector<T> scale = gamma.value.col(0).array() *
                      (running_var.col(0).array() + T(kBatchNormEpsilon)).rsqrt();
    Vector<T> shift =
        beta.value.col(0).array() - running_mean.col(0).array() * scale.array();
    return (x.array().colwise() * scale.array()).colwise() + shift.array();
  }

  // Exact gradient of the train-mode graph.
  Matrix<T> Backward(const BatchNormCache<T>& cache, const Matrix<T>& dy) {
    const T batch = T(dy.cols());
    gamma.grad.col(0) += (dy.array() * cache.xhat.array()).rowwise().sum().matrix();
    beta.grad.col(0) += dy.rowwise().sum();
    Matrix<T> dxhat = dy.array().colwise() * gamma.value.col(0).array();
    Vector<T> sum_dxhat = dxhat.rowwise().sum();
    Vector<T> sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).rowwise().sum();
    Matrix<T> dx = (batch * dxhat.array()).colwise() - sum_dxhat.array();
    dx.array() -= cache.xhat.array().colwise() * sum_dxhat_xhat.array();
    dx.array().colwise() *= cache.inv_std.array() / batch;
    return dx;
  }

  Parameter<T> gamma;
  Parameter<T> beta;
  Matrix<T> running_mean;  // dim x 1
  Matrix<T> running_var;   // dim x 1
};

template <typename T>
Matrix<T> Relu(const Matrix<T>& x) {
  return x.cwiseMax(T(0));
}

// Gradient through ReLU given its output.
template <typename T>
Matrix<T> ReluBackward(const Matrix<T>& y, const Matrix<T>& dy) {
  return (y.array() > T(0)).select(dy, T(0));
}

// Inverted dropout: survivors are scaled by 1/(1-rate) so inference is the
// identity. Returns the multiplicative mask (empty in infer mode or rate 0).
template <typename T>
Matrix<T> DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate, Mode mode,
                      std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (mode == Mode::kInfer || rate == 0.0) return {};
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = T(1.0 / (1.0 - rate));
  Matrix<T> mask(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = keep(rng) ? scale : T(0);
  }
  return mask;
}

template <typename T>
Matrix<T> Dropout(const Matrix<T>& x, double rate, Mode mode, std::mt19937_64& rng) {
  Matrix<T> mask = DropoutMask<T>(x.rows(), x.cols(), rate, mode, rng);
  if (mask.size() == 0) return x;
  return x.cwiseProduct(mask);
}

// Column-wise softmax with the max-logit shift.
template <typename T>
Matrix<T> Softmax(const Matrix<T>& logits) {
  Matrix<T> p(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const T mx = logits.col(b).maxCoeff();
    p.col(b) = (logits.col(b).array() - mx).exp();
    p.col(b) /= p.col(b).sum();
  }
  return p;
}

template <typename T>
struct SoftmaxLoss {
  T loss = T(0);
  Matrix<T> probs;
};

// Mean negative log-likelihood of `labels` under softmax(logits).
template <typename T>
SoftmaxLoss<T> SoftmaxCrossEntropy(const Matrix<T>& logits, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.cols()) {
    throw ShapeError("label count does not match batch size");
  }
  SoftmaxLoss<T> out;
  out.probs.resize(logits.rows(), logits.cols());
  T total = T(0);
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const int y = labels[b];
    if (y < 0 || y >= logits.rows()) throw std::out_of_range("label out of range");
    const T mx = logits.col(b).maxCoeff();
    Vector<T> shifted = logits.col(b).array() - mx;
    const T log_z = std::log(shifted.array().exp().sum());
    out.probs.col(b) = (shifted.array() - log_z).exp();
    total -= shifted[y] - log_z;
  }
  out.loss = logits.cols() > 0 ? total / T(logits.cols()) : T(0);
  return out;
}

// d loss / d logits = (p - onehot(y)) / batch.
template <typename T>
Matrix<T> SoftmaxCrossEntropyGrad(const Matrix<T>& probs, std::span<const int> labels) {
  Matrix<T> g = probs;
  for (Eigen::Index b = 0; b < probs.cols(); ++b) g(labels[b], b) -= T(1);
  return g / T(probs.cols());
}

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_LAYERS_H_
