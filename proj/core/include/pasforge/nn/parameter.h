#ifndef PASFORGE_NN_PARAMETER_H_
#define PASFORGE_NN_PARAMETER_H_

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>

namespace pasforge::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class Mode { kTrain, kInfer };

// A trainable tensor with its gradient and Adam moments.
template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> adam_m;
  Matrix<T> adam_v;
  std::int64_t step_count = 0;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Matrix<T>::Zero(rows, cols)),
        grad(Matrix<T>::Zero(rows, cols)),
        adam_m(Matrix<T>::Zero(rows, cols)),
        adam_v(Matrix<T>::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_PARAMETER_H_
