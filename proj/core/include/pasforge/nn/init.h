#ifndef PASFORGE_NN_INIT_H_
#define PASFORGE_NN_INIT_H_

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pasforge/nn/parameter.h"

namespace pasforge::nn {

// Random matrix with orthonormal columns (rows >= cols) or orthonormal rows
// (rows < cols), drawn as the sign-corrected Q factor of a Gaussian matrix.
template <typename T>
Matrix<T> OrthonormalInit(int rows, int cols, std::mt19937_64& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("orthonormal init needs positive dims");
  const int n = std::max(rows, cols);
  const int m = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  if (rows >= cols) return q.cast<T>();
  return q.transpose().cast<T>();
}

template <typename T>
void UniformInit(Matrix<T>& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(-limit, limit);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(uniform(rng));
  }
}

// Glorot/Xavier uniform bound.
inline double GlorotLimit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_INIT_H_
