#ifndef PASFORGE_NN_GRU_H_
#define PASFORGE_NN_GRU_H_

#include <random>
#include <string>
#include <vector>

#include "pasforge/errors.h"
#include "pasforge/nn/init.h"
#include "pasforge/nn/parameter.h"

namespace pasforge::nn {

// Activations recorded by a forward pass; consumed by Backward.
template <typename T>
struct GruTrace {
  Matrix<T> x;   // input_dim x steps
  Matrix<T> h;   // hidden x (steps + 1); column 0 is the initial state
  Matrix<T> z;   // update gate
  Matrix<T> r;   // reset gate
  Matrix<T> hc;  // candidate state
};

// Gated recurrent unit:
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   hc = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * hc + z * h
template <typename T>
class Gru {
 public:
  Gru() = default;
  Gru(const std::string& name, int input_dim, int hidden_dim)
      : wz(name + ".Wz", hidden_dim, input_dim),
        wr(name + ".Wr", hidden_dim, input_dim),
        wh(name + ".Wh", hidden_dim, input_dim),
        uz(name + ".Uz", hidden_dim, hidden_dim),
        ur(name + ".Ur", hidden_dim, hidden_dim),
        uh(name + ".Uh", hidden_dim, hidden_dim),
        bz(name + ".bz", hidden_dim, 1),
        br(name + ".br", hidden_dim, 1),
        bh(name + ".bh", hidden_dim, 1) {}

  int input_dim() const { return static_cast<int>(wz.value.cols()); }
  int hidden_dim() const { return static_cast<int>(wz.value.rows()); }

  // Every weight matrix starts orthonormal; biases start at zero.
  void InitOrthonormal(std::mt19937_64& rng) {
    for (Parameter<T>* p : {&wz, &wr, &wh, &uz, &ur, &uh}) {
      p->value = OrthonormalInit<T>(static_cast<int>(p->value.rows()),
                                    static_cast<int>(p->value.cols()), rng);
    }
    for (Parameter<T>* p : {&bz, &br, &bh}) p->value.setZero();
  }

  std::vector<Parameter<T>*> Parameters() { return {&wz, &wr, &wh, &uz, &ur, &uh, &bz, &br, &bh}; }

  // Runs the recurrence over the columns of `x` and returns the final state.
  Vector<T> Forward(const Matrix<T>& x, GruTrace<T>* trace = nullptr,
                    const Vector<T>* h0 = nullptr) const {
    const int hidden = hidden_dim();
    const Eigen::Index steps = x.cols();
    if (steps < 1) throw ShapeError("GRU input sequence must have at least one step");
    if (x.rows() != input_dim()) {
      throw ShapeError("GRU expected input width " + std::to_string(input_dim()) + ", got " +
                       std::to_string(x.rows()));
    }
    if (h0 && h0->size() != hidden) throw ShapeError("GRU initial state width mismatch");

    Matrix<T> xz = wz.value * x;
    Matrix<T> xr = wr.value * x;
    Matrix<T> xh = wh.value * x;
    xz.colwise() += bz.value.col(0);
    xr.colwise() += br.value.col(0);
    xh.colwise() += bh.value.col(0);

    Matrix<T> hs(hidden, steps + 1);
    Matrix<T> zs(hidden, steps), rs(hidden, steps), hcs(hidden, steps);
    if (h0) {
      hs.col(0) = *h0;
    } else {
      hs.col(0).setZero();
    }
    Vector<T> tmp(hidden);
    for (Eigen::Index t = 0; t < steps; ++t) {
      auto h = hs.col(t);
      tmp.noalias() = uz.value * h;
      zs.col(t) = Sigmoid(xz.col(t) + tmp);
      tmp.noalias() = ur.value * h;
      rs.col(t) = Sigmoid(xr.col(t) + tmp);
      Vector<T> rh = rs.col(t).cwiseProduct(h);
      tmp.noalias() = uh.value * rh;
      hcs.col(t) = (xh.col(t) + tmp).array().tanh();
      hs.col(t + 1) = (T(1) - zs.col(t).array()) * hcs.col(t).array() +
                      zs.col(t).array() * h.array();
    }
    Vector<T> last = hs.col(steps);
    if (trace) {
      trace->x = x;
      trace->h = std::move(hs);
      trace->z = std::move(zs);
      trace->r = std::move(rs);
      trace->hc = std::move(hcs);
    }
    return last;
  }

  // Backpropagation through the whole sequence. Accumulates parameter
  // gradients and returns d loss / d x. `dh0`, when given, receives the
  // gradient of the initial state.
  Matrix<T> Backward(const GruTrace<T>& trace, const Vector<T>& dh_last,
                     Vector<T>* dh0 = nullptr) {
    const int hidden = hidden_dim();
    const Eigen::Index steps = trace.x.cols();
    Matrix<T> daz(hidden, steps), dar(hidden, steps), dah(hidden, steps);
    Vector<T> dh = dh_last;
    for (Eigen::Index t = steps - 1; t >= 0; --t) {
      auto h_prev = trace.h.col(t);
      auto z = trace.z.col(t);
      auto r = trace.r.col(t);
      auto hc = trace.hc.col(t);
      Vector<T> dhc = dh.cwiseProduct((T(1) - z.array()).matrix());
      Vector<T> dz = dh.cwiseProduct(h_prev - hc);
      Vector<T> dh_prev = dh.cwiseProduct(z);
      dah.col(t) = dhc.array() * (T(1) - hc.array().square());
      Vector<T> drh = uh.value.transpose() * dah.col(t);
      Vector<T> dr = drh.cwiseProduct(h_prev);
      dh_prev += drh.cwiseProduct(r);
      daz.col(t) = dz.array() * z.array() * (T(1) - z.array());
      dar.col(t) = dr.array() * r.array() * (T(1) - r.array());
      dh_prev.noalias() += uz.value.transpose() * daz.col(t);
      dh_prev.noalias() += ur.value.transpose() * dar.col(t);
      dh = std::move(dh_prev);
    }
    if (dh0) *dh0 = dh;

    auto h_prev_all = trace.h.leftCols(steps);
    Matrix<T> rh_all = trace.r.cwiseProduct(h_prev_all);
    wz.grad.noalias() += daz * trace.x.transpose();
    wr.grad.noalias() += dar * trace.x.transpose();
    wh.grad.noalias() += dah * trace.x.transpose();
    uz.grad.noalias() += daz * h_prev_all.transpose();
    ur.grad.noalias() += dar * h_prev_all.transpose();
    uh.grad.noalias() += dah * rh_all.transpose();
    bz.grad.col(0) += daz.rowwise().sum();
    br.grad.col(0) += dar.rowwise().sum();
    bh.grad.col(0) += dah.rowwise().sum();

    Matrix<T> dx(input_dim(), steps);
    dx.noalias() = wz.value.transpose() * daz;
    dx.noalias() += wr.value.transpose() * dar;
    dx.noalias() += wh.value.transpose() * dah;
    return dx;
  }

  Parameter<T> wz, wr, wh;
  Parameter<T> uz, ur, uh;
  Parameter<T> bz, br, bh;

 private:
  template <typename Derived>
  static Vector<T> Sigmoid(const Eigen::MatrixBase<Derived>& a) {
    return (T(1) / (T(1) + (-a.array()).exp())).matrix();
  }
};

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_GRU_H_
