#ifndef PASFORGE_NN_ADAM_H_
#define PASFORGE_NN_ADAM_H_

#include <cmath>
#include <span>

#include "pasforge/nn/parameter.h"

namespace pasforge::nn {

struct AdamConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update per trainable parameter; gradients are
// zeroed afterwards.
template <typename T>
void AdamStep(std::span<Parameter<T>* const> params, const AdamConfig& config) {
  const T b1 = T(config.beta1);
  const T b2 = T(config.beta2);
  for (Parameter<T>* p : params) {
    if (!p->trainable) {
      p->ZeroGrad();
      continue;
    }
    ++p->step_count;
    const double t = static_cast<double>(p->step_count);
    const T step = T(config.lr / (1.0 - std::pow(config.beta1, t)));
    const T v_correction = T(1.0 / (1.0 - std::pow(config.beta2, t)));
    const T eps = T(config.epsilon);
    p->adam_m = b1 * p->adam_m + (T(1) - b1) * p->grad;
    p->adam_v = b2 * p->adam_v + (T(1) - b2) * p->grad.cwiseAbs2();
    p->value.array() -=
        step * p->adam_m.array() / ((p->adam_v.array() * v_correction).sqrt() + eps);
    p->ZeroGrad();
  }
}

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_ADAM_H_
