#ifndef PASFORGE_NN_GRAD_CHECK_H_
#define PASFORGE_NN_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pasforge/nn/parameter.h"

namespace pasforge::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  double tolerance = 0.0;
  bool passed = true;

  std::string Summary() const {
    std::ostringstream out;
    out << (passed ? "pass" : "FAIL") << " max_rel_error=" << max_rel_error
        << " tolerance=" << tolerance << " checked=" << checked;
    if (!worst_param.empty()) {
      out << " worst=" << worst_param << "[" << worst_index << "] analytic=" << worst_analytic
          << " numeric=" << worst_numeric;
    }
    return out.str();
  }
};

inline constexpr double kGradCheckStep = 1e-5;
// Denominator floor of the relative error, so entries whose true gradient is
// zero are compared on an absolute scale.
inline constexpr double kGradCheckFloor = 1e-5;

inline double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(std::abs(analytic) + std::abs(numeric), kGradCheckFloor);
}

// Compares analytic gradients with central differences.
//   loss():            forward pass only, returns the scalar loss
//   compute_grads():   zeroes gradients, then forward + backward
// `max_per_param` > 0 checks an evenly strided subset of each parameter.
template <typename T>
GradCheckReport GradientCheck(std::span<Parameter<T>* const> params,
                              const std::function<T()>& loss,
                              const std::function<void()>& compute_grads, double tolerance,
                              double step = kGradCheckStep, Eigen::Index max_per_param = 0) {
  GradCheckReport report;
  report.tolerance = tolerance;
  compute_grads();
  std::vector<Matrix<T>> analytic;
  analytic.reserve(params.size());
  for (Parameter<T>* p : params) analytic.push_back(p->grad);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter<T>* p = params[k];
    const Eigen::Index n = p->value.size();
    Eigen::Index stride = 1;
    if (max_per_param > 0 && n > max_per_param) stride = (n + max_per_param - 1) / max_per_param;
    for (Eigen::Index i = 0; i < n; i += stride) {
      T& v = p->value.data()[i];
      const T saved = v;
      v = saved + T(step);
      const double up = static_cast<double>(loss());
      v = saved - T(step);
      const double down = static_cast<double>(loss());
      v = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = static_cast<double>(analytic[k].data()[i]);
      const double err = RelativeError(a, numeric);
      ++report.checked;
      if (err > report.max_rel_error || report.worst_param.empty()) {
        report.max_rel_error = err;
        report.worst_param = p->name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace pasforge::nn

#endif  // PASFORGE_NN_GRAD_CHECK_H_
