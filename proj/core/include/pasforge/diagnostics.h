#ifndef PASFORGE_DIAGNOSTICS_H_
#define PASFORGE_DIAGNOSTICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pasforge/nn/grad_check.h"

namespace pasforge {

struct GradCheckCase {
  std::string name;
  nn::GradCheckReport report;
};

struct GradCheckOptions {
  bool use_double = true;
  std::uint64_t seed = 1;
  // Defaults depend on the precision: 1e-4 / 1e-5 in double, looser in float.
  double tolerance = 0.0;
  double step = 0.0;
};

// Finite-difference checks over the network pieces and small full models:
// dense+BN+ReLU stacks, softmax cross-entropy, both path encoders over paths
// of 1, 5 and 15 items, and every embedding table.
std::vector<GradCheckCase> RunGradCheckSuite(const GradCheckOptions& options);

}  // namespace pasforge

#endif  // PASFORGE_DIAGNOSTICS_H_
