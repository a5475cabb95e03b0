#pragma once

#include "ghzcs/simulate.hpp"

namespace ghzcs {

// Per-qubit readout confusion: p01 = P(read 1 | true 0), p10 = P(read 0 |
// true 1). Both below 0.5 keeps the 2x2 matrix invertible.
struct ConfusionModel {
  double p01 = 0.0;
  double p10 = 0.0;

  bool symmetric() const;
  void validate() const;
};

// Population corrected through the inverse tensored confusion matrix,
// evaluated as the two row-functionals (all-zeros and all-ones rows) against
// the sparse empirical distribution. Cost O(#distinct bitstrings * n); the
// result can leave [0, 1] under shot noise and is returned unclamped.
double rem_population(const CountsTable& counts, const ConfusionModel& model);

// parity_raw / (1 - 2p)^n, the exact correction for independent symmetric
// flips. Requires a symmetric model; scale factors below 1e-6 throw.
double rem_parity(double parity_raw, int n, const ConfusionModel& model);

} // namespace ghzcs
