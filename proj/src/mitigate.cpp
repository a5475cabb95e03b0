#include "ghzcs/mitigate.hpp"

#include <cmath>
#include <stdexcept>

#include "ghzcs/errors.hpp"

namespace ghzcs {

bool ConfusionModel::symmetric() const { return std::abs(p01 - p10) <= 1e-15; }

void ConfusionModel::validate() const {
  if (p01 < 0.0 || p01 >= 0.5 || p10 < 0.0 || p10 >= 0.5) {
    throw std::invalid_argument("confusion probabilities must lie in [0, 0.5)");
  }
}

double rem_population(const CountsTable& counts, const ConfusionModel& model) {
  model.validate();
  if (!counts.flag_bits.empty()) {
    throw std::invalid_argument("mitigation expects data-only counts");
  }
  const long long total = counts.total();
  if (total == 0) throw std::invalid_argument("empty counts");

  // Inverse of A = [[1-p01, p10], [p01, 1-p10]] (columns = true state).
  const double det = 1.0 - model.p01 - model.p10;
  const double inv[2][2] = {{(1.0 - model.p10) / det, -model.p10 / det},
                            {-model.p01 / det, (1.0 - model.p01) / det}};

  double corrected = 0.0;
  for (const auto& [bits, c] : counts.counts) {
    double w_zeros = 1.0;
    double w_ones = 1.0;
    for (char ch : bits) {
      const int s = ch == '1' ? 1 : 0;
      w_zeros *= inv[0][s];
      w_ones *= inv[1][s];
    }
    corrected += (w_zeros + w_ones) * static_cast<double>(c);
  }
  return corrected / static_cast<double>(total);
}

double rem_parity(double parity_raw, int n, const ConfusionModel& model) {
  model.validate();
  if (n < 1) throw std::invalid_argument("qubit count must be positive");
  if (!model.symmetric()) {
    throw std::invalid_argument(
        "parity correction requires a symmetric confusion model");
  }
  const double scale = std::pow(1.0 - 2.0 * model.p01, n);
  if (scale < 1e-6) {
    throw AmplificationOverflowError("readout-correction scale below 1e-6");
  }
  return parity_raw / scale;
}

} // namespace ghzcs
