#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ghzcs/mitigate.hpp"
#include "ghzcs/recover.hpp"
#include "ghzcs/simulate.hpp"

namespace ghzcs {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BootstrapIntervals {
  Interval population;
  Interval coherence;
  Interval theta;
  Interval f_standard;
  Interval f_rotated;
  int resamples = 0;
};

// What was applied between raw counts and the reported numbers.
struct MitigationInfo {
  bool rem = false;
  bool dd = false;
  double p01 = 0.0;
  double p10 = 0.0;
  double population_raw = 0.0;
  double coherence_raw = 0.0;
};

struct FidelityReport {
  double population = 0.0;
  double coherence = 0.0;
  double theta = 0.0;
  double f_standard = 0.0;          // (P + C cos(theta)) / 2, unclamped
  double f_rotated = 0.0;           // (P + C) / 2, unclamped
  double f_standard_clamped = 0.0;  // reported values, clipped to [0, 1]
  double f_rotated_clamped = 0.0;
  bool out_of_range = false; // shot noise pushed C or a fidelity outside range
  bool low_signal = false;
  bool gme_certified = false;
  double retained_fraction = 1.0;
  std::optional<BootstrapIntervals> ci;
  std::optional<MitigationInfo> mitigation;
};

FidelityReport estimate_fidelity(double population,
                                 const RecoveryResult& recovery);

// Strict rotated-state criterion: f_rotated > 0.5.
bool certify_gme(const FidelityReport& report);

// Recovery settings shared by the point estimate and every bootstrap rerun.
struct PipelineConfig {
  int n_max = 1;
  RecoveryConfig recovery;
  std::optional<ConfusionModel> rem; // parity/population correction, if any
};

// Percentile bootstrap (5th/95th): parities are resampled per angle from
// Binomial(shots, empirical p_even), population counts multinomially, and
// the full pipeline is rerun per resample. Deterministic per seed.
BootstrapIntervals bootstrap_ci(const std::vector<ParitySample>& samples,
                                const CountsTable& population_counts,
                                int resamples, std::uint64_t seed,
                                const PipelineConfig& pipeline);

} // namespace ghzcs
