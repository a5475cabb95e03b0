#include "ghzcs/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ghzcs/rng.hpp"

namespace ghzcs {

namespace {

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

Interval percentile_interval(const std::vector<double>& values) {
  return {quantile(values, 0.05), quantile(values, 0.95)};
}

CountsTable resample_counts(const CountsTable& counts, std::mt19937_64& rng) {
  CountsTable out;
  out.n_bits = counts.n_bits;
  out.data_bits = counts.data_bits;
  out.flag_bits = counts.flag_bits;
  // Multinomial draw via sequential conditional binomials in key order.
  long long remaining = counts.total();
  long long mass_left = remaining;
  for (const auto& [bits, c] : counts.counts) {
    if (remaining == 0) break;
    long long drawn;
    if (c >= mass_left) {
      drawn = remaining;
    } else {
      const double p = static_cast<double>(c) / static_cast<double>(mass_left);
      std::binomial_distribution<long long> binom(remaining, p);
      drawn = binom(rng);
    }
    if (drawn > 0) out.counts[bits] = drawn;
    remaining -= drawn;
    mass_left -= c;
  }
  return out;
}

} // namespace

FidelityReport estimate_fidelity(double population,
                                 const RecoveryResult& recovery) {
  if (population < 0.0 || population > 1.0) {
    throw std::invalid_argument("population must lie in [0, 1]");
  }
  if (recovery.coherence < 0.0) {
    throw std::invalid_argument("coherence must be nonnegative");
  }
  FidelityReport report;
  report.population = population;
  report.coherence = recovery.coherence;
  report.theta = recovery.theta;
  report.f_rotated = 0.5 * (population + recovery.coherence);
  report.f_standard =
      0.5 * (population + recovery.coherence * std::cos(recovery.theta));
  report.f_standard_clamped = std::clamp(report.f_standard, 0.0, 1.0);
  report.f_rotated_clamped = std::clamp(report.f_rotated, 0.0, 1.0);
  report.out_of_range = recovery.coherence > 1.0 ||
                        report.f_rotated != report.f_rotated_clamped ||
                        report.f_standard != report.f_standard_clamped;
  report.low_signal = recovery.low_signal;
  report.gme_certified = certify_gme(report) && !recovery.low_signal;
  return report;
}

bool certify_gme(const FidelityReport& report) {
  return report.f_rotated > 0.5;
}

BootstrapIntervals bootstrap_ci(const std::vector<ParitySample>& samples,
                                const CountsTable& population_counts,
                                int resamples, std::uint64_t seed,
                                const PipelineConfig& pipeline) {
  if (resamples < 100) {
    throw std::invalid_argument("need at least 100 bootstrap resamples");
  }
  std::vector<double> phis;
  phis.reserve(samples.size());
  for (const ParitySample& s : samples) phis.push_back(s.phi);

  std::vector<double> pops, cohs, thetas, f_stds, f_rots;
  pops.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(r));

    std::vector<ParitySample> resampled;
    resampled.reserve(samples.size());
    for (const ParitySample& s : samples) {
      const double p_even = std::clamp(0.5 * (1.0 + s.parity), 0.0, 1.0);
      std::binomial_distribution<long long> binom(s.shots, p_even);
      const long long n_even = binom(rng);
      resampled.push_back(
          {s.phi, static_cast<double>(2 * n_even - s.shots) / s.shots,
           s.shots});
    }
    const CountsTable counts = resample_counts(population_counts, rng);

    double population = population_from_counts(counts);
    if (pipeline.rem) {
      population = rem_population(counts, *pipeline.rem);
      const int n = counts.n_bits;
      for (ParitySample& s : resampled) {
        s.parity = rem_parity(s.parity, n, *pipeline.rem);
      }
    }
    const RecoveryResult rec = recover_coherence(phis, resampled,
                                                 pipeline.n_max,
                                                 pipeline.recovery);
    const FidelityReport rep =
        estimate_fidelity(std::clamp(population, 0.0, 1.0), rec);
    pops.push_back(population);
    cohs.push_back(rec.coherence);
    thetas.push_back(rec.theta);
    f_stds.push_back(rep.f_standard);
    f_rots.push_back(rep.f_rotated);
  }

  BootstrapIntervals ci;
  ci.population = percentile_interval(pops);
  ci.coherence = percentile_interval(cohs);
  ci.theta = percentile_interval(thetas);
  ci.f_standard = percentile_interval(f_stds);
  ci.f_rotated = percentile_interval(f_rots);
  ci.resamples = resamples;
  return ci;
}

} // namespace ghzcs
