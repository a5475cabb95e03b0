#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ghzcs/circuit.hpp"

namespace ghzcs {

// Depolarizing rates per gate, readout flip rate per bit, and the coherent
// phase offset injected by the fast emulator.
struct NoiseModel {
  double p_1q = 0.0;
  double p_2q = 0.0;
  double p_ro = 0.0;
  double phase_offset = 0.0; // radians, emulator only

  void validate() const;
};

// Aggregated measurement outcomes. Key position follows bit_layout: data
// qubits first (ascending), then flags (ascending); the leftmost character
// of a key is the first layout entry.
struct CountsTable {
  int n_bits = 0;
  std::vector<int> data_bits;
  std::vector<int> flag_bits;
  std::map<std::string, long long> counts;

  long long total() const;
  bool operator==(const CountsTable&) const = default;
};

// One compressed-sensing measurement record: estimated <P(phi)> at one angle.
struct ParitySample {
  double phi = 0.0;
  double parity = 0.0; // in [-1, 1]
  long long shots = 0;
};

struct PostselectionResult {
  CountsTable counts;        // flag bits stripped
  double retained_fraction = 1.0;
};

// Monte-Carlo Pauli-trajectory sampling of the exact statevector. After each
// unitary gate a uniformly random non-identity Pauli is applied on the gate's
// qubits with probability p_1q / p_2q (3 resp. 15 equiprobable choices);
// measurement outcomes are Born samples with independent readout flips.
// Per-shot substreams of `seed` make the result deterministic and
// independent of shot-level parallelism.
CountsTable run_statevector_trajectories(const Circuit& circuit,
                                         const NoiseModel& noise,
                                         long long shots, std::uint64_t seed);

// (1 - p_2q)^n_cx * (1 - p_1q)^n_1q, the analytic coherence decay.
double expected_coherence(const GateCounts& counts, const NoiseModel& noise);

// Fast analytic emulator: draws n_even ~ Binomial(shots, (1 + C_exp *
// cos(n*phi + theta)) / 2) per angle and returns the sampled parities.
// Flags are not modeled here.
std::vector<ParitySample> emulate_fast_parity(int n, const GateCounts& counts,
                                              const NoiseModel& noise,
                                              const std::vector<double>& phis,
                                              long long shots,
                                              std::uint64_t seed);

// Keeps shots whose flag bits all read 0 and strips the flag bits.
PostselectionResult postselect_flags(const CountsTable& counts);

// Mean of (-1)^popcount over data-only counts, with the total shot count.
std::pair<double, long long>
parity_expectation_from_counts(const CountsTable& counts);

// (count(0...0) + count(1...1)) / total over data-only counts.
double population_from_counts(const CountsTable& counts);

} // namespace ghzcs
