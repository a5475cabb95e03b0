#include "ghzcs/simulate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ghzcs/errors.hpp"
#include "ghzcs/rng.hpp"
#include "ghzcs/statevector.hpp"

namespace ghzcs {

namespace {

struct PauliInsertion {
  int gate_index;
  int qubit;
  int pauli; // 1 = X, 2 = Y, 3 = Z
};

// Draws the per-shot noise plan without touching the state. The draw order
// matches the evolution order exactly, so the no-error fast path consumes
// the stream identically to a full evolution.
std::vector<PauliInsertion> draw_noise_plan(const Circuit& circuit,
                                            const NoiseModel& noise,
                                            std::mt19937_64& rng) {
  std::vector<PauliInsertion> plan;
  for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
    const Gate& g = circuit.gates[gi];
    if (g.kind == GateKind::MeasureZ) continue;
    if (g.kind == GateKind::Cnot) {
      if (noise.p_2q <= 0.0) continue;
      if (canonical(rng) < noise.p_2q) {
        // 15 non-identity two-qubit Paulis, code 1..15 -> (code/4, code%4).
        const int code = 1 + static_cast<int>(canonical(rng) * 15.0);
        const int pc = code / 4;
        const int pt = code % 4;
        if (pc != 0) plan.push_back({static_cast<int>(gi), g.qubits[0], pc});
        if (pt != 0) plan.push_back({static_cast<int>(gi), g.qubits[1], pt});
      }
    } else {
      if (noise.p_1q <= 0.0) continue;
      if (canonical(rng) < noise.p_1q) {
        const int pauli = 1 + static_cast<int>(canonical(rng) * 3.0);
        plan.push_back({static_cast<int>(gi), g.qubits[0], pauli});
      }
    }
  }
  return plan;
}

StateVector evolve(const Circuit& circuit,
                   const std::vector<PauliInsertion>& plan) {
  StateVector sv(circuit.total_qubits());
  std::size_t next = 0;
  for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
    const Gate& g = circuit.gates[gi];
    if (g.kind != GateKind::MeasureZ) sv.apply(g);
    while (next < plan.size() &&
           plan[next].gate_index == static_cast<int>(gi)) {
      sv.apply_pauli(plan[next].qubit, plan[next].pauli);
      ++next;
    }
  }
  return sv;
}

// First index whose cumulative probability exceeds u; same accumulation
// order as StateVector::sample, so both paths agree bit for bit.
std::uint64_t sample_from_cumulative(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return cum.size() - 1;
  return static_cast<std::uint64_t>(it - cum.begin());
}

} // namespace

void NoiseModel::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_1q) || !prob(p_2q) || !prob(p_ro)) {
    throw std::invalid_argument("noise probabilities must lie in [0, 1]");
  }
  if (phase_offset <= -std::numbers::pi || phase_offset > std::numbers::pi) {
    throw std::invalid_argument("phase offset must lie in (-pi, pi]");
  }
}

long long CountsTable::total() const {
  long long t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

CountsTable run_statevector_trajectories(const Circuit& circuit,
                                         const NoiseModel& noise,
                                         long long shots, std::uint64_t seed) {
  circuit.validate();
  noise.validate();
  if (shots < 1) throw std::invalid_argument("need at least one shot");
  if (circuit.total_qubits() > 20) {
    throw ResourceLimitError("trajectory backend limited to 20 qubits");
  }

  CountsTable table;
  for (const Gate& g : circuit.gates) {
    if (g.kind != GateKind::MeasureZ) continue;
    if (g.qubits[0] < circuit.n_data) {
      table.data_bits.push_back(g.qubits[0]);
    } else {
      table.flag_bits.push_back(g.qubits[0]);
    }
  }
  std::sort(table.data_bits.begin(), table.data_bits.end());
  std::sort(table.flag_bits.begin(), table.flag_bits.end());
  table.n_bits =
      static_cast<int>(table.data_bits.size() + table.flag_bits.size());
  if (table.n_bits == 0) {
    throw std::invalid_argument("circuit has no measurements");
  }
  std::vector<int> layout = table.data_bits;
  layout.insert(layout.end(), table.flag_bits.begin(), table.flag_bits.end());

  // All circuits built here measure only at the end, so a shot is one joint
  // Born sample of the final state. The no-error state is shared by every
  // shot whose noise plan comes out empty.
  const StateVector clean = evolve(circuit, {});
  const std::vector<double> clean_cum = clean.cumulative_probabilities();

  std::string key(static_cast<std::size_t>(table.n_bits), '0');
  for (long long shot = 0; shot < shots; ++shot) {
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(shot));
    const auto plan = draw_noise_plan(circuit, noise, rng);
    std::uint64_t basis;
    if (plan.empty()) {
      basis = sample_from_cumulative(clean_cum, canonical(rng));
    } else {
      basis = evolve(circuit, plan).sample(canonical(rng));
    }
    for (std::size_t pos = 0; pos < layout.size(); ++pos) {
      bool bit = (basis >> layout[pos]) & 1;
      if (noise.p_ro > 0.0 && canonical(rng) < noise.p_ro) bit = !bit;
      key[pos] = bit ? '1' : '0';
    }
    table.counts[key] += 1;
  }
  return table;
}

double expected_coherence(const GateCounts& counts, const NoiseModel& noise) {
  return std::pow(1.0 - noise.p_2q, static_cast<double>(counts.n_cx)) *
         std::pow(1.0 - noise.p_1q, static_cast<double>(counts.n_1q));
}

std::vector<ParitySample> emulate_fast_parity(int n, const GateCounts& counts,
                                              const NoiseModel& noise,
                                              const std::vector<double>& phis,
                                              long long shots,
                                              std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need at least 2 qubits");
  if (shots < 1) throw std::invalid_argument("need at least one shot");
  noise.validate();

  const double c_exp = expected_coherence(counts, noise);
  std::vector<ParitySample> samples;
  samples.reserve(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double phi = phis[i];
    double p_even =
        0.5 * (1.0 + c_exp * std::cos(n * phi + noise.phase_offset));
    assert(p_even >= -1e-12 && p_even <= 1.0 + 1e-12);
    p_even = std::clamp(p_even, 0.0, 1.0);
    std::mt19937_64 rng = substream(seed, i);
    std::binomial_distribution<long long> binom(shots, p_even);
    const long long n_even = binom(rng);
    samples.push_back(
        {phi, static_cast<double>(2 * n_even - shots) / shots, shots});
  }
  return samples;
}

PostselectionResult postselect_flags(const CountsTable& counts) {
  PostselectionResult result;
  result.counts.n_bits = static_cast<int>(counts.data_bits.size());
  result.counts.data_bits = counts.data_bits;

  if (counts.flag_bits.empty()) {
    result.counts = counts;
    return result;
  }

  const std::size_t n_data_bits = counts.data_bits.size();
  long long kept = 0;
  const long long total = counts.total();
  for (const auto& [bits, c] : counts.counts) {
    const bool clean = std::all_of(bits.begin() + n_data_bits, bits.end(),
                                   [](char ch) { return ch == '0'; });
    if (clean) {
      result.counts.counts[bits.substr(0, n_data_bits)] += c;
      kept += c;
    }
  }
  if (kept == 0) {
    throw EmptyPostselectionError("all shots were flagged");
  }
  result.retained_fraction = static_cast<double>(kept) / total;
  return result;
}

std::pair<double, long long>
parity_expectation_from_counts(const CountsTable& counts) {
  if (!counts.flag_bits.empty()) {
    throw std::invalid_argument("parity expects data-only counts");
  }
  const long long total = counts.total();
  if (total == 0) throw std::invalid_argument("empty counts");
  long long sum = 0;
  for (const auto& [bits, c] : counts.counts) {
    const auto ones = std::count(bits.begin(), bits.end(), '1');
    sum += (ones % 2 == 0) ? c : -c;
  }
  return {static_cast<double>(sum) / total, total};
}

double population_from_counts(const CountsTable& counts) {
  if (!counts.flag_bits.empty()) {
    throw std::invalid_argument("population expects data-only counts");
  }
  const long long total = counts.total();
  if (total == 0) throw std::invalid_argument("empty counts");
  const std::string zeros(counts.n_bits, '0');
  const std::string ones(counts.n_bits, '1');
  long long hit = 0;
  if (auto it = counts.counts.find(zeros); it != counts.counts.end()) {
    hit += it->second;
  }
  if (auto it = counts.counts.find(ones); it != counts.counts.end()) {
    hit += it->second;
  }
  return static_cast<double>(hit) / total;
}

} // namespace ghzcs
