#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ghzcs/circuit.hpp"

namespace ghzcs {

// Dense n-qubit state, amplitude index bit q = qubit q. Limited to 20 qubits.
class StateVector {
public:
  explicit StateVector(int n_qubits);

  int n_qubits() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }

  // Unitary gates only; measurement gates are the runner's job.
  void apply(const Gate& gate);
  void apply_pauli(int q, int pauli); // 1 = X, 2 = Y, 3 = Z

  std::complex<double> amplitude(std::uint64_t basis) const { return amps_[basis]; }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

  // Smallest basis index whose left-to-right cumulative probability exceeds u.
  std::uint64_t sample(double u) const;
  std::vector<double> cumulative_probabilities() const;

private:
  void apply_h(int q);
  void apply_x(int q);
  void apply_y(int q);
  void apply_z(int q);
  void apply_rz(int q, double angle);
  void apply_ry(int q, double angle);
  void apply_cnot(int control, int target);

  int n_;
  std::vector<std::complex<double>> amps_;
};

// Final pre-measurement state of the circuit; MeasureZ gates are skipped.
StateVector noiseless_statevector(const Circuit& circuit);

// max_i |a_i - e^{i gamma} b_i| with gamma chosen from the largest amplitude.
double global_phase_distance(const StateVector& a, const StateVector& b);

} // namespace ghzcs
