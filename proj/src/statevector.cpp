#include "ghzcs/statevector.hpp"

#include <cmath>
#include <stdexcept>

#include "ghzcs/errors.hpp"

namespace ghzcs {

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  if (n_qubits > 20) {
    throw ResourceLimitError("statevector backend limited to 20 qubits");
  }
  amps_.assign(std::uint64_t{1} << n_, {0.0, 0.0});
  amps_[0] = {1.0, 0.0};
}

void StateVector::apply(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::H: apply_h(gate.qubits[0]); return;
    case GateKind::X: apply_x(gate.qubits[0]); return;
    case GateKind::Rz: apply_rz(gate.qubits[0], gate.angle); return;
    case GateKind::Ry: apply_ry(gate.qubits[0], gate.angle); return;
    case GateKind::Cnot: apply_cnot(gate.qubits[0], gate.qubits[1]); return;
    case GateKind::MeasureZ:
      throw std::invalid_argument("measurement is not a unitary gate");
  }
}

void StateVector::apply_pauli(int q, int pauli) {
  switch (pauli) {
    case 1: apply_x(q); return;
    case 2: apply_y(q); return;
    case 3: apply_z(q); return;
    default: throw std::invalid_argument("pauli code must be 1, 2 or 3");
  }
}

void StateVector::apply_h(int q) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (i & mask) continue;
    const std::uint64_t j = i | mask;
    const auto a = amps_[i];
    const auto b = amps_[j];
    amps_[i] = (a + b) * inv_sqrt2;
    amps_[j] = (a - b) * inv_sqrt2;
  }
}

void StateVector::apply_x(int q) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (i & mask) continue;
    std::swap(amps_[i], amps_[i | mask]);
  }
}

void StateVector::apply_y(int q) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  const std::complex<double> im{0.0, 1.0};
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (i & mask) continue;
    const std::uint64_t j = i | mask;
    const auto a = amps_[i];
    const auto b = amps_[j];
    amps_[i] = -im * b;
    amps_[j] = im * a;
  }
}

void StateVector::apply_z(int q) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (i & mask) amps_[i] = -amps_[i];
  }
}

void StateVector::apply_rz(int q, double angle) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  const std::complex<double> lo = std::polar(1.0, -angle / 2.0);
  const std::complex<double> hi = std::polar(1.0, angle / 2.0);
  for (std::uint64_t i = 0; i < size(); ++i) {
    amps_[i] *= (i & mask) ? hi : lo;
  }
}

void StateVector::apply_ry(int q, double angle) {
  const std::uint64_t mask = std::uint64_t{1} << q;
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  for (std::uint64_t i = 0; i < size(); ++i) {
    if (i & mask) continue;
    const std::uint64_t j = i | mask;
    const auto a = amps_[i];
    const auto b = amps_[j];
    amps_[i] = c * a - s * b;
    amps_[j] = s * a + c * b;
  }
}

void StateVector::apply_cnot(int control, int target) {
  const std::uint64_t cmask = std::uint64_t{1} << control;
  const std::uint64_t tmask = std::uint64_t{1} << target;
  for (std::uint64_t i = 0; i < size(); ++i) {
    if ((i & cmask) && !(i & tmask)) {
      std::swap(amps_[i], amps_[i | tmask]);
    }
  }
}

std::uint64_t StateVector::sample(double u) const {
  double acc = 0.0;
  for (std::uint64_t i = 0; i < size(); ++i) {
    acc += std::norm(amps_[i]);
    if (u < acc) return i;
  }
  return size() - 1; // u beyond the accumulated total (rounding)
}

std::vector<double> StateVector::cumulative_probabilities() const {
  std::vector<double> cum(size());
  double acc = 0.0;
  for (std::uint64_t i = 0; i < size(); ++i) {
    acc += std::norm(amps_[i]);
    cum[i] = acc;
  }
  return cum;
}

StateVector noiseless_statevector(const Circuit& circuit) {
  StateVector sv(circuit.total_qubits());
  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::MeasureZ) continue;
    sv.apply(g);
  }
  return sv;
}

double global_phase_distance(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("states have different qubit counts");
  }
  // Phase reference from the largest amplitude of a.
  std::uint64_t ref = 0;
  double best = -1.0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    const double w = std::norm(a.amplitude(i));
    if (w > best) {
      best = w;
      ref = i;
    }
  }
  std::complex<double> phase{1.0, 0.0};
  const auto bref = b.amplitude(ref);
  if (std::abs(bref) > 0.0) {
    phase = a.amplitude(ref) / bref;
    phase /= std::abs(phase);
  }
  double dist = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    dist = std::max(dist, std::abs(a.amplitude(i) - phase * b.amplitude(i)));
  }
  return dist;
}

} // namespace ghzcs
