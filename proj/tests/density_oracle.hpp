#pragma once

// Test-only exact reference for small systems: evolves the full density
// matrix with dense matrix algebra and applies the depolarizing channels as
// exact probability-weighted Pauli averages. Deliberately shares no code
// with the production statevector path.

#include <complex>
#include <stdexcept>
#include <vector>

#include "ghzcs/circuit.hpp"
#include "ghzcs/simulate.hpp"

namespace ghzcs_test {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<cplx>>;

inline Matrix zeros(int dim) {
  return Matrix(dim, std::vector<cplx>(dim, cplx{0.0, 0.0}));
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  const int dim = static_cast<int>(a.size());
  Matrix c = zeros(dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      if (a[i][k] == cplx{0.0, 0.0}) continue;
      for (int j = 0; j < dim; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

inline Matrix dagger(const Matrix& a) {
  const int dim = static_cast<int>(a.size());
  Matrix d = zeros(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) d[i][j] = std::conj(a[j][i]);
  }
  return d;
}

// Embeds a single-qubit 2x2 matrix on qubit q of an n-qubit register.
inline Matrix embed_1q(const cplx m[2][2], int q, int n) {
  const int dim = 1 << n;
  Matrix u = zeros(dim);
  for (int i = 0; i < dim; ++i) {
    for (int bj = 0; bj < 2; ++bj) {
      const int j = (i & ~(1 << q)) | (bj << q);
      u[i][j] = m[(i >> q) & 1][bj];
    }
  }
  return u;
}

inline Matrix embed_cnot(int control, int target, int n) {
  const int dim = 1 << n;
  Matrix u = zeros(dim);
  for (int i = 0; i < dim; ++i) {
    const int j = (i >> control) & 1 ? i ^ (1 << target) : i;
    u[j][i] = 1.0;
  }
  return u;
}

inline Matrix gate_matrix(const ghzcs::Gate& gate, int n) {
  const cplx im{0.0, 1.0};
  const double s2 = 1.0 / std::sqrt(2.0);
  switch (gate.kind) {
    case ghzcs::GateKind::H: {
      const cplx m[2][2] = {{s2, s2}, {s2, -s2}};
      return embed_1q(m, gate.qubits[0], n);
    }
    case ghzcs::GateKind::X: {
      const cplx m[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
      return embed_1q(m, gate.qubits[0], n);
    }
    case ghzcs::GateKind::Rz: {
      const cplx m[2][2] = {{std::exp(-im * gate.angle / 2.0), 0.0},
                            {0.0, std::exp(im * gate.angle / 2.0)}};
      return embed_1q(m, gate.qubits[0], n);
    }
    case ghzcs::GateKind::Ry: {
      const double c = std::cos(gate.angle / 2.0);
      const double s = std::sin(gate.angle / 2.0);
      const cplx m[2][2] = {{c, -s}, {s, c}};
      return embed_1q(m, gate.qubits[0], n);
    }
    case ghzcs::GateKind::Cnot:
      return embed_cnot(gate.qubits[0], gate.qubits[1], n);
    case ghzcs::GateKind::MeasureZ:
      throw std::invalid_argument("measurement has no unitary matrix");
  }
  throw std::invalid_argument("unknown gate");
}

inline std::vector<Matrix> pauli_matrices(int q, int n) {
  const cplx im{0.0, 1.0};
  const cplx x[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
  const cplx y[2][2] = {{0.0, -im}, {im, 0.0}};
  const cplx z[2][2] = {{1.0, 0.0}, {0.0, -1.0}};
  return {embed_1q(x, q, n), embed_1q(y, q, n), embed_1q(z, q, n)};
}

class DensityOracle {
public:
  DensityOracle(int n, const ghzcs::NoiseModel& noise)
      : n_(n), noise_(noise), rho_(zeros(1 << n)) {
    if (n > 5) throw std::invalid_argument("oracle limited to 5 qubits");
    rho_[0][0] = 1.0;
  }

  void run(const ghzcs::Circuit& circuit) {
    for (const ghzcs::Gate& g : circuit.gates) {
      if (g.kind == ghzcs::GateKind::MeasureZ) continue;
      apply_unitary(gate_matrix(g, n_));
      if (g.kind == ghzcs::GateKind::Cnot) {
        depolarize_2q(g.qubits[0], g.qubits[1], noise_.p_2q);
      } else {
        depolarize_1q(g.qubits[0], noise_.p_1q);
      }
    }
  }

  double parity_expectation() const {
    double sum = 0.0;
    for (int s = 0; s < (1 << n_); ++s) {
      const int pop = __builtin_popcount(static_cast<unsigned>(s));
      sum += (pop % 2 == 0 ? 1.0 : -1.0) * rho_[s][s].real();
    }
    return sum;
  }

  // 2 |<0...0| rho |1...1>|, the parity-oscillation amplitude.
  double coherence() const {
    return 2.0 * std::abs(rho_[0][(1 << n_) - 1]);
  }

  double population() const {
    return rho_[0][0].real() + rho_[(1 << n_) - 1][(1 << n_) - 1].real();
  }

private:
  void apply_unitary(const Matrix& u) {
    rho_ = matmul(u, matmul(rho_, dagger(u)));
  }

  void mix_pauli_terms(const std::vector<Matrix>& paulis, double p) {
    if (p <= 0.0) return;
    const double share = p / static_cast<double>(paulis.size());
    Matrix mixed = rho_;
    const int dim = 1 << n_;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) mixed[i][j] *= 1.0 - p;
    }
    for (const Matrix& pm : paulis) {
      const Matrix term = matmul(pm, matmul(rho_, dagger(pm)));
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) mixed[i][j] += share * term[i][j];
      }
    }
    rho_ = std::move(mixed);
  }

  void depolarize_1q(int q, double p) { mix_pauli_terms(pauli_matrices(q, n_), p); }

  void depolarize_2q(int a, int b, double p) {
    std::vector<Matrix> paulis;
    std::vector<Matrix> pa = pauli_matrices(a, n_);
    std::vector<Matrix> pb = pauli_matrices(b, n_);
    const int dim = 1 << n_;
    Matrix identity = zeros(dim);
    for (int i = 0; i < dim; ++i) identity[i][i] = 1.0;
    pa.insert(pa.begin(), identity);
    pb.insert(pb.begin(), identity);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i == 0 && j == 0) continue;
        paulis.push_back(matmul(pa[i], pb[j]));
      }
    }
    mix_pauli_terms(paulis, p);
  }

  int n_;
  ghzcs::NoiseModel noise_;
  Matrix rho_;
};

} // namespace ghzcs_test
