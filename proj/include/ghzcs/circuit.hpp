#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ghzcs {

enum class GateKind { H, X, Cnot, Rz, Ry, MeasureZ };

bool is_rotation(GateKind kind);
bool is_measurement(GateKind kind);
const char* gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits; // Cnot: {control, target}
  double angle = 0.0;      // Rz / Ry only

  static Gate h(int q);
  static Gate x(int q);
  static Gate cnot(int control, int target);
  static Gate rz(int q, double angle);
  static Gate ry(int q, double angle);
  static Gate measure_z(int q);

  bool operator==(const Gate&) const = default;
};

// Ordered gate list plus a layer partition. Gates within one layer act on
// disjoint qubits and the gate order is a linearization of the layer order.
// Data qubits are 0..n_data-1, flag ancillas n_data..n_data+n_flags-1.
struct Circuit {
  int n_data = 0;
  int n_flags = 0;
  std::vector<Gate> gates;
  std::vector<std::vector<int>> layers; // indices into `gates`

  int total_qubits() const { return n_data + n_flags; }
  bool has_data_measurement() const;
  bool has_measurement() const;

  // Appends the gates as one new layer and keeps both views consistent.
  void append_layer(std::vector<Gate> layer_gates);

  // Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

// Records which CNOT entangled each qubit: parent[target] = control.
struct PrepTree {
  int n = 0;
  int root = 0;
  std::vector<int> parent;            // parent[root] == -1
  std::vector<int> entangling_layer;  // root: 0 (the H layer)

  int depth(int q) const;
  void validate() const;
};

struct GateCounts {
  long long n_1q = 0; // H, X, Rz, Ry
  long long n_cx = 0; // Cnot
};

// Log-depth GHZ preparation: one H on qubit 0, then CNOT layers in which
// every already-entangled qubit fans out to one fresh qubit until n qubits
// are entangled. Controls are taken lowest-index-first in a partial layer
// and fresh targets are assigned in increasing index order.
std::pair<Circuit, PrepTree> build_ghz_tree(int n);

// Perfect-binary-tree preparation for n = 2^d - 1 qubits (heap indexing,
// children of i are 2i+1 and 2i+2). A fixture shape for coverage anchors;
// each node fans out its two children in consecutive layers.
std::pair<Circuit, PrepTree> build_perfect_tree(int n);

// For each pair (i, j) appends a fresh flag ancilla with CNOT(i, flag),
// CNOT(j, flag) and a flag measurement after the existing gates.
Circuit attach_flag_checks(const Circuit& circuit, const PrepTree& tree,
                           const std::vector<std::pair<int, int>>& pairs);

// Appends Rz(-phi) then Ry(-pi/2) on every data qubit, then measures all
// data qubits. Rejects circuits whose data qubits are already measured.
Circuit attach_parity_measurement(const Circuit& circuit, double phi);

// Appends a computational-basis measurement on all data qubits.
Circuit attach_z_measurement(const Circuit& circuit);

// Exact gate tallies; measurements are excluded from both counts.
GateCounts count_gates(const Circuit& circuit);

// Inserts an X,X pair on every data qubit that idles through a layer with a
// two-qubit gate. The pair straddles the layer and a companion layer right
// after it, keeping the one-gate-per-qubit-per-layer invariant intact; the
// ideal unitary is unchanged up to global phase.
Circuit insert_dd(const Circuit& circuit);

} // namespace ghzcs
