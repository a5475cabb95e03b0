#include "ghzcs/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace ghzcs {

bool is_rotation(GateKind kind) {
  return kind == GateKind::Rz || kind == GateKind::Ry;
}

bool is_measurement(GateKind kind) { return kind == GateKind::MeasureZ; }

const char* gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Cnot: return "cnot";
    case GateKind::Rz: return "rz";
    case GateKind::Ry: return "ry";
    case GateKind::MeasureZ: return "measure_z";
  }
  throw std::invalid_argument("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
  if (name == "h") return GateKind::H;
  if (name == "x") return GateKind::X;
  if (name == "cnot") return GateKind::Cnot;
  if (name == "rz") return GateKind::Rz;
  if (name == "ry") return GateKind::Ry;
  if (name == "measure_z") return GateKind::MeasureZ;
  throw std::invalid_argument("unknown gate kind: " + name);
}

Gate Gate::h(int q) { return Gate{GateKind::H, {q}, 0.0}; }
Gate Gate::x(int q) { return Gate{GateKind::X, {q}, 0.0}; }
Gate Gate::cnot(int control, int target) {
  return Gate{GateKind::Cnot, {control, target}, 0.0};
}
Gate Gate::rz(int q, double angle) { return Gate{GateKind::Rz, {q}, angle}; }
Gate Gate::ry(int q, double angle) { return Gate{GateKind::Ry, {q}, angle}; }
Gate Gate::measure_z(int q) { return Gate{GateKind::MeasureZ, {q}, 0.0}; }

bool Circuit::has_data_measurement() const {
  for (const Gate& g : gates) {
    if (g.kind == GateKind::MeasureZ && g.qubits[0] < n_data) return true;
  }
  return false;
}

bool Circuit::has_measurement() const {
  for (const Gate& g : gates) {
    if (g.kind == GateKind::MeasureZ) return true;
  }
  return false;
}

void Circuit::append_layer(std::vector<Gate> layer_gates) {
  std::vector<int> indices;
  indices.reserve(layer_gates.size());
  for (Gate& g : layer_gates) {
    indices.push_back(static_cast<int>(gates.size()));
    gates.push_back(std::move(g));
  }
  layers.push_back(std::move(indices));
}

void Circuit::validate() const {
  if (n_data < 0 || n_flags < 0) {
    throw std::invalid_argument("negative qubit counts");
  }
  const int total = total_qubits();
  for (const Gate& g : gates) {
    const std::size_t expect = g.kind == GateKind::Cnot ? 2 : 1;
    if (g.qubits.size() != expect) {
      throw std::invalid_argument("gate has wrong qubit count");
    }
    std::set<int> seen;
    for (int q : g.qubits) {
      if (q < 0 || q >= total) {
        throw std::invalid_argument("gate qubit out of range");
      }
      if (!seen.insert(q).second) {
        throw std::invalid_argument("gate qubits must be distinct");
      }
    }
    if (!is_rotation(g.kind) && g.angle != 0.0) {
      throw std::invalid_argument("angle only allowed on rotations");
    }
  }
  // Layers partition the gate list in order and are qubit-disjoint.
  std::size_t next = 0;
  for (const auto& layer : layers) {
    std::set<int> touched;
    for (int idx : layer) {
      if (idx < 0 || static_cast<std::size_t>(idx) != next) {
        throw std::invalid_argument("layers must partition gates in order");
      }
      ++next;
      for (int q : gates[idx].qubits) {
        if (!touched.insert(q).second) {
          throw std::invalid_argument("qubit appears twice within a layer");
        }
      }
    }
  }
  if (next != gates.size()) {
    throw std::invalid_argument("layers do not cover all gates");
  }
}

int PrepTree::depth(int q) const {
  int d = 0;
  while (parent[q] >= 0) {
    q = parent[q];
    ++d;
    if (d > n) throw std::invalid_argument("parent relation has a cycle");
  }
  return d;
}

void PrepTree::validate() const {
  if (n < 1 || static_cast<int>(parent.size()) != n ||
      static_cast<int>(entangling_layer.size()) != n) {
    throw std::invalid_argument("malformed tree");
  }
  int roots = 0;
  for (int q = 0; q < n; ++q) {
    if (parent[q] < 0) {
      ++roots;
      if (q != root) throw std::invalid_argument("root mismatch");
    } else {
      if (parent[q] >= n) throw std::invalid_argument("parent out of range");
      if (entangling_layer[parent[q]] >= entangling_layer[q]) {
        throw std::invalid_argument("parent entangled after child");
      }
    }
    depth(q); // cycle check
  }
  if (roots != 1) throw std::invalid_argument("tree must have a single root");
}

std::pair<Circuit, PrepTree> build_ghz_tree(int n) {
  if (n < 2) throw std::invalid_argument("GHZ tree needs at least 2 qubits");

  Circuit circuit;
  circuit.n_data = n;
  PrepTree tree;
  tree.n = n;
  tree.root = 0;
  tree.parent.assign(n, -1);
  tree.entangling_layer.assign(n, 0);

  circuit.append_layer({Gate::h(0)});

  int entangled = 1;
  int layer = 1;
  while (entangled < n) {
    const int fanout = std::min(entangled, n - entangled);
    std::vector<Gate> cnots;
    cnots.reserve(fanout);
    for (int t = 0; t < fanout; ++t) {
      const int control = t;
      const int target = entangled + t;
      cnots.push_back(Gate::cnot(control, target));
      tree.parent[target] = control;
      tree.entangling_layer[target] = layer;
    }
    circuit.append_layer(std::move(cnots));
    entangled += fanout;
    ++layer;
  }
  return {std::move(circuit), std::move(tree)};
}

std::pair<Circuit, PrepTree> build_perfect_tree(int n) {
  if (n < 3 || (n & (n + 1)) != 0) {
    throw std::invalid_argument("perfect tree size must be 2^d - 1 with d >= 2");
  }

  Circuit circuit;
  circuit.n_data = n;
  PrepTree tree;
  tree.n = n;
  tree.root = 0;
  tree.parent.assign(n, -1);
  tree.entangling_layer.assign(n, 0);

  circuit.append_layer({Gate::h(0)});

  // Level by level; the two children of every node go in consecutive layers
  // so no control is reused within a layer.
  int layer = 1;
  for (int level_start = 0, level_size = 1; 2 * level_start + 1 < n;
       level_start = 2 * level_start + 1, level_size *= 2) {
    for (int side = 0; side < 2; ++side) {
      std::vector<Gate> cnots;
      for (int i = 0; i < level_size; ++i) {
        const int node = level_start + i;
        const int child = 2 * node + 1 + side;
        cnots.push_back(Gate::cnot(node, child));
        tree.parent[child] = node;
        tree.entangling_layer[child] = layer;
      }
      circuit.append_layer(std::move(cnots));
      ++layer;
    }
  }
  return {std::move(circuit), std::move(tree)};
}

Circuit attach_flag_checks(const Circuit& circuit, const PrepTree& tree,
                           const std::vector<std::pair<int, int>>& pairs) {
  if (tree.n != circuit.n_data) {
    throw std::invalid_argument("tree size does not match circuit data qubits");
  }
  if (!pairs.empty() && circuit.has_data_measurement()) {
    throw std::invalid_argument("cannot add flag checks after data measurement");
  }
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= circuit.n_data || j >= circuit.n_data || i == j) {
      throw std::invalid_argument("invalid flag pair (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
    }
    auto key = std::minmax(i, j);
    if (!seen.insert({key.first, key.second}).second) {
      throw std::invalid_argument("duplicate flag pair");
    }
  }

  Circuit out = circuit;
  for (auto [i, j] : pairs) {
    const int flag = out.total_qubits();
    out.n_flags += 1;
    out.append_layer({Gate::cnot(i, flag)});
    out.append_layer({Gate::cnot(j, flag)});
    out.append_layer({Gate::measure_z(flag)});
  }
  return out;
}

Circuit attach_parity_measurement(const Circuit& circuit, double phi) {
  if (circuit.has_data_measurement()) {
    throw std::invalid_argument("data qubits are already measured");
  }
  Circuit out = circuit;
  std::vector<Gate> rz_layer, ry_layer, meas_layer;
  for (int q = 0; q < out.n_data; ++q) {
    rz_layer.push_back(Gate::rz(q, -phi));
    ry_layer.push_back(Gate::ry(q, -std::numbers::pi / 2.0));
    meas_layer.push_back(Gate::measure_z(q));
  }
  out.append_layer(std::move(rz_layer));
  out.append_layer(std::move(ry_layer));
  out.append_layer(std::move(meas_layer));
  return out;
}

Circuit attach_z_measurement(const Circuit& circuit) {
  if (circuit.has_data_measurement()) {
    throw std::invalid_argument("data qubits are already measured");
  }
  Circuit out = circuit;
  std::vector<Gate> meas_layer;
  for (int q = 0; q < out.n_data; ++q) {
    meas_layer.push_back(Gate::measure_z(q));
  }
  out.append_layer(std::move(meas_layer));
  return out;
}

GateCounts count_gates(const Circuit& circuit) {
  GateCounts counts;
  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::Cnot) {
      counts.n_cx += 1;
    } else if (!is_measurement(g.kind)) {
      counts.n_1q += 1;
    }
  }
  return counts;
}

Circuit insert_dd(const Circuit& circuit) {
  Circuit out;
  out.n_data = circuit.n_data;
  out.n_flags = circuit.n_flags;

  for (const auto& layer : circuit.layers) {
    bool has_two_qubit = false;
    std::vector<bool> busy(circuit.n_data, false);
    std::vector<Gate> layer_gates;
    for (int idx : layer) {
      const Gate& g = circuit.gates[idx];
      layer_gates.push_back(g);
      if (g.kind == GateKind::Cnot) has_two_qubit = true;
      for (int q : g.qubits) {
        if (q < circuit.n_data) busy[q] = true;
      }
    }
    if (!has_two_qubit) {
      out.append_layer(std::move(layer_gates));
      continue;
    }
    std::vector<Gate> echo;
    for (int q = 0; q < circuit.n_data; ++q) {
      if (!busy[q]) {
        layer_gates.push_back(Gate::x(q));
        echo.push_back(Gate::x(q));
      }
    }
    out.append_layer(std::move(layer_gates));
    if (!echo.empty()) out.append_layer(std::move(echo));
  }
  return out;
}

} // namespace ghzcs
