#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qtsim/qcore/gate.hpp"

namespace qtsim::qcore {

/// Ordered list of gates over `num_qubits` virtual qubits. Measurement is
/// terminal per qubit: no gate may follow a MEASURE on the same qubit.
struct Circuit {
  int num_qubits = 0;
  int num_clbits = 0;
  std::vector<Gate> gates;
  std::map<std::string, std::string> metadata;

  Circuit() = default;
  explicit Circuit(int nq, int nc = 0) : num_qubits(nq), num_clbits(nc) {
    if (nq <= 0) throw std::invalid_argument("num_qubits must be positive");
    if (nc < 0) throw std::invalid_argument("num_clbits must be non-negative");
  }

  Circuit& add(Gate g) {
    g.validate();
    for (int q : g.qubits) check_qubit(q);
    for (int q : g.controls) check_qubit(q);
    if (g.kind == GateKind::MEASURE) {
      if (g.clbit < 0 || g.clbit >= num_clbits)
        throw std::invalid_argument("measure targets invalid classical bit");
      for (const Gate& prev : gates)
        if (prev.kind == GateKind::MEASURE && prev.clbit == g.clbit)
          throw std::invalid_argument("classical bit measured twice");
    } else {
      for (int q : g.qubits)
        if (measured(q))
          throw std::invalid_argument("gate after measurement on qubit " +
                                      std::to_string(q));
    }
    gates.push_back(std::move(g));
    return *this;
  }

  bool measured(int q) const {
    for (const Gate& g : gates)
      if (g.kind == GateKind::MEASURE && g.qubits[0] == q) return true;
    return false;
  }

  bool has_measurements() const {
    for (const Gate& g : gates)
      if (g.kind == GateKind::MEASURE) return true;
    return false;
  }

  /// Gates before any MEASURE, as a measurement-free circuit.
  Circuit unitary_part() const {
    Circuit c(num_qubits, num_clbits);
    c.metadata = metadata;
    for (const Gate& g : gates)
      if (g.kind != GateKind::MEASURE) c.gates.push_back(g);
    return c;
  }

  /// (qubit, clbit) pairs in gate order.
  std::vector<std::pair<int, int>> measurement_map() const {
    std::vector<std::pair<int, int>> m;
    for (const Gate& g : gates)
      if (g.kind == GateKind::MEASURE) m.emplace_back(g.qubits[0], g.clbit);
    return m;
  }

  Circuit& measure_all() {
    if (num_clbits < num_qubits) num_clbits = num_qubits;
    for (int q = 0; q < num_qubits; ++q) add(g_measure(q, q));
    return *this;
  }

  int gate_count() const {
    int n = 0;
    for (const Gate& g : gates)
      if (g.kind != GateKind::MEASURE) ++n;
    return n;
  }

  int two_qubit_gate_count() const {
    int n = 0;
    for (const Gate& g : gates)
      if (g.kind != GateKind::MEASURE && g.arity() + g.controls.size() >= 2) ++n;
    return n;
  }

  /// Circuit depth counting every gate as one layer slot.
  int depth() const {
    std::vector<int> level(num_qubits, 0);
    int d = 0;
    for (const Gate& g : gates) {
      int l = 0;
      for (int q : g.qubits) l = std::max(l, level[q]);
      for (int q : g.controls) l = std::max(l, level[q]);
      ++l;
      for (int q : g.qubits) level[q] = l;
      for (int q : g.controls) level[q] = l;
      d = std::max(d, l);
    }
    return d;
  }

 private:
  void check_qubit(int q) const {
    if (q < 0 || q >= num_qubits)
      throw std::invalid_argument("qubit index out of range");
  }
};

}  // namespace qtsim::qcore
