#pragma once

#include <map>

#include "qtsim/qcore/json_io.hpp"
#include "qtsim/qcore/sampling.hpp"
#include "qtsim/qcore/statevector.hpp"

namespace qtsim::hadamard {

using qcore::Circuit;
using qcore::CountsDistribution;
using qcore::Gate;
using qcore::GateKind;

/// Per-gate complex conjugate of a circuit: same gate order, each gate
/// replaced by its elementwise conjugate. Angles negate; SX is not real and
/// becomes the exact pair [X, SX] (SX.X = SX^3 = conj(SX), including
/// determinant). The result satisfies psi*(W*) = conj(psi(W)) exactly, with
/// no stray global phase, which matters once the gates are controlled.
inline Circuit conjugated_circuit(const Circuit& base) {
  Circuit out(base.num_qubits, base.num_clbits);
  out.metadata = base.metadata;
  for (const Gate& g : base.gates) {
    switch (g.kind) {
      case GateKind::X:
      case GateKind::H:
      case GateKind::CX:
      case GateKind::CZ:
      case GateKind::SWAP:
        out.add(g);
        break;
      case GateKind::RZ:
      case GateKind::P:
      case GateKind::CP: {
        Gate c = g;
        c.params[0] = -c.params[0];
        out.add(std::move(c));
        break;
      }
      case GateKind::DIAG: {
        Gate c = g;
        for (double& ph : c.phases) ph = -ph;
        out.add(std::move(c));
        break;
      }
      case GateKind::SX: {
        Gate x = g;
        x.kind = GateKind::X;
        out.add(x);
        out.add(g);
        break;
      }
      case GateKind::MEASURE:
        throw std::invalid_argument("cannot conjugate a measured circuit");
    }
  }
  return out;
}

struct HadamardTestCircuit {
  Circuit base;       // W: preparation + evolution
  Circuit wrapped;    // H(h), c-W, X(h), c-W*, H(h), measure
  int working_qubits = 0;
  int test_qubit = 0;  // h
};

/// Wraps W in the Hadamard test: the h = |0> branch carries |psi> and the
/// h = |1> branch |psi*>, so after the final H the outcome h=0 estimates
/// Re{psi}^2 and h=1 estimates Im{psi}^2. `working_qubits` is the number of
/// register qubits measured into cr (any kinetic ancilla above them is
/// left unmeasured); defaults to the full base width.
inline HadamardTestCircuit build_hadamard_test(const Circuit& base,
                                               int working_qubits = -1) {
  if (base.has_measurements())
    throw std::invalid_argument("hadamard test base must be measurement-free");
  const int w = working_qubits < 0 ? base.num_qubits : working_qubits;
  if (w < 1 || w > base.num_qubits)
    throw std::invalid_argument("invalid working register size");
  const int h = base.num_qubits;

  HadamardTestCircuit out;
  out.base = base;
  out.working_qubits = w;
  out.test_qubit = h;
  Circuit& c = out.wrapped;
  c = Circuit(base.num_qubits + 1, w + 1);
  c.metadata = base.metadata;
  c.metadata["hadamard_test"] = "1";

  auto controlled = [h](Gate g) {
    g.controls.push_back(h);
    return g;
  };
  c.add(qcore::g_h(h));
  for (const Gate& g : base.gates) c.add(controlled(g));
  c.add(qcore::g_x(h));
  for (const Gate& g : conjugated_circuit(base).gates) c.add(controlled(g));
  c.add(qcore::g_h(h));
  for (int q = 0; q < w; ++q) c.add(qcore::g_measure(q, q));
  c.add(qcore::g_measure(h, w));  // hc: most significant bit of the counts key
  return out;
}

/// Joint-normalized branch masses: re estimates Re{psi}^2, im estimates
/// Im{psi}^2, both divided by the total shot count.
struct ReImDistributions {
  std::map<std::string, double> re;
  std::map<std::string, double> im;
  long long shots = 0;
};

inline ReImDistributions extract_re_im(const CountsDistribution& counts) {
  ReImDistributions out;
  out.shots = counts.shots;
  for (const auto& [key, c] : counts.counts) {
    if (key.empty() || (key[0] != '0' && key[0] != '1'))
      throw std::invalid_argument("malformed counts bitstring");
    const std::string state = key.substr(1);
    const double mass =
        static_cast<double>(c) / static_cast<double>(counts.shots);
    if (key[0] == '0')
      out.re[state] += mass;
    else
      out.im[state] += mass;
  }
  return out;
}

/// Ideal-simulator end to end run: statevector, sample, remap to clbits,
/// split on hc.
inline ReImDistributions run_hadamard_test(const HadamardTestCircuit& htc,
                                           long long shots,
                                           std::uint64_t seed) {
  qcore::StateVector sv =
      qcore::simulate_statevector(htc.wrapped.unitary_part());
  CountsDistribution raw = qcore::sample_counts(sv, shots, seed);
  CountsDistribution mapped = qcore::map_counts_to_clbits(
      raw, htc.wrapped.num_qubits, htc.wrapped.num_clbits,
      htc.wrapped.measurement_map());
  return extract_re_im(mapped);
}

inline qcore::json to_json(const ReImDistributions& d) {
  qcore::json re = qcore::json::object();
  qcore::json im = qcore::json::object();
  for (const auto& [k, v] : d.re) re[k] = v;
  for (const auto& [k, v] : d.im) im[k] = v;
  return qcore::json{{"re", std::move(re)}, {"im", std::move(im)},
                     {"shots", d.shots}};
}

}  // namespace qtsim::hadamard
