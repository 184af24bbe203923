#pragma once

#include <cmath>
#include <optional>

#include "qtsim/qcore/circuit.hpp"

namespace qtsim::qcore {

/// Amplitudes in little-endian basis ordering: qubit 0 is the least
/// significant bit of the basis index.
struct StateVector {
  int n = 0;
  Vec amps;

  StateVector() = default;
  explicit StateVector(int nq) : n(nq), amps(Vec::Zero(Eigen::Index{1} << nq)) {
    amps(0) = 1.0;
  }
  StateVector(int nq, Vec a) : n(nq), amps(std::move(a)) {
    if (amps.size() != (Eigen::Index{1} << nq))
      throw std::invalid_argument("statevector dimension mismatch");
  }

  Eigen::Index dim() const { return amps.size(); }
  double norm2() const { return amps.squaredNorm(); }

  bool normalized(double tol = 1e-10) const {
    return std::abs(norm2() - 1.0) < tol;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) p[k] = std::norm(amps(k));
    return p;
  }
};

namespace detail {

/// Applies `gate` in place. Extra controls gate the action on basis states
/// where all control bits are 1.
inline void apply_gate(Vec& amps, const Gate& gate) {
  const int k = gate.arity();
  const Eigen::Index subdim = Eigen::Index{1} << k;
  const Mat u = gate.matrix();

  std::uint64_t cmask = 0;
  for (int c : gate.controls) cmask |= std::uint64_t{1} << c;
  std::uint64_t gmask = 0;
  for (int q : gate.qubits) gmask |= std::uint64_t{1} << q;

  const Eigen::Index dim = amps.size();
  Vec scratch(subdim);
  for (std::uint64_t base = 0; base < static_cast<std::uint64_t>(dim); ++base) {
    if (base & gmask) continue;  // enumerate cosets once
    if ((base & cmask) != cmask) continue;
    // gather
    for (Eigen::Index l = 0; l < subdim; ++l) {
      std::uint64_t idx = base;
      for (int j = 0; j < k; ++j)
        if ((l >> j) & 1) idx |= std::uint64_t{1} << gate.qubits[j];
      scratch(l) = amps(static_cast<Eigen::Index>(idx));
    }
    Vec out = u * scratch;
    for (Eigen::Index l = 0; l < subdim; ++l) {
      std::uint64_t idx = base;
      for (int j = 0; j < k; ++j)
        if ((l >> j) & 1) idx |= std::uint64_t{1} << gate.qubits[j];
      amps(static_cast<Eigen::Index>(idx)) = out(l);
    }
  }
}

}  // namespace detail

/// Runs a measurement-free circuit on `initial` (default |0...0>).
inline StateVector simulate_statevector(
    const Circuit& circuit, std::optional<StateVector> initial = {}) {
  if (circuit.has_measurements())
    throw std::invalid_argument("simulate_statevector: circuit has measurements");
  StateVector sv = initial ? *initial : StateVector(circuit.num_qubits);
  if (sv.n != circuit.num_qubits)
    throw std::invalid_argument("initial state dimension mismatch");
  if (!sv.normalized())
    throw std::invalid_argument("initial state not normalized");
  for (const Gate& g : circuit.gates) detail::apply_gate(sv.amps, g);
  return sv;
}

/// Full unitary of a measurement-free circuit, column by column.
inline Mat circuit_unitary(const Circuit& circuit) {
  const Eigen::Index dim = Eigen::Index{1} << circuit.num_qubits;
  Mat u(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Vec amps = Vec::Zero(dim);
    amps(col) = 1.0;
    for (const Gate& g : circuit.gates) {
      if (g.kind == GateKind::MEASURE)
        throw std::invalid_argument("circuit_unitary: circuit has measurements");
      detail::apply_gate(amps, g);
    }
    u.col(col) = amps;
  }
  return u;
}

/// Max-norm distance between two matrices after removing a global phase,
/// fixed at the largest-magnitude entry of `a`.
inline double max_norm_up_to_phase(const Mat& a, const Mat& b) {
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  cx phase = 1.0;
  if (std::abs(a(r, c)) > 1e-14 && std::abs(b(r, c)) > 1e-14)
    phase = (a(r, c) / std::abs(a(r, c))) / (b(r, c) / std::abs(b(r, c)));
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace qtsim::qcore
