#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "qtsim/qcore/statevector.hpp"

namespace qtsim::qcore {

/// Depolarizing-plus-readout noise model. `base_scale` is the abstract noise
/// level tau; the effective per-gate probability is min(1, scale*tau*p_k).
struct NoiseModel {
  double p1 = 0.0;  // per 1-qubit gate
  double p2 = 0.0;  // per 2-qubit gate
  double base_scale = 1.0;
  // Per-qubit confusion factors: readout[q][measured][prepared]
  // = P(measured | prepared). Empty = ideal readout.
  std::vector<std::array<std::array<double, 2>, 2>> readout;

  void validate() const {
    if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1)
      throw std::invalid_argument("depolarizing probabilities must be in [0,1]");
    if (base_scale <= 0)
      throw std::invalid_argument("base_scale must be positive");
    for (const auto& m : readout) {
      for (int prep = 0; prep < 2; ++prep) {
        double col = m[0][prep] + m[1][prep];
        if (std::abs(col - 1.0) > 1e-9)
          throw std::invalid_argument("readout confusion columns must sum to 1");
      }
    }
  }

  double effective_prob(int gate_qubits, double scale) const {
    double p = gate_qubits >= 2 ? p2 : p1;
    return std::min(1.0, scale * base_scale * p);
  }

  static NoiseModel ideal() { return {}; }

  static NoiseModel symmetric_readout(int n, double flip) {
    NoiseModel m;
    m.readout.assign(n, {{{1.0 - flip, flip}, {flip, 1.0 - flip}}});
    return m;
  }
};

struct DensityMatrix {
  int n = 0;
  Mat rho;

  DensityMatrix() = default;
  explicit DensityMatrix(int nq)
      : n(nq), rho(Mat::Zero(Eigen::Index{1} << nq, Eigen::Index{1} << nq)) {
    rho(0, 0) = 1.0;
  }
  DensityMatrix(int nq, Mat m) : n(nq), rho(std::move(m)) {
    if (rho.rows() != (Eigen::Index{1} << nq) || rho.cols() != rho.rows())
      throw std::invalid_argument("density matrix dimension mismatch");
  }

  static DensityMatrix from_statevector(const StateVector& sv) {
    return DensityMatrix(sv.n, sv.amps * sv.amps.adjoint());
  }

  Eigen::Index dim() const { return rho.rows(); }
  double trace_real() const { return rho.trace().real(); }

  std::vector<double> probabilities() const {
    std::vector<double> p(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) p[k] = rho(k, k).real();
    return p;
  }
};

namespace detail {

/// Indices of every coset {base + local offsets} over the gate qubits, for
/// bases that satisfy the control mask. Shared by the density-matrix kernels.
inline std::vector<Eigen::Index> coset_indices(Eigen::Index dim,
                                               const std::vector<int>& qubits,
                                               std::uint64_t cmask,
                                               Eigen::Index subdim) {
  std::uint64_t gmask = 0;
  for (int q : qubits) gmask |= std::uint64_t{1} << q;
  std::vector<Eigen::Index> idx;
  for (std::uint64_t base = 0; base < static_cast<std::uint64_t>(dim); ++base) {
    if (base & gmask) continue;
    if ((base & cmask) != cmask) continue;
    for (Eigen::Index l = 0; l < subdim; ++l) {
      std::uint64_t v = base;
      for (std::size_t j = 0; j < qubits.size(); ++j)
        if ((l >> j) & 1) v |= std::uint64_t{1} << qubits[j];
      idx.push_back(static_cast<Eigen::Index>(v));
    }
  }
  return idx;
}

/// rho -> U rho U^dagger for a gate (extra controls included). Rows and
/// columns in the gate subspace are gathered into blocks so the local unitary
/// applies as one small matrix product per coset.
inline void apply_gate_density(Mat& rho, const Gate& gate) {
  const Eigen::Index dim = rho.rows();
  const Eigen::Index subdim = Eigen::Index{1} << gate.arity();
  const Mat u = gate.matrix();
  std::uint64_t cmask = 0;
  for (int c : gate.controls) cmask |= std::uint64_t{1} << c;
  const std::vector<Eigen::Index> idx =
      coset_indices(dim, gate.qubits, cmask, subdim);

  Mat rows(subdim, dim), cols(dim, subdim);
  const Mat udag = u.adjoint();
  for (std::size_t c = 0; c < idx.size(); c += subdim) {
    for (Eigen::Index l = 0; l < subdim; ++l) rows.row(l) = rho.row(idx[c + l]);
    rows = u * rows;
    for (Eigen::Index l = 0; l < subdim; ++l) rho.row(idx[c + l]) = rows.row(l);
  }
  for (std::size_t c = 0; c < idx.size(); c += subdim) {
    for (Eigen::Index l = 0; l < subdim; ++l) cols.col(l) = rho.col(idx[c + l]);
    cols = cols * udag;
    for (Eigen::Index l = 0; l < subdim; ++l) rho.col(idx[c + l]) = cols.col(l);
  }
}

/// Depolarizing channel on `qubits` with probability p:
/// rho -> (1-p) rho + p * (I/2^k) (x) Tr_qubits[rho].
inline void apply_depolarizing(Mat& rho, const std::vector<int>& qubits,
                               double p) {
  if (p <= 0) return;
  const Eigen::Index dim = rho.rows();
  const int k = static_cast<int>(qubits.size());
  const Eigen::Index subdim = Eigen::Index{1} << k;
  const std::vector<Eigen::Index> idx = coset_indices(dim, qubits, 0, subdim);
  const std::size_t cosets = idx.size() / subdim;

  std::vector<cx> traces(cosets * cosets);
  for (std::size_t br = 0; br < cosets; ++br)
    for (std::size_t bc = 0; bc < cosets; ++bc) {
      cx tr = 0.0;
      for (Eigen::Index l = 0; l < subdim; ++l)
        tr += rho(idx[br * subdim + l], idx[bc * subdim + l]);
      traces[br * cosets + bc] = tr;
    }
  rho *= 1.0 - p;
  const double mix = p / static_cast<double>(subdim);
  for (std::size_t br = 0; br < cosets; ++br)
    for (std::size_t bc = 0; bc < cosets; ++bc) {
      const cx add = mix * traces[br * cosets + bc];
      for (Eigen::Index l = 0; l < subdim; ++l)
        rho(idx[br * subdim + l], idx[bc * subdim + l]) += add;
    }
}

}  // namespace detail

constexpr int kMaxDensityQubits = 10;

/// Noisy simulation: each gate acts as a unitary channel followed by a
/// depolarizing channel on its support with probability min(1, scale*tau*p_k).
inline DensityMatrix simulate_density(const Circuit& circuit,
                                      const NoiseModel& noise,
                                      double scale = 1.0) {
  if (scale < 0) throw std::invalid_argument("noise scale must be >= 0");
  if (circuit.num_qubits > kMaxDensityQubits)
    throw std::invalid_argument("density simulation capped at n = " +
                                std::to_string(kMaxDensityQubits));
  if (circuit.has_measurements())
    throw std::invalid_argument("simulate_density: circuit has measurements");
  noise.validate();
  DensityMatrix dm(circuit.num_qubits);
  for (const Gate& g : circuit.gates) {
    detail::apply_gate_density(dm.rho, g);
    std::vector<int> support = g.qubits;
    support.insert(support.end(), g.controls.begin(), g.controls.end());
    double p = noise.effective_prob(static_cast<int>(support.size()), scale);
    detail::apply_depolarizing(dm.rho, support, p);
  }
  return dm;
}

/// Reduced density matrix over `keep` (in the given order; kept qubit i
/// becomes qubit i of the result).
inline DensityMatrix partial_trace(const DensityMatrix& dm,
                                   const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep list");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= dm.n)
      throw std::invalid_argument("partial_trace: qubit index out of range");
    for (std::size_t j = i + 1; j < keep.size(); ++j)
      if (keep[i] == keep[j])
        throw std::invalid_argument("partial_trace: duplicate keep index");
  }
  const int nk = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < dm.n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const int nt = static_cast<int>(traced.size());

  const Eigen::Index kdim = Eigen::Index{1} << nk;
  const Eigen::Index tdim = Eigen::Index{1} << nt;
  auto full_index = [&](Eigen::Index kb, Eigen::Index tb) {
    std::uint64_t idx = 0;
    for (int j = 0; j < nk; ++j)
      if ((kb >> j) & 1) idx |= std::uint64_t{1} << keep[j];
    for (int j = 0; j < nt; ++j)
      if ((tb >> j) & 1) idx |= std::uint64_t{1} << traced[j];
    return static_cast<Eigen::Index>(idx);
  };

  Mat out = Mat::Zero(kdim, kdim);
  for (Eigen::Index r = 0; r < kdim; ++r)
    for (Eigen::Index c = 0; c < kdim; ++c)
      for (Eigen::Index t = 0; t < tdim; ++t)
        out(r, c) += dm.rho(full_index(r, t), full_index(c, t));
  return DensityMatrix(nk, std::move(out));
}

}  // namespace qtsim::qcore
