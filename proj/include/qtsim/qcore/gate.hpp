#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtsim::qcore {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class GateKind {
  X,
  SX,
  H,
  RZ,
  P,
  CX,
  CZ,
  CP,
  SWAP,
  DIAG,
  MEASURE,
};

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "x";
    case GateKind::SX: return "sx";
    case GateKind::H: return "h";
    case GateKind::RZ: return "rz";
    case GateKind::P: return "p";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::CP: return "cp";
    case GateKind::SWAP: return "swap";
    case GateKind::DIAG: return "diag";
    case GateKind::MEASURE: return "measure";
  }
  throw std::logic_error("bad gate kind");
}

inline GateKind gate_kind_from_name(const std::string& s) {
  if (s == "x") return GateKind::X;
  if (s == "sx") return GateKind::SX;
  if (s == "h") return GateKind::H;
  if (s == "rz") return GateKind::RZ;
  if (s == "p") return GateKind::P;
  if (s == "cx") return GateKind::CX;
  if (s == "cz") return GateKind::CZ;
  if (s == "cp") return GateKind::CP;
  if (s == "swap") return GateKind::SWAP;
  if (s == "diag") return GateKind::DIAG;
  if (s == "measure") return GateKind::MEASURE;
  throw std::invalid_argument("unknown gate name: " + s);
}

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::X:
    case GateKind::SX:
    case GateKind::H:
    case GateKind::RZ:
    case GateKind::P:
    case GateKind::MEASURE:
      return 1;
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::CP:
    case GateKind::SWAP:
      return 2;
    case GateKind::DIAG:
      return -1;  // any arity; fixed by the qubit list
  }
  throw std::logic_error("bad gate kind");
}

inline int gate_param_count(GateKind k) {
  switch (k) {
    case GateKind::RZ:
    case GateKind::P:
    case GateKind::CP:
      return 1;
    default:
      return 0;
  }
}

/// One gate of the circuit IR. `qubits` are virtual indices; local basis bit
/// j of the gate matrix corresponds to qubits[j] (little-endian throughout).
/// `controls` is an extension used by the Hadamard-test wrapper: extra
/// control qubits that gate the whole operation on |1>.
struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  std::vector<double> params;
  std::vector<double> phases;   // DIAG only, length 2^arity
  std::vector<int> controls;    // extra controls, honored by the simulators
  int clbit = -1;               // MEASURE only

  Gate() = default;
  Gate(GateKind k, std::vector<int> q, std::vector<double> p = {},
       std::vector<double> ph = {})
      : kind(k), qubits(std::move(q)), params(std::move(p)),
        phases(std::move(ph)) {
    validate();
  }

  int arity() const { return static_cast<int>(qubits.size()); }

  void validate() const {
    int a = gate_arity(kind);
    if (a >= 0 && arity() != a)
      throw std::invalid_argument(std::string("gate ") + gate_name(kind) +
                                  ": wrong qubit count");
    if (kind == GateKind::DIAG) {
      if (qubits.empty())
        throw std::invalid_argument("diag gate needs at least one qubit");
      if (phases.size() != (std::size_t{1} << qubits.size()))
        throw std::invalid_argument("diag phase list must have 2^arity entries");
    } else if (!phases.empty()) {
      throw std::invalid_argument("phases only valid on diag gates");
    }
    if (static_cast<int>(params.size()) != gate_param_count(kind))
      throw std::invalid_argument(std::string("gate ") + gate_name(kind) +
                                  ": wrong param count");
    for (std::size_t i = 0; i < qubits.size(); ++i)
      for (std::size_t j = i + 1; j < qubits.size(); ++j)
        if (qubits[i] == qubits[j])
          throw std::invalid_argument("duplicate qubit index on gate");
    for (int c : controls)
      for (int q : qubits)
        if (c == q)
          throw std::invalid_argument("control overlaps gate qubit");
  }

  /// Dense matrix over the gate's local basis (dimension 2^arity).
  /// MEASURE has no matrix.
  Mat matrix() const;
};

namespace detail {
inline Mat matrix_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Mat matrix_sx() {
  Mat m(2, 2);
  m << cx(0.5, 0.5), cx(0.5, -0.5), cx(0.5, -0.5), cx(0.5, 0.5);
  return m;
}
inline Mat matrix_h() {
  const double s = 1.0 / std::sqrt(2.0);
  Mat m(2, 2);
  m << s, s, s, -s;
  return m;
}
}  // namespace detail

inline Mat Gate::matrix() const {
  using std::exp;
  const cx i1(0.0, 1.0);
  switch (kind) {
    case GateKind::X: return detail::matrix_x();
    case GateKind::SX: return detail::matrix_sx();
    case GateKind::H: return detail::matrix_h();
    case GateKind::RZ: {
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = exp(-i1 * params[0] / 2.0);
      m(1, 1) = exp(i1 * params[0] / 2.0);
      return m;
    }
    case GateKind::P: {
      Mat m = Mat::Identity(2, 2);
      m(1, 1) = exp(i1 * params[0]);
      return m;
    }
    case GateKind::CX: {
      // local bit 0 = control, bit 1 = target
      Mat m = Mat::Zero(4, 4);
      m(0, 0) = 1;
      m(2, 2) = 1;
      m(3, 1) = 1;
      m(1, 3) = 1;
      return m;
    }
    case GateKind::CZ: {
      Mat m = Mat::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    }
    case GateKind::CP: {
      Mat m = Mat::Identity(4, 4);
      m(3, 3) = exp(i1 * params[0]);
      return m;
    }
    case GateKind::SWAP: {
      Mat m = Mat::Zero(4, 4);
      m(0, 0) = 1;
      m(3, 3) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      return m;
    }
    case GateKind::DIAG: {
      const Eigen::Index dim = Eigen::Index{1} << qubits.size();
      Mat m = Mat::Zero(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k) m(k, k) = exp(i1 * phases[k]);
      return m;
    }
    case GateKind::MEASURE:
      throw std::logic_error("measure has no matrix");
  }
  throw std::logic_error("bad gate kind");
}

// Convenience constructors.
inline Gate g_x(int q) { return Gate(GateKind::X, {q}); }
inline Gate g_sx(int q) { return Gate(GateKind::SX, {q}); }
inline Gate g_h(int q) { return Gate(GateKind::H, {q}); }
inline Gate g_rz(double theta, int q) { return Gate(GateKind::RZ, {q}, {theta}); }
inline Gate g_p(double theta, int q) { return Gate(GateKind::P, {q}, {theta}); }
inline Gate g_cx(int c, int t) { return Gate(GateKind::CX, {c, t}); }
inline Gate g_cz(int a, int b) { return Gate(GateKind::CZ, {a, b}); }
inline Gate g_cp(double theta, int c, int t) {
  return Gate(GateKind::CP, {c, t}, {theta});
}
inline Gate g_swap(int a, int b) { return Gate(GateKind::SWAP, {a, b}); }
inline Gate g_diag(std::vector<int> qs, std::vector<double> phases) {
  return Gate(GateKind::DIAG, std::move(qs), {}, std::move(phases));
}
inline Gate g_measure(int q, int clbit) {
  Gate g(GateKind::MEASURE, {q});
  g.clbit = clbit;
  return g;
}

}  // namespace qtsim::qcore
