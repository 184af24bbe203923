#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "qtsim/qcore/circuit.hpp"

namespace qtsim::tunnel {

using qcore::Circuit;
using qcore::Mat;
using qcore::Vec;
using qcore::cx;

/// Periodic grid of 2^n sites on the interval [0, L). Natural units
/// (hbar = m = 1); site k sits at x_k = k * dl.
struct Discretization {
  int n = 0;
  double box_length = 1.0;

  Discretization() = default;
  Discretization(int nq, double length) : n(nq), box_length(length) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    if (box_length <= 0) throw std::invalid_argument("box length must be positive");
  }

  int sites() const { return 1 << n; }
  double spacing() const { return box_length / sites(); }
  double position(int k) const { return k * spacing(); }
};

enum class PotentialForm { pattern, single_z_low, single_z_high };

/// Potential landscape: strength v on every basis state matching `pattern`
/// (characters qubit n-1 ... qubit 0, 'x' matches either bit).
struct PotentialSpec {
  std::string pattern;
  double strength = 0.0;
  PotentialForm form = PotentialForm::pattern;

  static PotentialSpec from_pattern(std::string p, double v) {
    PotentialSpec s;
    s.pattern = std::move(p);
    s.strength = v;
    return s;
  }
  /// Barrier on states with qubit 0 = 1 (odd sites): the "multiple wells"
  /// landscape realized by a Z rotation on the lowest-order qubit.
  static PotentialSpec single_z_low(int n, double v) {
    PotentialSpec s;
    s.pattern = std::string(n - 1, 'x') + "1";
    s.strength = v;
    s.form = PotentialForm::single_z_low;
    return s;
  }
  /// Barrier on the upper half of the grid (qubit n-1 = 1): a potential wall.
  static PotentialSpec single_z_high(int n, double v) {
    PotentialSpec s;
    s.pattern = "1" + std::string(n - 1, 'x');
    s.strength = v;
    s.form = PotentialForm::single_z_high;
    return s;
  }

  void validate(int n) const {
    if (static_cast<int>(pattern.size()) != n)
      throw std::invalid_argument("potential pattern length must equal n");
    bool any = false;
    for (char c : pattern) {
      if (c != '0' && c != '1' && c != 'x')
        throw std::invalid_argument("potential pattern may contain only 0/1/x");
      any = any || c != 'x';
    }
    if (!any && strength != 0.0)
      throw std::invalid_argument("all-x pattern with nonzero strength");
  }

  /// Pattern char i refers to qubit n-1-i.
  bool matches(int n, int state) const {
    for (int i = 0; i < n; ++i) {
      char c = pattern[i];
      int bit = (state >> (n - 1 - i)) & 1;
      if (c == '0' && bit != 0) return false;
      if (c == '1' && bit != 1) return false;
    }
    return true;
  }

  std::vector<double> profile(const Discretization& disc) const {
    std::vector<double> v(disc.sites(), 0.0);
    for (int k = 0; k < disc.sites(); ++k)
      if (matches(disc.n, k)) v[k] = strength;
    return v;
  }
};

struct WavepacketSpec {
  enum class Kind { basis, gaussian };
  Kind kind = Kind::basis;
  int basis_index = 0;
  double mu = 0.0;     // center position
  double sigma = 1.0;  // width
  double momentum = 0.0;

  static WavepacketSpec basis(int k) {
    WavepacketSpec s;
    s.kind = Kind::basis;
    s.basis_index = k;
    return s;
  }
  static WavepacketSpec gaussian(double mu, double sigma, double p = 0.0) {
    WavepacketSpec s;
    s.kind = Kind::gaussian;
    s.mu = mu;
    s.sigma = sigma;
    s.momentum = p;
    return s;
  }
};

struct TrotterConfig {
  double dt = 0.1;
  int steps = 1;
  int order = 1;
  bool use_ancilla = false;

  void validate() const {
    if (dt <= 0) throw std::invalid_argument("dt must be positive");
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  }
};

/// Momentum-space bookkeeping for the kinetic operator. Momentum indices
/// are centered by two's-complement folding so the free particle drifts
/// physically; `paper_faithful` reproduces the published Algorithm 1 angles
/// literally instead (uniform single-qubit angle, dt-independent pair angles).
struct KineticParams {
  double box_length = 1.0;
  bool paper_faithful = false;
  double phi = 1.0;  // only used by the paper_faithful construction

  /// Signed momentum index for basis state k of an n-qubit register.
  static int centered_index(int k, int n) {
    return k < (1 << (n - 1)) ? k : k - (1 << n);
  }

  /// Physical momentum of basis state k: (2 pi / L) * centered index.
  double momentum(int k, int n) const {
    return 2.0 * std::numbers::pi / box_length * centered_index(k, n);
  }

  /// Kinetic phase applied per time step: -dt * p_k^2 / 2.
  double phase(int k, int n, double dt) const {
    double p = momentum(k, n);
    return -0.5 * dt * p * p;
  }
};

}  // namespace qtsim::tunnel
