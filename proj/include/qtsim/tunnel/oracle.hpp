#pragma once

#include <Eigen/Eigenvalues>

#include "qtsim/tunnel/model.hpp"

namespace qtsim::tunnel {

/// Dense-matrix reference for the Trotterized evolution. Everything here is
/// built from explicit matrices, independent of the circuit builders.
struct DenseOracle {
  Mat kinetic;          // K = F^dag diag(p^2/2) F
  Mat potential;        // V = diag(v * pattern)
  Mat step;             // one Trotter step at the configured order
  Mat trotter_product;  // step^steps
  Mat exact;            // exp(-i (K+V) * steps * dt)

  static constexpr int kMaxQubits = 6;
};

inline Mat dft_matrix(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  const double denom = static_cast<double>(dim);
  Mat f(dim, dim);
  const cx i1(0.0, 1.0);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = 0; k < dim; ++k)
      f(j, k) = std::exp(i1 * (2.0 * std::numbers::pi * j * k / denom)) /
                std::sqrt(denom);
  return f;
}

/// Hermitian matrix exponential exp(-i H t) via eigendecomposition.
inline Mat hermitian_propagator(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();
  Vec phases(ev.size());
  const cx i1(0.0, 1.0);
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    phases(k) = std::exp(-i1 * ev(k) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline DenseOracle dense_oracle(const Discretization& disc,
                                const PotentialSpec& potential,
                                const TrotterConfig& cfg) {
  if (disc.n > DenseOracle::kMaxQubits)
    throw std::invalid_argument("dense oracle capped at n = 6");
  cfg.validate();
  potential.validate(disc.n);
  const Eigen::Index dim = Eigen::Index{1} << disc.n;

  KineticParams kin;
  kin.box_length = disc.box_length;
  Vec kdiag(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double p = kin.momentum(static_cast<int>(k), disc.n);
    kdiag(k) = 0.5 * p * p;
  }
  const Mat f = dft_matrix(disc.n);

  DenseOracle o;
  o.kinetic = f.adjoint() * kdiag.asDiagonal() * f;
  o.potential = Mat::Zero(dim, dim);
  const std::vector<double> prof = potential.profile(disc);
  for (Eigen::Index k = 0; k < dim; ++k) o.potential(k, k) = prof[k];

  const cx i1(0.0, 1.0);
  auto exp_diag = [&](const Mat& d, double t) {
    Vec e(dim);
    for (Eigen::Index k = 0; k < dim; ++k) e(k) = std::exp(-i1 * d(k, k) * t);
    return Mat(e.asDiagonal());
  };
  const Mat ek = f.adjoint() * exp_diag(Mat(kdiag.asDiagonal()), cfg.dt) * f;
  if (cfg.order == 1) {
    o.step = exp_diag(o.potential, cfg.dt) * ek;
  } else {
    const Mat vh = exp_diag(o.potential, cfg.dt / 2);
    o.step = vh * ek * vh;
  }
  o.trotter_product = Mat::Identity(dim, dim);
  for (int s = 0; s < cfg.steps; ++s) o.trotter_product = o.step * o.trotter_product;
  o.exact = hermitian_propagator(o.kinetic + o.potential, cfg.dt * cfg.steps);
  return o;
}

}  // namespace qtsim::tunnel
