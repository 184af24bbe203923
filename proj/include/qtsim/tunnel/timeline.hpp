#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>

#include "qtsim/qcore/sampling.hpp"
#include "qtsim/tunnel/builders.hpp"

namespace qtsim::tunnel {

/// Row t = site probability distribution after t Trotter steps; row 0 is the
/// initial state. `potential_profile` carries the landscape for plotting.
struct TimelineResult {
  int steps = 0;
  std::vector<std::vector<double>> probabilities;
  std::vector<double> potential_profile;
};

struct TimelineMode {
  bool exact = true;
  long long shots = 0;
  std::uint64_t seed = 0;

  static TimelineMode exact_state() { return {}; }
  static TimelineMode counts(long long shots, std::uint64_t seed) {
    TimelineMode m;
    m.exact = false;
    m.shots = shots;
    m.seed = seed;
    return m;
  }
};

/// Evolves step by step, recording the working-register distribution after
/// each Trotter step. Exact mode reads Born probabilities; counts mode
/// samples `shots` per timestep (seed offset by the step index).
inline TimelineResult run_timeline(const Discretization& disc,
                                   const PotentialSpec& potential,
                                   const WavepacketSpec& init,
                                   const TrotterConfig& cfg,
                                   const TimelineMode& mode = {}) {
  if (!mode.exact && mode.shots < 1)
    throw std::invalid_argument("counts mode needs shots >= 1");
  const int n = disc.n;
  const int width = cfg.use_ancilla ? n + 1 : n;
  const int dim = disc.sites();

  StateVector psi0 = prepare_initial_state(init, disc);
  StateVector state(width);
  {
    Circuit prep(width);
    for (const Gate& g : build_state_prep(psi0).gates) prep.add(g);
    state = qcore::simulate_statevector(prep);
  }
  TrotterConfig one_step = cfg;
  one_step.steps = 1;
  const Circuit step = build_trotter_steps(disc, potential, one_step);

  TimelineResult res;
  res.steps = cfg.steps;
  res.potential_profile = potential.profile(disc);

  auto record = [&](int t) {
    // Marginal over the working register (the ancilla is back in |0> after
    // each step, so this is a straight projection).
    std::vector<double> row(dim, 0.0);
    for (Eigen::Index k = 0; k < state.dim(); ++k)
      row[k & (dim - 1)] += std::norm(state.amps(k));
    if (!mode.exact) {
      std::vector<double> sampled(dim, 0.0);
      auto counts = qcore::detail::sample_probabilities(
          row, n, mode.shots, {}, mode.seed + static_cast<std::uint64_t>(t));
      for (const auto& [key, c] : counts.counts)
        sampled[qcore::index_of_bitstring(key)] +=
            static_cast<double>(c) / static_cast<double>(mode.shots);
      row = sampled;
    }
    res.probabilities.push_back(std::move(row));
  };

  record(0);
  for (int t = 1; t <= cfg.steps; ++t) {
    for (const Gate& g : step.gates) qcore::detail::apply_gate(state.amps, g);
    record(t);
  }
  return res;
}

inline std::string timeline_csv(const TimelineResult& res, int n) {
  std::ostringstream out;
  out << "timestep,state,probability\n";
  out << std::setprecision(17);
  for (std::size_t t = 0; t < res.probabilities.size(); ++t)
    for (std::size_t k = 0; k < res.probabilities[t].size(); ++k)
      out << t << ',' << qcore::bitstring_of(k, n) << ','
          << res.probabilities[t][k] << '\n';
  return out.str();
}

inline std::string potential_csv(const TimelineResult& res, int n) {
  std::ostringstream out;
  out << "state,potential\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < res.potential_profile.size(); ++k)
    out << qcore::bitstring_of(k, n) << ',' << res.potential_profile[k] << '\n';
  return out.str();
}

/// Grayscale PGM of the timeline (rows = timesteps), probability mapped to
/// 8-bit intensity.
inline std::string timeline_pgm(const TimelineResult& res) {
  std::ostringstream out;
  const std::size_t rows = res.probabilities.size();
  const std::size_t cols = rows ? res.probabilities[0].size() : 0;
  out << "P2\n" << cols << ' ' << rows << "\n255\n";
  for (const auto& row : res.probabilities) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      int v = static_cast<int>(std::lround(255.0 * std::min(1.0, row[k])));
      out << v << (k + 1 == row.size() ? '\n' : ' ');
    }
  }
  return out.str();
}

}  // namespace qtsim::tunnel
