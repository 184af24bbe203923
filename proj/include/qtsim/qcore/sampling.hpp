#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "qtsim/qcore/density.hpp"

namespace qtsim::qcore {

/// Measurement counts. Bitstring keys are rendered qubit n-1 ... qubit 0
/// (left to right), matching state labels like |0100>.
struct CountsDistribution {
  long long shots = 0;
  std::map<std::string, long long> counts;

  int num_bits() const {
    return counts.empty() ? 0 : static_cast<int>(counts.begin()->first.size());
  }

  std::map<std::string, double> probabilities() const {
    std::map<std::string, double> p;
    for (const auto& [k, v] : counts)
      p[k] = static_cast<double>(v) / static_cast<double>(shots);
    return p;
  }
};

inline std::string bitstring_of(std::uint64_t index, int bits) {
  std::string s(bits, '0');
  for (int b = 0; b < bits; ++b)
    if ((index >> b) & 1) s[bits - 1 - b] = '1';
  return s;
}

inline std::uint64_t index_of_bitstring(const std::string& s) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '1') idx |= std::uint64_t{1} << (s.size() - 1 - i);
  return idx;
}

namespace detail {

inline CountsDistribution sample_probabilities(
    const std::vector<double>& probs, int n, long long shots,
    const std::vector<std::array<std::array<double, 2>, 2>>& readout,
    std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (!readout.empty() && static_cast<int>(readout.size()) != n)
    throw std::invalid_argument("readout confusion size mismatch");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += std::max(0.0, probs[k]);
    cdf[k] = acc;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CountsDistribution out;
  out.shots = shots;
  for (long long s = 0; s < shots; ++s) {
    double r = uni(rng) * acc;
    std::uint64_t idx =
        std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin();
    if (idx >= probs.size()) idx = probs.size() - 1;
    if (!readout.empty()) {
      std::uint64_t flipped = idx;
      for (int q = 0; q < n; ++q) {
        int bit = (idx >> q) & 1;
        double p_flip = readout[q][1 - bit][bit];
        if (uni(rng) < p_flip) flipped ^= std::uint64_t{1} << q;
      }
      idx = flipped;
    }
    ++out.counts[bitstring_of(idx, n)];
  }
  return out;
}

}  // namespace detail

/// Multinomial sampling from Born probabilities, then independent per-qubit
/// readout bit flips. Deterministic for a fixed seed.
inline CountsDistribution sample_counts(
    const StateVector& sv, long long shots,
    const std::vector<std::array<std::array<double, 2>, 2>>& readout,
    std::uint64_t seed) {
  return detail::sample_probabilities(sv.probabilities(), sv.n, shots, readout,
                                      seed);
}

inline CountsDistribution sample_counts(const StateVector& sv, long long shots,
                                        std::uint64_t seed) {
  return sample_counts(sv, shots, {}, seed);
}

inline CountsDistribution sample_counts(
    const DensityMatrix& dm, long long shots,
    const std::vector<std::array<std::array<double, 2>, 2>>& readout,
    std::uint64_t seed) {
  return detail::sample_probabilities(dm.probabilities(), dm.n, shots, readout,
                                      seed);
}

inline CountsDistribution sample_counts(const DensityMatrix& dm,
                                        long long shots, std::uint64_t seed) {
  return sample_counts(dm, shots, {}, seed);
}

/// Remaps sampled qubit outcomes onto classical bits per the circuit's
/// measurement map. Clbits without a measurement read 0.
inline CountsDistribution map_counts_to_clbits(
    const CountsDistribution& raw, int num_qubits, int num_clbits,
    const std::vector<std::pair<int, int>>& meas_map) {
  CountsDistribution out;
  out.shots = raw.shots;
  for (const auto& [key, c] : raw.counts) {
    std::uint64_t qidx = index_of_bitstring(key);
    std::uint64_t cidx = 0;
    for (const auto& [q, cl] : meas_map)
      if ((qidx >> q) & 1) cidx |= std::uint64_t{1} << cl;
    out.counts[bitstring_of(cidx, num_clbits)] += c;
  }
  (void)num_qubits;
  return out;
}

/// Diagonal observable: expectation = sum over bitstrings of w(b) * P(b).
struct Observable {
  std::map<std::string, double> weights;

  static Observable indicator(const std::string& bitstring) {
    Observable o;
    o.weights[bitstring] = 1.0;
    return o;
  }
};

inline double expectation(const CountsDistribution& counts,
                          const Observable& obs) {
  if (counts.shots <= 0 || counts.counts.empty())
    throw std::invalid_argument("expectation: empty counts");
  double e = 0.0;
  for (const auto& [b, c] : counts.counts) {
    auto it = obs.weights.find(b);
    if (it != obs.weights.end())
      e += it->second * static_cast<double>(c) /
           static_cast<double>(counts.shots);
  }
  return e;
}

}  // namespace qtsim::qcore
