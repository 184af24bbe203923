#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qtsim/qcore/circuit.hpp"
#include "qtsim/qcore/sampling.hpp"
#include "qtsim/transpile/chip.hpp"

namespace qtsim::multiprog {

using qcore::Circuit;
using qcore::CountsDistribution;
using qcore::Gate;
using transpile::ChipModel;

struct Assignment {
  int circuit = 0;            // index into the packed circuit list
  std::vector<int> physical;  // acquired chip qubits, acquisition order
  std::vector<int> map;       // virtual -> physical
};

struct PackingPlan {
  int buffer = 2;
  std::vector<Assignment> assignments;  // sorted by circuit index
};

struct UtilizationReport {
  int qubits_used = 0;
  int chip_size = 0;
  int circuits = 0;
  double utilization = 0.0;
};

namespace detail {

inline int graph_distance(const ChipModel& chip, int a, int b) {
  if (a == b) return 0;
  auto path = chip.shortest_path(a, b);
  return path.empty() ? -1 : static_cast<int>(path.size()) - 1;
}

/// Minimum distance from q to any qubit already owned by another region;
/// -1 when there is none (disconnected counts as infinitely far).
inline bool far_enough(const ChipModel& chip, int q,
                       const std::vector<std::vector<int>>& regions,
                       int buffer) {
  for (const auto& region : regions)
    for (int r : region) {
      int d = graph_distance(chip, q, r);
      if (d >= 0 && d < buffer) return false;
    }
  return true;
}

/// Grows a connected region of the requested size starting from `start`,
/// always taking the lowest-index legal frontier qubit.
inline std::vector<int> grow_region(const ChipModel& chip, int start,
                                    int size, const std::vector<char>& taken,
                                    const std::vector<std::vector<int>>& others,
                                    int buffer) {
  auto adj = chip.adjacency();
  std::vector<int> region{start};
  std::vector<char> inside(chip.num_qubits, 0);
  inside[start] = 1;
  while (static_cast<int>(region.size()) < size) {
    int best = -1;
    for (int q : region)
      for (int nb : adj[q]) {
        if (inside[nb] || taken[nb]) continue;
        if (!far_enough(chip, nb, others, buffer)) continue;
        if (best < 0 || nb < best) best = nb;
      }
    if (best < 0) return {};
    region.push_back(best);
    inside[best] = 1;
  }
  return region;
}

}  // namespace detail

/// Greedy deterministic packing: circuits in width-descending order (ties by
/// original position), each placed on the connected region grown from the
/// lowest-index qubit that keeps every region pair at graph distance >=
/// buffer.
inline PackingPlan pack(const std::vector<Circuit>& circuits,
                        const ChipModel& chip, int buffer = 2) {
  if (circuits.empty()) throw std::invalid_argument("nothing to pack");
  if (buffer < 1) throw std::invalid_argument("buffer must be >= 1");
  std::vector<int> order(circuits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return circuits[a].num_qubits > circuits[b].num_qubits;
  });

  std::vector<char> taken(chip.num_qubits, 0);
  std::vector<std::vector<int>> regions;
  PackingPlan plan;
  plan.buffer = buffer;
  for (int idx : order) {
    const int width = circuits[idx].num_qubits;
    std::vector<int> region;
    for (int start = 0; start < chip.num_qubits && region.empty(); ++start) {
      if (taken[start]) continue;
      if (!detail::far_enough(chip, start, regions, buffer)) continue;
      region =
          detail::grow_region(chip, start, width, taken, regions, buffer);
    }
    if (region.empty())
      throw std::runtime_error("packing infeasible: circuit " +
                               std::to_string(idx) + " cannot be placed");
    for (int q : region) taken[q] = 1;
    regions.push_back(region);
    Assignment a;
    a.circuit = idx;
    a.physical = region;
    a.map = region;  // virtual i -> i-th acquired qubit
    plan.assignments.push_back(std::move(a));
  }
  std::sort(plan.assignments.begin(), plan.assignments.end(),
            [](const Assignment& a, const Assignment& b) {
              return a.circuit < b.circuit;
            });
  return plan;
}

/// Recomputes the buffer guarantee from scratch (used by tests and the
/// acceptance suite, not trusted from construction).
inline bool verify_buffer(const PackingPlan& plan, const ChipModel& chip) {
  for (std::size_t i = 0; i < plan.assignments.size(); ++i)
    for (std::size_t j = i + 1; j < plan.assignments.size(); ++j)
      for (int a : plan.assignments[i].physical)
        for (int b : plan.assignments[j].physical) {
          int d = detail::graph_distance(chip, a, b);
          if (d >= 0 && d < plan.buffer) return false;
        }
  return true;
}

inline UtilizationReport utilization(const PackingPlan& plan,
                                     const ChipModel& chip) {
  UtilizationReport r;
  r.chip_size = chip.num_qubits;
  r.circuits = static_cast<int>(plan.assignments.size());
  for (const auto& a : plan.assignments)
    r.qubits_used += static_cast<int>(a.physical.size());
  r.utilization = static_cast<double>(r.qubits_used) /
                  static_cast<double>(r.chip_size);
  return r;
}

/// Single combined circuit over the whole chip; classical bits are the
/// concatenation of the sub-circuits' bits in circuit order.
inline Circuit merge(const std::vector<Circuit>& circuits,
                     const PackingPlan& plan, const ChipModel& chip) {
  if (plan.assignments.size() != circuits.size())
    throw std::invalid_argument("plan does not cover all circuits");
  int total_clbits = 0;
  for (const Circuit& c : circuits) total_clbits += c.num_clbits;
  Circuit merged(chip.num_qubits, total_clbits);
  int clbit_offset = 0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Assignment& a = plan.assignments[i];
    if (a.circuit != static_cast<int>(i) ||
        static_cast<int>(a.map.size()) != circuits[i].num_qubits)
      throw std::invalid_argument("plan/circuit mismatch");
    for (const Gate& g : circuits[i].gates) {
      Gate m = g;
      for (int& q : m.qubits) q = a.map[q];
      for (int& q : m.controls) q = a.map[q];
      if (m.kind == qcore::GateKind::MEASURE) m.clbit += clbit_offset;
      merged.add(std::move(m));
    }
    clbit_offset += circuits[i].num_clbits;
  }
  return merged;
}

/// Marginalizes combined clbit-keyed counts back onto each sub-circuit's
/// classical bits.
inline std::vector<CountsDistribution> split_counts(
    const CountsDistribution& counts, const std::vector<Circuit>& circuits,
    const PackingPlan& plan) {
  if (plan.assignments.size() != circuits.size())
    throw std::invalid_argument("plan does not cover all circuits");
  int total_clbits = 0;
  for (const Circuit& c : circuits) total_clbits += c.num_clbits;
  std::vector<CountsDistribution> out(circuits.size());
  for (auto& d : out) d.shots = counts.shots;
  for (const auto& [key, c] : counts.counts) {
    if (static_cast<int>(key.size()) != total_clbits)
      throw std::invalid_argument("counts width mismatch");
    std::uint64_t idx = qcore::index_of_bitstring(key);
    int offset = 0;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      const int nc = circuits[i].num_clbits;
      const std::uint64_t mask = (std::uint64_t{1} << nc) - 1;
      out[i].counts[qcore::bitstring_of((idx >> offset) & mask, nc)] += c;
      offset += nc;
    }
  }
  return out;
}

/// Restriction of a merged circuit to the qubits any gate touches, for
/// simulating wide-chip runs without the full register. Returns the compact
/// circuit and, per compact qubit, the chip qubit it stands for.
struct CompactCircuit {
  Circuit circuit;
  std::vector<int> chip_qubit;  // compact index -> original index
};

inline CompactCircuit compact(const Circuit& circuit) {
  std::set<int> used;
  for (const Gate& g : circuit.gates) {
    used.insert(g.qubits.begin(), g.qubits.end());
    used.insert(g.controls.begin(), g.controls.end());
  }
  if (used.empty()) used.insert(0);
  CompactCircuit out;
  out.chip_qubit.assign(used.begin(), used.end());
  std::map<int, int> to_compact;
  for (std::size_t i = 0; i < out.chip_qubit.size(); ++i)
    to_compact[out.chip_qubit[i]] = static_cast<int>(i);
  out.circuit = Circuit(static_cast<int>(out.chip_qubit.size()),
                        circuit.num_clbits);
  out.circuit.metadata = circuit.metadata;
  for (const Gate& g : circuit.gates) {
    Gate m = g;
    for (int& q : m.qubits) q = to_compact[q];
    for (int& q : m.controls) q = to_compact[q];
    out.circuit.add(std::move(m));
  }
  return out;
}

inline qcore::json to_json(const PackingPlan& plan) {
  qcore::json assignments = qcore::json::array();
  for (const auto& a : plan.assignments) {
    qcore::json map = qcore::json::object();
    for (std::size_t v = 0; v < a.map.size(); ++v)
      map[std::to_string(v)] = a.map[v];
    assignments.push_back({{"circuit", a.circuit},
                           {"physical", a.physical},
                           {"map", std::move(map)}});
  }
  return qcore::json{{"buffer", plan.buffer},
                     {"assignments", std::move(assignments)}};
}

inline qcore::json to_json(const UtilizationReport& r) {
  return qcore::json{{"qubits_used", r.qubits_used},
                     {"chip_size", r.chip_size},
                     {"circuits", r.circuits},
                     {"utilization", r.utilization}};
}

}  // namespace qtsim::multiprog
