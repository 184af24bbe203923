#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qtsim/qcore/json_io.hpp"

namespace qtsim::transpile {

/// Hardware target: coupling graph plus per-gate and per-qubit readout error
/// rates. Edges are stored as (control, target); on a symmetric chip a CX may
/// run either way across an edge, on a directed chip only as stored.
struct ChipModel {
  std::string name;
  int num_qubits = 0;
  bool symmetric = true;
  std::vector<std::pair<int, int>> edges;
  // Keys: "cx:a,b" for two-qubit entries, "sx:q" / "x:q" for one-qubit ones.
  std::map<std::string, double> gate_errors;
  std::vector<double> readout_errors;

  void validate() const {
    if (num_qubits <= 0)
      throw std::invalid_argument("chip must have at least one qubit");
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= num_qubits || b < 0 || b >= num_qubits)
        throw std::invalid_argument("chip edge references invalid qubit");
      if (a == b) throw std::invalid_argument("chip edge is a self-loop");
      if (!seen.insert({a, b}).second)
        throw std::invalid_argument("duplicate chip edge");
    }
    for (const auto& [k, v] : gate_errors)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("gate error rate outside [0,1]: " + k);
    if (!readout_errors.empty() &&
        static_cast<int>(readout_errors.size()) != num_qubits)
      throw std::invalid_argument("readout error list length mismatch");
    for (double r : readout_errors)
      if (r < 0.0 || r > 1.0)
        throw std::invalid_argument("readout error rate outside [0,1]");
  }

  bool has_directed_edge(int a, int b) const {
    for (const auto& [c, t] : edges)
      if (c == a && t == b) return true;
    return false;
  }

  /// True when a two-qubit gate may be scheduled on (a, b) as given.
  bool allows(int a, int b) const {
    return has_directed_edge(a, b) || (symmetric && has_directed_edge(b, a));
  }

  /// True when a and b are coupled in either direction (routing adjacency).
  bool adjacent(int a, int b) const {
    return has_directed_edge(a, b) || has_directed_edge(b, a);
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(num_qubits);
    for (const auto& [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (auto& nb : adj) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return adj;
  }

  /// Shortest undirected path from a to b inclusive; empty if disconnected.
  std::vector<int> shortest_path(int a, int b) const {
    std::vector<int> prev(num_qubits, -1);
    std::vector<char> visited(num_qubits, 0);
    auto adj = adjacency();
    std::deque<int> queue{a};
    visited[a] = 1;
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      if (cur == b) break;
      for (int nb : adj[cur])
        if (!visited[nb]) {
          visited[nb] = 1;
          prev[nb] = cur;
          queue.push_back(nb);
        }
    }
    if (!visited[b]) return {};
    std::vector<int> path{b};
    while (path.back() != a) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  double gate_error(const std::string& key, double fallback) const {
    auto it = gate_errors.find(key);
    return it == gate_errors.end() ? fallback : it->second;
  }

  double one_qubit_error(const std::string& gate, int q) const {
    return gate_error(gate + ":" + std::to_string(q), 0.0);
  }

  /// CX error on (a, b); tries the reverse key too on a symmetric chip.
  double cx_error(int a, int b) const {
    std::string key = "cx:" + std::to_string(a) + "," + std::to_string(b);
    auto it = gate_errors.find(key);
    if (it != gate_errors.end()) return it->second;
    if (symmetric || has_directed_edge(b, a)) {
      key = "cx:" + std::to_string(b) + "," + std::to_string(a);
      it = gate_errors.find(key);
      if (it != gate_errors.end()) return it->second;
    }
    return 0.0;
  }

  double worst_cx_error() const {
    double worst = 0.0;
    for (const auto& [k, v] : gate_errors)
      if (k.rfind("cx:", 0) == 0) worst = std::max(worst, v);
    return worst;
  }

  double readout_error(int q) const {
    return readout_errors.empty() ? 0.0 : readout_errors[q];
  }
};

inline qcore::json to_json(const ChipModel& chip) {
  qcore::json edges = qcore::json::array();
  for (const auto& [a, b] : chip.edges) edges.push_back({a, b});
  qcore::json errs = qcore::json::object();
  for (const auto& [k, v] : chip.gate_errors) errs[k] = v;
  return qcore::json{{"name", chip.name},
                     {"num_qubits", chip.num_qubits},
                     {"symmetric", chip.symmetric},
                     {"edges", std::move(edges)},
                     {"gate_errors", std::move(errs)},
                     {"readout_errors", chip.readout_errors}};
}

inline ChipModel chip_from_json(const qcore::json& j) {
  ChipModel chip;
  chip.name = j.value("name", std::string{});
  chip.num_qubits = j.at("num_qubits").get<int>();
  chip.symmetric = j.at("symmetric").get<bool>();
  for (const auto& e : j.at("edges"))
    chip.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  if (j.contains("gate_errors"))
    for (const auto& [k, v] : j.at("gate_errors").items())
      chip.gate_errors[k] = v.get<double>();
  if (j.contains("readout_errors"))
    chip.readout_errors = j.at("readout_errors").get<std::vector<double>>();
  chip.validate();
  return chip;
}

}  // namespace qtsim::transpile
