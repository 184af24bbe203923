#pragma once

#include <json.hpp>

#include "qtsim/qcore/sampling.hpp"

namespace qtsim::qcore {

using nlohmann::json;

inline json to_json(const Circuit& c) {
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json jg;
    jg["name"] = gate_name(g.kind);
    jg["qubits"] = g.qubits;
    jg["params"] = g.params;
    if (!g.phases.empty()) jg["phases"] = g.phases;
    if (!g.controls.empty()) jg["controls"] = g.controls;
    if (g.kind == GateKind::MEASURE) jg["clbit"] = g.clbit;
    gates.push_back(std::move(jg));
  }
  json meta = json::object();
  for (const auto& [k, v] : c.metadata) meta[k] = v;
  return json{{"num_qubits", c.num_qubits},
              {"num_clbits", c.num_clbits},
              {"gates", std::move(gates)},
              {"metadata", std::move(meta)}};
}

inline Circuit circuit_from_json(const json& j) {
  Circuit c(j.at("num_qubits").get<int>(), j.value("num_clbits", 0));
  if (j.contains("metadata"))
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
      c.metadata[it.key()] = it.value().get<std::string>();
  for (const json& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_name(jg.at("name").get<std::string>());
    g.qubits = jg.at("qubits").get<std::vector<int>>();
    if (jg.contains("params")) g.params = jg["params"].get<std::vector<double>>();
    if (jg.contains("phases")) g.phases = jg["phases"].get<std::vector<double>>();
    if (jg.contains("controls"))
      g.controls = jg["controls"].get<std::vector<int>>();
    if (g.kind == GateKind::MEASURE) g.clbit = jg.at("clbit").get<int>();
    c.add(std::move(g));
  }
  return c;
}

inline json to_json(const CountsDistribution& c) {
  json counts = json::object();
  for (const auto& [k, v] : c.counts) counts[k] = v;
  return json{{"shots", c.shots}, {"counts", std::move(counts)}};
}

inline CountsDistribution counts_from_json(const json& j) {
  CountsDistribution c;
  c.shots = j.at("shots").get<long long>();
  for (auto it = j.at("counts").begin(); it != j.at("counts").end(); ++it)
    c.counts[it.key()] = it.value().get<long long>();
  return c;
}

}  // namespace qtsim::qcore
