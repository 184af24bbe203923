#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qtsim/qcore/circuit.hpp"
#include "qtsim/transpile/chip.hpp"

namespace qtsim::transpile {

using qcore::Circuit;
using qcore::Gate;
using qcore::GateKind;

/// Injective virtual -> physical placement with its error score (lower is
/// better).
struct Layout {
  std::vector<int> mapping;
  double score = 0.0;
};

struct BasisSet {
  std::set<GateKind> allowed;

  static BasisSet native() {
    return BasisSet{{GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX}};
  }
  bool contains(GateKind k) const { return allowed.count(k) != 0; }
  void validate() const {
    if (!contains(GateKind::CX))
      throw std::invalid_argument("basis lacks a two-qubit entangler");
    if (!contains(GateKind::RZ) || !contains(GateKind::SX))
      throw std::invalid_argument("basis lacks one-qubit generators");
  }
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

/// Phase polynomial of a diagonal gate in the parity basis. For phases f(x)
/// the Walsh coefficients c_S = 2^-m * sum_x f(x) (-1)^{x.S} reproduce
/// f(x) = sum_S c_S (-1)^{x.S}; each nonempty S becomes a CX parity chain
/// plus one RZ, and S = empty set is a global phase that is dropped.
inline void expand_diag(const Gate& g, Circuit& out) {
  const int m = static_cast<int>(g.qubits.size());
  const std::size_t dim = std::size_t{1} << m;
  std::vector<double> coeff(dim, 0.0);
  for (std::size_t s = 0; s < dim; ++s) {
    double acc = 0.0;
    for (std::size_t x = 0; x < dim; ++x) {
      int par = std::popcount(x & s) & 1;
      acc += (par ? -1.0 : 1.0) * g.phases[x];
    }
    coeff[s] = acc / static_cast<double>(dim);
  }
  for (std::size_t s = 1; s < dim; ++s) {
    if (std::abs(coeff[s]) < 1e-14) continue;
    std::vector<int> members;
    for (int b = 0; b < m; ++b)
      if (s & (std::size_t{1} << b)) members.push_back(g.qubits[b]);
    const int target = members.back();
    for (std::size_t i = 0; i + 1 < members.size(); ++i)
      out.add(qcore::g_cx(members[i], target));
    // RZ(theta) contributes exp(-i theta (1-2p)/2) on parity p; matching
    // exp(i c_S (-1)^{x.S}) needs theta = -2 c_S.
    out.add(qcore::g_rz(-2.0 * coeff[s], target));
    for (std::size_t i = members.size() - 1; i-- > 0;)
      out.add(qcore::g_cx(members[i], target));
  }
}

}  // namespace detail

/// Expands composite gates until only named 1- and 2-qubit gates (plus
/// measurements) remain. Gates carrying extra controls are simulator-only and
/// rejected here.
inline Circuit decompose(const Circuit& circuit) {
  Circuit out(circuit.num_qubits, circuit.num_clbits);
  out.metadata = circuit.metadata;
  for (const Gate& g : circuit.gates) {
    if (!g.controls.empty())
      throw std::invalid_argument(
          "decompose: multi-controlled gates are not expandable");
    if (g.kind == GateKind::DIAG) {
      if (g.qubits.size() == 1) {
        // diag(e^{ia}, e^{ib}) = global phase * P(b - a).
        const double delta = g.phases[1] - g.phases[0];
        if (std::abs(detail::wrap_angle(delta)) > 1e-14)
          out.add(qcore::g_p(delta, g.qubits[0]));
      } else {
        detail::expand_diag(g, out);
      }
    } else {
      out.add(g);
    }
  }
  return out;
}

struct LayoutStrategy {
  enum class Kind { trivial, scored } kind = Kind::scored;
  int max_candidates = 1000;

  static LayoutStrategy trivial() { return {Kind::trivial, 0}; }
  static LayoutStrategy scored(int k = 1000) { return {Kind::scored, k}; }
};

namespace detail {

inline double score_layout(const Circuit& circuit, const ChipModel& chip,
                           const std::vector<int>& mapping) {
  const double swap_penalty = 3.0 * chip.worst_cx_error();
  double score = 0.0;
  for (const Gate& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::MEASURE:
        score += chip.readout_error(mapping[g.qubits[0]]);
        break;
      case GateKind::RZ:
        break;  // virtual rotation, error-free
      case GateKind::X:
      case GateKind::SX:
      case GateKind::H:
      case GateKind::P:
        score += chip.one_qubit_error(
            g.kind == GateKind::X ? "x" : "sx", mapping[g.qubits[0]]);
        break;
      default: {
        const int a = mapping[g.qubits[0]];
        const int b = mapping[g.qubits[1]];
        score += chip.adjacent(a, b) ? chip.cx_error(a, b) : swap_penalty;
        break;
      }
    }
  }
  return score;
}

/// Virtual qubits ordered by interaction degree, then BFS over the
/// interaction graph, so connected placements can be grown greedily.
inline std::vector<int> virtual_order(const Circuit& circuit) {
  const int n = circuit.num_qubits;
  std::vector<std::set<int>> nbr(n);
  for (const Gate& g : circuit.gates)
    if (g.qubits.size() == 2) {
      nbr[g.qubits[0]].insert(g.qubits[1]);
      nbr[g.qubits[1]].insert(g.qubits[0]);
    }
  std::vector<int> order;
  std::vector<char> placed(n, 0);
  while (static_cast<int>(order.size()) < n) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!placed[v] &&
          (best < 0 || nbr[v].size() > nbr[best].size()))
        best = v;
    std::vector<int> queue{best};
    placed[best] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      order.push_back(queue[i]);
      for (int w : nbr[queue[i]])
        if (!placed[w]) {
          placed[w] = 1;
          queue.push_back(w);
        }
    }
  }
  return order;
}

inline void enumerate_placements(const std::vector<int>& order,
                                 const std::vector<std::vector<int>>& adj,
                                 std::vector<int>& phys_of_pos,
                                 std::vector<char>& used, int limit,
                                 std::vector<std::vector<int>>& out) {
  if (static_cast<int>(out.size()) >= limit) return;
  const std::size_t pos = phys_of_pos.size();
  if (pos == order.size()) {
    out.push_back(phys_of_pos);
    return;
  }
  std::vector<int> candidates;
  if (pos == 0) {
    candidates.resize(used.size());
    std::iota(candidates.begin(), candidates.end(), 0);
  } else {
    std::set<int> frontier;
    for (int p : phys_of_pos)
      for (int nb : adj[p])
        if (!used[nb]) frontier.insert(nb);
    candidates.assign(frontier.begin(), frontier.end());
  }
  for (int p : candidates) {
    if (used[p]) continue;
    used[p] = 1;
    phys_of_pos.push_back(p);
    enumerate_placements(order, adj, phys_of_pos, used, limit, out);
    phys_of_pos.pop_back();
    used[p] = 0;
    if (static_cast<int>(out.size()) >= limit) return;
  }
}

}  // namespace detail

inline Layout choose_layout(const Circuit& circuit, const ChipModel& chip,
                            const LayoutStrategy& strategy) {
  if (circuit.num_qubits > chip.num_qubits)
    throw std::invalid_argument("circuit wider than chip");
  if (strategy.kind == LayoutStrategy::Kind::trivial) {
    Layout l;
    l.mapping.resize(circuit.num_qubits);
    std::iota(l.mapping.begin(), l.mapping.end(), 0);
    l.score = detail::score_layout(circuit, chip, l.mapping);
    return l;
  }
  const std::vector<int> order = detail::virtual_order(circuit);
  const auto adj = chip.adjacency();
  std::vector<std::vector<int>> placements;
  std::vector<int> scratch;
  std::vector<char> used(chip.num_qubits, 0);
  detail::enumerate_placements(order, adj, scratch, used,
                               std::max(1, strategy.max_candidates),
                               placements);
  if (placements.empty())
    throw std::runtime_error("no connected placement found");
  std::optional<Layout> best;
  for (const auto& placement : placements) {
    Layout l;
    l.mapping.resize(circuit.num_qubits);
    for (std::size_t i = 0; i < order.size(); ++i)
      l.mapping[order[i]] = placement[i];
    l.score = detail::score_layout(circuit, chip, l.mapping);
    if (!best || l.score < best->score ||
        (l.score == best->score && l.mapping < best->mapping))
      best = l;
  }
  return *best;
}

/// Routed circuit lives on physical qubit indices; `perm` is the final
/// virtual -> physical map after all inserted SWAPs.
struct Routed {
  Circuit circuit;
  std::vector<int> perm;
};

inline Routed route(const Circuit& circuit, const Layout& layout,
                    const ChipModel& chip) {
  if (static_cast<int>(layout.mapping.size()) != circuit.num_qubits)
    throw std::invalid_argument("layout does not match circuit width");
  Routed out;
  out.circuit = Circuit(chip.num_qubits, std::max(circuit.num_clbits, 0));
  out.circuit.metadata = circuit.metadata;
  std::vector<int> phys = layout.mapping;  // virtual -> physical
  for (const Gate& g : circuit.gates) {
    if (!g.controls.empty())
      throw std::invalid_argument("route: decompose first");
    if (g.qubits.size() == 1) {
      Gate m = g;
      m.qubits[0] = phys[g.qubits[0]];
      out.circuit.add(std::move(m));
      continue;
    }
    if (g.qubits.size() != 2)
      throw std::invalid_argument("route: gates wider than 2 qubits remain");
    int a = phys[g.qubits[0]];
    int b = phys[g.qubits[1]];
    if (!chip.adjacent(a, b)) {
      std::vector<int> path = chip.shortest_path(a, b);
      if (path.empty())
        throw std::runtime_error("routing impossible: disconnected chip");
      for (std::size_t i = 0; i + 2 < path.size(); ++i) {
        out.circuit.add(qcore::g_swap(path[i], path[i + 1]));
        for (int& p : phys)
          if (p == path[i])
            p = path[i + 1];
          else if (p == path[i + 1])
            p = path[i];
      }
      a = phys[g.qubits[0]];
      b = phys[g.qubits[1]];
    }
    Gate m = g;
    m.qubits = {a, b};
    out.circuit.add(std::move(m));
  }
  out.perm = phys;
  return out;
}

namespace detail {

inline void add_h(Circuit& out, int q, const BasisSet& basis) {
  if (basis.contains(GateKind::H)) {
    out.add(qcore::g_h(q));
  } else {
    out.add(qcore::g_rz(M_PI / 2, q));
    out.add(qcore::g_sx(q));
    out.add(qcore::g_rz(M_PI / 2, q));
  }
}

/// CX with the stored direction legal on the chip; reverses via H
/// conjugation when only the opposite direction exists.
inline void add_cx(Circuit& out, int c, int t, const BasisSet& basis,
                   const ChipModel* chip) {
  if (chip == nullptr || chip->allows(c, t)) {
    out.add(qcore::g_cx(c, t));
    return;
  }
  if (!chip->allows(t, c))
    throw std::runtime_error("two-qubit gate off the coupling graph");
  add_h(out, c, basis);
  add_h(out, t, basis);
  out.add(qcore::g_cx(t, c));
  add_h(out, c, basis);
  add_h(out, t, basis);
}

inline void add_cp(Circuit& out, int a, int b, double theta,
                   const BasisSet& basis, const ChipModel* chip) {
  out.add(qcore::g_rz(theta / 2, a));
  add_cx(out, a, b, basis, chip);
  out.add(qcore::g_rz(-theta / 2, b));
  add_cx(out, a, b, basis, chip);
  out.add(qcore::g_rz(theta / 2, b));
}

}  // namespace detail

/// Rewrites every gate into the basis set, fixing CX directions against the
/// chip when one is supplied. Composite (DIAG / controlled) gates must be
/// decomposed beforehand.
inline Circuit translate(const Circuit& circuit, const BasisSet& basis,
                         const ChipModel* chip = nullptr) {
  basis.validate();
  Circuit out(circuit.num_qubits, circuit.num_clbits);
  out.metadata = circuit.metadata;
  for (const Gate& g : circuit.gates) {
    if (!g.controls.empty() || g.kind == GateKind::DIAG)
      throw std::invalid_argument("translate: decompose first");
    switch (g.kind) {
      case GateKind::MEASURE:
      case GateKind::RZ:
      case GateKind::SX:
        out.add(g);
        break;
      case GateKind::X:
        if (basis.contains(GateKind::X)) {
          out.add(g);
        } else {
          out.add(qcore::g_sx(g.qubits[0]));
          out.add(qcore::g_sx(g.qubits[0]));
        }
        break;
      case GateKind::H:
        detail::add_h(out, g.qubits[0], basis);
        break;
      case GateKind::P:
        out.add(qcore::g_rz(g.params[0], g.qubits[0]));
        break;
      case GateKind::CX:
        detail::add_cx(out, g.qubits[0], g.qubits[1], basis, chip);
        break;
      case GateKind::CZ:
        detail::add_cp(out, g.qubits[0], g.qubits[1], M_PI, basis, chip);
        break;
      case GateKind::CP:
        detail::add_cp(out, g.qubits[0], g.qubits[1], g.params[0], basis,
                       chip);
        break;
      case GateKind::SWAP: {
        const int a = g.qubits[0];
        const int b = g.qubits[1];
        detail::add_cx(out, a, b, basis, chip);
        detail::add_cx(out, b, a, basis, chip);
        detail::add_cx(out, a, b, basis, chip);
        break;
      }
      case GateKind::DIAG:
        break;  // unreachable
    }
  }
  return out;
}

namespace detail {

inline bool same_qubit_set(const Gate& a, const Gate& b) {
  std::vector<int> qa = a.qubits, qb = b.qubits;
  std::sort(qa.begin(), qa.end());
  std::sort(qb.begin(), qb.end());
  return qa == qb;
}

inline bool touches(const Gate& g, const std::vector<int>& qs) {
  for (int q : qs) {
    for (int gq : g.qubits)
      if (gq == q) return true;
    for (int gc : g.controls)
      if (gc == q) return true;
  }
  return false;
}

}  // namespace detail

/// One peephole pass: adjacent-inverse cancellation, rotation merging, and
/// SX.SX -> X. Returns true when something changed.
inline bool optimize_pass(std::vector<Gate>& gates) {
  bool changed = false;
  std::vector<char> dead(gates.size(), 0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (dead[i]) continue;
    Gate& a = gates[i];
    if (a.kind == GateKind::MEASURE || !a.controls.empty()) continue;
    // Find the next live gate touching any of a's qubits.
    std::size_t j = i + 1;
    for (; j < gates.size(); ++j)
      if (!dead[j] && detail::touches(gates[j], a.qubits)) break;
    if (j == gates.size()) continue;
    Gate& b = gates[j];
    if (b.kind != a.kind || !b.controls.empty()) continue;
    const bool ordered_match = a.qubits == b.qubits;
    switch (a.kind) {
      case GateKind::X:
      case GateKind::H:
        if (ordered_match) {
          dead[i] = dead[j] = 1;
          changed = true;
        }
        break;
      case GateKind::CX:
        if (ordered_match) {
          dead[i] = dead[j] = 1;
          changed = true;
        }
        break;
      case GateKind::CZ:
      case GateKind::SWAP:
        if (detail::same_qubit_set(a, b)) {
          dead[i] = dead[j] = 1;
          changed = true;
        }
        break;
      case GateKind::SX:
        if (ordered_match) {
          a.kind = GateKind::X;
          dead[j] = 1;
          changed = true;
        }
        break;
      case GateKind::RZ:
      case GateKind::P:
        if (ordered_match) {
          a.params[0] = detail::wrap_angle(a.params[0] + b.params[0]);
          dead[j] = 1;
          if (std::abs(a.params[0]) < 1e-12) dead[i] = 1;
          changed = true;
        }
        break;
      case GateKind::CP:
        if (detail::same_qubit_set(a, b)) {
          a.params[0] = detail::wrap_angle(a.params[0] + b.params[0]);
          dead[j] = 1;
          if (std::abs(a.params[0]) < 1e-12) dead[i] = 1;
          changed = true;
        }
        break;
      default:
        break;
    }
  }
  if (changed) {
    std::vector<Gate> kept;
    kept.reserve(gates.size());
    for (std::size_t i = 0; i < gates.size(); ++i)
      if (!dead[i]) kept.push_back(std::move(gates[i]));
    gates = std::move(kept);
  }
  return changed;
}

/// Fixed-point peephole optimization. Must not be applied to noise-folded
/// circuits: it would cancel the folds right back out.
inline Circuit optimize(const Circuit& circuit) {
  Circuit out = circuit;
  while (optimize_pass(out.gates)) {
  }
  return out;
}

struct PassStats {
  std::string name;
  int gates = 0;
  int depth = 0;
  int two_qubit = 0;
};

struct TranspileReport {
  std::vector<PassStats> passes;
  Layout layout;
  std::vector<int> final_permutation;
  int depth = 0;
  int two_qubit_gates = 0;
};

struct TranspileOptions {
  LayoutStrategy strategy = LayoutStrategy::scored();
  bool run_optimizer = true;
};

struct TranspileResult {
  Circuit circuit;
  Layout layout;
  TranspileReport report;
};

namespace detail {

inline PassStats stats(const std::string& name, const Circuit& c) {
  PassStats s;
  s.name = name;
  s.gates = c.gate_count();
  s.depth = c.depth();
  s.two_qubit = c.two_qubit_gate_count();
  return s;
}

}  // namespace detail

inline TranspileResult transpile_pipeline(
    const Circuit& circuit, const ChipModel& chip, const BasisSet& basis,
    const TranspileOptions& options = {}) {
  TranspileResult result;
  Circuit c = decompose(circuit);
  result.report.passes.push_back(detail::stats("decompose", c));
  result.layout = choose_layout(c, chip, options.strategy);
  Routed routed = route(c, result.layout, chip);
  result.report.passes.push_back(detail::stats("route", routed.circuit));
  c = translate(routed.circuit, basis, &chip);
  result.report.passes.push_back(detail::stats("translate", c));
  if (options.run_optimizer) {
    c = optimize(c);
    result.report.passes.push_back(detail::stats("optimize", c));
  }
  result.circuit = std::move(c);
  result.report.layout = result.layout;
  result.report.final_permutation = routed.perm;
  result.report.depth = result.circuit.depth();
  result.report.two_qubit_gates = result.circuit.two_qubit_gate_count();
  return result;
}

inline qcore::json to_json(const TranspileReport& r) {
  qcore::json passes = qcore::json::array();
  for (const auto& p : r.passes)
    passes.push_back({{"name", p.name},
                      {"gates", p.gates},
                      {"depth", p.depth},
                      {"two_qubit", p.two_qubit}});
  return qcore::json{{"passes", std::move(passes)},
                     {"layout", r.layout.mapping},
                     {"layout_score", r.layout.score},
                     {"final_permutation", r.final_permutation},
                     {"depth", r.depth},
                     {"two_qubit_gates", r.two_qubit_gates}};
}

}  // namespace qtsim::transpile
