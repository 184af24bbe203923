#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "qtsim/multiprog/multiprog.hpp"
#include "qtsim/qcore/statevector.hpp"

using namespace qtsim;
using qcore::Circuit;
using transpile::ChipModel;

namespace {

ChipModel load_chip(const std::string& name) {
  const char* d = std::getenv("QTSIM_DATA_DIR");
  std::ifstream in(std::string(d ? d : "data") + "/chips/" + name + ".json");
  REQUIRE(in.good());
  qcore::json j;
  in >> j;
  return transpile::chip_from_json(j);
}

Circuit bell_pair() {
  Circuit c(2, 2);
  c.add(qcore::g_h(0));
  c.add(qcore::g_cx(0, 1));
  c.add(qcore::g_measure(0, 0));
  c.add(qcore::g_measure(1, 1));
  return c;
}

Circuit basis_prep(const std::vector<int>& ones, int n) {
  Circuit c(n, n);
  for (int q : ones) c.add(qcore::g_x(q));
  for (int q = 0; q < n; ++q) c.add(qcore::g_measure(q, q));
  return c;
}

qcore::CountsDistribution run_counts(const Circuit& c, long long shots,
                                     std::uint64_t seed) {
  auto sv = qcore::simulate_statevector(c.unitary_part());
  auto raw = qcore::sample_counts(sv, shots, seed);
  return qcore::map_counts_to_clbits(raw, c.num_qubits, c.num_clbits,
                                     c.measurement_map());
}

double total_variation(const qcore::CountsDistribution& a,
                       const qcore::CountsDistribution& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a.counts) keys.insert(k);
  for (const auto& [k, v] : b.counts) keys.insert(k);
  double tv = 0.0;
  for (const auto& k : keys) {
    double pa = a.counts.count(k)
                    ? static_cast<double>(a.counts.at(k)) / a.shots
                    : 0.0;
    double pb = b.counts.count(k)
                    ? static_cast<double>(b.counts.at(k)) / b.shots
                    : 0.0;
    tv += std::abs(pa - pb);
  }
  return tv / 2.0;
}

}  // namespace

TEST_CASE("single pair on the seven-qubit chip") {
  ChipModel chip = load_chip("nairobi");
  auto plan = multiprog::pack({bell_pair()}, chip, 2);
  REQUIRE(plan.assignments.size() == 1);
  REQUIRE(plan.assignments[0].physical.size() == 2);
  REQUIRE(chip.adjacent(plan.assignments[0].physical[0],
                        plan.assignments[0].physical[1]));
  auto report = multiprog::utilization(plan, chip);
  REQUIRE(report.qubits_used == 2);
  REQUIRE(report.utilization == Catch::Approx(2.0 / 7.0));
}

TEST_CASE("two pairs on the seven-qubit chip respect the buffer") {
  ChipModel chip = load_chip("nairobi");
  auto plan = multiprog::pack({bell_pair(), bell_pair()}, chip, 2);
  REQUIRE(plan.assignments.size() == 2);
  REQUIRE(multiprog::verify_buffer(plan, chip));
  std::set<int> all;
  for (const auto& a : plan.assignments)
    all.insert(a.physical.begin(), a.physical.end());
  REQUIRE(all.size() == 4);
}

TEST_CASE("five pairs pack onto the large chip") {
  ChipModel chip = load_chip("osaka");
  std::vector<Circuit> circuits(5, bell_pair());
  auto plan = multiprog::pack(circuits, chip, 2);
  REQUIRE(plan.assignments.size() == 5);
  REQUIRE(multiprog::verify_buffer(plan, chip));
  auto report = multiprog::utilization(plan, chip);
  REQUIRE(report.qubits_used == 10);
  REQUIRE(report.chip_size == 127);
  REQUIRE(report.utilization == Catch::Approx(10.0 / 127.0));
}

TEST_CASE("packing is deterministic") {
  ChipModel chip = load_chip("osaka");
  std::vector<Circuit> circuits(3, bell_pair());
  auto p1 = multiprog::pack(circuits, chip, 2);
  auto p2 = multiprog::pack(circuits, chip, 2);
  for (std::size_t i = 0; i < p1.assignments.size(); ++i)
    REQUIRE(p1.assignments[i].physical == p2.assignments[i].physical);
}

TEST_CASE("infeasible packing names the first unplaceable circuit") {
  ChipModel chip = load_chip("nairobi");
  std::vector<Circuit> circuits(4, bell_pair());
  try {
    multiprog::pack(circuits, chip, 2);
    FAIL("expected packing failure");
  } catch (const std::runtime_error& e) {
    REQUIRE(std::string(e.what()).find("circuit") != std::string::npos);
  }
}

TEST_CASE("merge of one circuit is a relabeled original") {
  ChipModel chip = load_chip("nairobi");
  Circuit c = bell_pair();
  auto plan = multiprog::pack({c}, chip, 2);
  Circuit merged = multiprog::merge({c}, plan, chip);
  REQUIRE(merged.num_qubits == 7);
  REQUIRE(merged.gates.size() == c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    REQUIRE(merged.gates[i].kind == c.gates[i].kind);
    for (std::size_t q = 0; q < c.gates[i].qubits.size(); ++q)
      REQUIRE(merged.gates[i].qubits[q] ==
              plan.assignments[0].map[c.gates[i].qubits[q]]);
  }
}

TEST_CASE("merged statevector is the tensor product of the parts") {
  ChipModel chip = load_chip("nairobi");
  Circuit a(2, 0);
  a.add(qcore::g_h(0));
  a.add(qcore::g_cx(0, 1));
  Circuit b(2, 0);
  b.add(qcore::g_x(0));
  b.add(qcore::g_sx(1));
  auto plan = multiprog::pack({a, b}, chip, 2);
  Circuit merged = multiprog::merge({a, b}, plan, chip);
  auto sv = qcore::simulate_statevector(merged);
  auto sva = qcore::simulate_statevector(a);
  auto svb = qcore::simulate_statevector(b);
  // Amplitude of a merged basis state factorizes over the two regions, with
  // buffer qubits pinned to |0>.
  for (Eigen::Index x = 0; x < sv.dim(); ++x) {
    std::uint64_t ia = 0, ib = 0;
    std::uint64_t others = x;
    for (int v = 0; v < 2; ++v) {
      if (x & (Eigen::Index{1} << plan.assignments[0].map[v]))
        ia |= std::uint64_t{1} << v;
      if (x & (Eigen::Index{1} << plan.assignments[1].map[v]))
        ib |= std::uint64_t{1} << v;
      others &= ~(std::uint64_t{1} << plan.assignments[0].map[v]);
      others &= ~(std::uint64_t{1} << plan.assignments[1].map[v]);
    }
    std::complex<double> expect =
        others ? 0.0 : sva.amps(static_cast<Eigen::Index>(ia)) *
                           svb.amps(static_cast<Eigen::Index>(ib));
    REQUIRE(std::abs(sv.amps(x) - expect) < 1e-12);
  }
}

TEST_CASE("no merged gate touches a qubit outside the assignments") {
  ChipModel chip = load_chip("osaka");
  std::vector<Circuit> circuits(4, bell_pair());
  auto plan = multiprog::pack(circuits, chip, 2);
  Circuit merged = multiprog::merge(circuits, plan, chip);
  std::set<int> allowed;
  for (const auto& a : plan.assignments)
    allowed.insert(a.physical.begin(), a.physical.end());
  for (const auto& g : merged.gates)
    for (int q : g.qubits) REQUIRE(allowed.count(q) == 1);
}

TEST_CASE("split of a single-circuit plan returns the counts unchanged") {
  ChipModel chip = load_chip("nairobi");
  Circuit c = bell_pair();
  auto plan = multiprog::pack({c}, chip, 2);
  qcore::CountsDistribution counts;
  counts.shots = 10;
  counts.counts["00"] = 6;
  counts.counts["11"] = 4;
  auto parts = multiprog::split_counts(counts, {c}, plan);
  REQUIRE(parts.size() == 1);
  REQUIRE(parts[0].counts == counts.counts);
}

TEST_CASE("split separates deterministic sub-circuits") {
  ChipModel chip = load_chip("nairobi");
  Circuit a = basis_prep({0}, 2);  // |01>
  Circuit b = basis_prep({1}, 2);  // |10>
  auto plan = multiprog::pack({a, b}, chip, 2);
  Circuit merged = multiprog::merge({a, b}, plan, chip);
  auto compacted = multiprog::compact(merged);
  auto counts = run_counts(compacted.circuit, 500, 3);
  auto parts = multiprog::split_counts(counts, {a, b}, plan);
  REQUIRE(parts[0].counts.at("01") == 500);
  REQUIRE(parts[1].counts.at("10") == 500);
}

TEST_CASE("merged marginals match solo runs statistically") {
  ChipModel chip = load_chip("nairobi");
  Circuit a = bell_pair();
  Circuit b(2, 2);
  b.add(qcore::g_h(0));
  b.add(qcore::g_h(1));
  b.add(qcore::g_measure(0, 0));
  b.add(qcore::g_measure(1, 1));
  auto plan = multiprog::pack({a, b}, chip, 2);
  Circuit merged = multiprog::merge({a, b}, plan, chip);
  auto compacted = multiprog::compact(merged);
  const long long shots = 100000;
  auto combined = run_counts(compacted.circuit, shots, 11);
  auto parts = multiprog::split_counts(combined, {a, b}, plan);
  auto solo_a = run_counts(a, shots, 12);
  auto solo_b = run_counts(b, shots, 13);
  REQUIRE(total_variation(parts[0], solo_a) < 0.02);
  REQUIRE(total_variation(parts[1], solo_b) < 0.02);
  long long sum = 0;
  for (const auto& [k, v] : parts[0].counts) sum += v;
  REQUIRE(sum == shots);
}

TEST_CASE("compact keeps semantics on the touched qubits") {
  ChipModel chip = load_chip("osaka");
  std::vector<Circuit> circuits(2, bell_pair());
  auto plan = multiprog::pack(circuits, chip, 2);
  Circuit merged = multiprog::merge(circuits, plan, chip);
  auto compacted = multiprog::compact(merged);
  REQUIRE(compacted.circuit.num_qubits == 4);
  REQUIRE(compacted.chip_qubit.size() == 4);
  // Compact mapping is sorted, so measurement map survives relabeling.
  auto counts = run_counts(compacted.circuit, 2000, 5);
  for (const auto& [k, v] : counts.counts)
    REQUIRE((k == "0000" || k == "0011" || k == "1100" || k == "1111"));
}

TEST_CASE("plan json uses the documented shape") {
  ChipModel chip = load_chip("nairobi");
  auto plan = multiprog::pack({bell_pair()}, chip, 2);
  auto j = multiprog::to_json(plan);
  REQUIRE(j["buffer"] == 2);
  REQUIRE(j["assignments"].size() == 1);
  REQUIRE(j["assignments"][0].contains("circuit"));
  REQUIRE(j["assignments"][0].contains("physical"));
  REQUIRE(j["assignments"][0]["map"].contains("0"));
}
