#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qtsim/qcore/density.hpp"
#include "qtsim/qcore/json_io.hpp"
#include "qtsim/qcore/sampling.hpp"
#include "qtsim/qcore/statevector.hpp"

using namespace qtsim::qcore;

namespace {

Circuit random_circuit(int n, int num_gates, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 7);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  Circuit c(n);
  while (c.gate_count() < num_gates) {
    int q = qubit(rng);
    int r = qubit(rng);
    if (r == q) r = (q + 1) % n;
    switch (kind(rng)) {
      case 0: c.add(g_x(q)); break;
      case 1: c.add(g_sx(q)); break;
      case 2: c.add(g_h(q)); break;
      case 3: c.add(g_rz(angle(rng), q)); break;
      case 4: c.add(g_p(angle(rng), q)); break;
      case 5: c.add(g_cx(q, r)); break;
      case 6: c.add(g_cz(q, r)); break;
      default: c.add(g_cp(angle(rng), q, r)); break;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("every gate matrix is unitary") {
  std::vector<Gate> gates = {
      g_x(0), g_sx(0), g_h(0), g_rz(0.7, 0), g_p(-1.3, 0),
      g_cx(0, 1), g_cz(0, 1), g_cp(2.1, 0, 1), g_swap(0, 1),
      g_diag({0, 1, 2}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8})};
  for (const Gate& g : gates) {
    Mat u = g.matrix();
    Mat err = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
    CHECK(err.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("H on |0> gives uniform superposition") {
  Circuit c(1);
  c.add(g_h(0));
  StateVector sv = simulate_statevector(c);
  CHECK(std::abs(sv.amps(0) - cx(1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(sv.amps(1) - cx(1.0 / std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("empty circuit preserves the input state") {
  Circuit c(2);
  Vec a(4);
  a << 0.5, cx(0, 0.5), -0.5, cx(0, -0.5);
  StateVector in(2, a);
  StateVector out = simulate_statevector(c, in);
  CHECK((out.amps - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CX creates a Bell state, little-endian") {
  // (|00> + |10>)/sqrt2 has qubit 0 in superposition: indices 0 and 1.
  Circuit c(2);
  Vec a = Vec::Zero(4);
  a(0) = a(1) = 1.0 / std::sqrt(2.0);
  StateVector out = simulate_statevector(Circuit(2).add(g_cx(0, 1)),
                                         StateVector(2, a));
  CHECK(std::abs(out.amps(0) - cx(1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(out.amps(3) - cx(1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(out.amps(1)) < 1e-12);
  CHECK(std::abs(out.amps(2)) < 1e-12);
}

TEST_CASE("random circuits preserve the norm") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + static_cast<int>(rng() % 5);  // up to 6
    Circuit c = random_circuit(n, 100, rng);
    StateVector sv = simulate_statevector(c);
    CHECK(std::abs(sv.norm2() - 1.0) < 1e-10);
  }
}

TEST_CASE("simulate_statevector rejects bad inputs") {
  Circuit c(1, 1);
  c.add(g_measure(0, 0));
  CHECK_THROWS(simulate_statevector(c));
  Vec bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS(simulate_statevector(Circuit(1), StateVector(1, bad)));
}

TEST_CASE("measurement is terminal per qubit") {
  Circuit c(1, 1);
  c.add(g_measure(0, 0));
  CHECK_THROWS(c.add(g_x(0)));
}

TEST_CASE("zero-noise density equals the pure-state projector") {
  std::mt19937_64 rng(7);
  Circuit c = random_circuit(3, 30, rng);
  DensityMatrix dm = simulate_density(c, NoiseModel::ideal());
  StateVector sv = simulate_statevector(c);
  Mat proj = sv.amps * sv.amps.adjoint();
  CHECK((dm.rho - proj).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full depolarizing after X gives the maximally mixed state") {
  NoiseModel noise;
  noise.p1 = 1.0;
  Circuit c(1);
  c.add(g_x(0));
  DensityMatrix dm = simulate_density(c, noise);
  CHECK(std::abs(dm.rho(0, 0).real() - 0.5) < 1e-12);
  CHECK(std::abs(dm.rho(1, 1).real() - 0.5) < 1e-12);
  CHECK(std::abs(dm.rho(0, 1)) < 1e-12);
}

TEST_CASE("H-H with p1=0.1 matches the superoperator oracle") {
  // Frozen from the explicit 4x4 superoperator product:
  // D(0.1) . S_H . D(0.1) . S_H applied to |0><0| gives
  // diagonal (0.905, 0.095).
  NoiseModel noise;
  noise.p1 = 0.1;
  Circuit c(1);
  c.add(g_h(0)).add(g_h(0));
  DensityMatrix dm = simulate_density(c, noise);
  CHECK(std::abs(dm.rho(0, 0).real() - 0.905) < 1e-12);
  CHECK(std::abs(dm.rho(1, 1).real() - 0.095) < 1e-12);

  // The oracle itself, kept independent: vectorized rho, column-major.
  auto superop_h = [] {
    Mat h = detail::matrix_h();
    Mat s = Mat::Zero(4, 4);
    for (int r1 = 0; r1 < 2; ++r1)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int r2 = 0; r2 < 2; ++r2)
          for (int c2 = 0; c2 < 2; ++c2)
            s(r2 + 2 * c2, r1 + 2 * c1) = h(r2, r1) * std::conj(h(c2, c1));
    return s;
  }();
  Mat depol = Mat::Zero(4, 4);
  // (1-p) id + p * |I/2)(tr|
  depol(0, 0) = depol(3, 3) = 1.0 - 0.1;
  depol(1, 1) = depol(2, 2) = 1.0 - 0.1;
  depol(0, 0) += 0.1 * 0.5;
  depol(3, 3) += 0.1 * 0.5;
  depol(0, 3) += 0.1 * 0.5;
  depol(3, 0) += 0.1 * 0.5;
  Vec rho0 = Vec::Zero(4);
  rho0(0) = 1.0;
  Vec out = depol * superop_h * depol * superop_h * rho0;
  CHECK(std::abs(out(0).real() - 0.905) < 1e-12);
  CHECK(std::abs(out(3).real() - 0.095) < 1e-12);
}

TEST_CASE("noise channels preserve the trace") {
  std::mt19937_64 rng(11);
  NoiseModel noise;
  noise.p1 = 0.05;
  noise.p2 = 0.2;
  Circuit c = random_circuit(4, 40, rng);
  DensityMatrix dm = simulate_density(c, noise);
  CHECK(std::abs(dm.trace_real() - 1.0) < 1e-10);
  CHECK((dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("density simulation rejects oversized circuits") {
  CHECK_THROWS(simulate_density(Circuit(11), NoiseModel::ideal()));
}

TEST_CASE("sampling a basis state is deterministic") {
  Vec a = Vec::Zero(4);
  a(2) = 1.0;  // |10>: qubit1=1, qubit0=0
  CountsDistribution counts = sample_counts(StateVector(2, a), 100, 1234);
  REQUIRE(counts.counts.size() == 1);
  CHECK(counts.counts.at("10") == 100);
}

TEST_CASE("uniform state sampling stays within binomial bounds") {
  Circuit c(2);
  c.add(g_h(0)).add(g_h(1));
  StateVector sv = simulate_statevector(c);
  CountsDistribution counts = sample_counts(sv, 4000, 99);
  double sigma = std::sqrt(4000 * 0.25 * 0.75);
  for (const auto& [k, v] : counts.counts)
    CHECK(std::abs(static_cast<double>(v) - 1000.0) < 5 * sigma);
}

TEST_CASE("readout flips follow the confusion factors") {
  StateVector sv(1);  // |0>
  auto readout = NoiseModel::symmetric_readout(1, 0.1).readout;
  CountsDistribution counts = sample_counts(sv, 100000, readout, 5);
  double frac1 = static_cast<double>(counts.counts["1"]) / 100000.0;
  CHECK(frac1 > 0.094);
  CHECK(frac1 < 0.106);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  Circuit c(3);
  c.add(g_h(0)).add(g_cx(0, 1)).add(g_h(2));
  StateVector sv = simulate_statevector(c);
  CountsDistribution a = sample_counts(sv, 5000, 77);
  CountsDistribution b = sample_counts(sv, 5000, 77);
  CHECK(a.counts == b.counts);
  CountsDistribution other = sample_counts(sv, 5000, 78);
  CHECK(a.counts != other.counts);
}

TEST_CASE("expectation over counts") {
  CountsDistribution counts;
  counts.shots = 4000;
  counts.counts["10"] = 4000;
  CHECK(expectation(counts, Observable::indicator("10")) == 1.0);

  counts.counts["10"] = 2000;
  counts.counts["00"] = 2000;
  CHECK(expectation(counts, Observable::indicator("10")) == 0.5);

  // Table-2-style executor counts with P("10") = 0.802.
  CountsDistribution run;
  run.shots = 1000;
  run.counts["10"] = 802;
  run.counts["00"] = 198;
  CHECK(std::abs(expectation(run, Observable::indicator("10")) - 0.802) < 1e-12);
}

TEST_CASE("partial trace of a product basis state") {
  Vec a = Vec::Zero(4);
  a(1) = 1.0;  // |01>: qubit0 = 1
  DensityMatrix dm = DensityMatrix::from_statevector(StateVector(2, a));
  DensityMatrix red = partial_trace(dm, {0});
  CHECK(std::abs(red.rho(1, 1).real() - 1.0) < 1e-12);
  CHECK(std::abs(red.rho(0, 0)) < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  Vec a = Vec::Zero(4);
  a(0) = a(3) = 1.0 / std::sqrt(2.0);
  DensityMatrix dm = DensityMatrix::from_statevector(StateVector(2, a));
  DensityMatrix red = partial_trace(dm, {0});
  CHECK((red.rho - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace recovers tensor factors") {
  std::mt19937_64 rng(3);
  auto random_pure = [&](int n) {
    Vec a(Eigen::Index{1} << n);
    std::normal_distribution<double> gauss;
    for (Eigen::Index k = 0; k < a.size(); ++k)
      a(k) = cx(gauss(rng), gauss(rng));
    a.normalize();
    return a;
  };
  for (int rep = 0; rep < 5; ++rep) {
    Vec a = random_pure(1);
    Vec b = random_pure(2);
    // qubit 0 = factor a, qubits 1,2 = factor b
    Vec full(8);
    for (int ib = 0; ib < 4; ++ib)
      for (int ia = 0; ia < 2; ++ia) full(2 * ib + ia) = a(ia) * b(ib);
    DensityMatrix dm = DensityMatrix::from_statevector(StateVector(3, full));
    Mat ra = a * a.adjoint();
    Mat rb = b * b.adjoint();
    CHECK((partial_trace(dm, {0}).rho - ra).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((partial_trace(dm, {1, 2}).rho - rb).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(partial_trace(dm, {0}).trace_real() - 1.0) < 1e-10);
  }
}

TEST_CASE("partial trace rejects bad keep lists") {
  DensityMatrix dm(2);
  CHECK_THROWS(partial_trace(dm, {}));
  CHECK_THROWS(partial_trace(dm, {0, 0}));
  CHECK_THROWS(partial_trace(dm, {2}));
}

TEST_CASE("circuit JSON round trip") {
  Circuit c(3, 3);
  c.metadata["label"] = "time_evo";
  c.add(g_h(0)).add(g_cp(0.4, 0, 2)).add(g_diag({1, 2}, {0, 0.3, 0, 0}));
  c.add(g_measure(0, 0)).add(g_measure(2, 1));
  Circuit back = circuit_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  Mat u1 = circuit_unitary(c.unitary_part());
  Mat u2 = circuit_unitary(back.unitary_part());
  CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-14);
}
