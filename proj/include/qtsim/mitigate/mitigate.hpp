#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "qtsim/qcore/circuit.hpp"
#include "qtsim/qcore/json_io.hpp"
#include "qtsim/qcore/sampling.hpp"

namespace qtsim::mitigate {

using qcore::Circuit;
using qcore::CountsDistribution;
using qcore::Gate;
using qcore::GateKind;

// ---------------------------------------------------------------------------
// Zero-noise extrapolation
// ---------------------------------------------------------------------------

struct Extrapolator {
  enum class Kind { richardson, polynomial } kind = Kind::richardson;
  int degree = 1;  // polynomial only

  static Extrapolator richardson() { return {Kind::richardson, 0}; }
  static Extrapolator polynomial(int d) { return {Kind::polynomial, d}; }
  std::string name() const {
    return kind == Kind::richardson
               ? "richardson"
               : "polynomial(" + std::to_string(degree) + ")";
  }
};

struct ZneConfig {
  std::vector<double> scale_factors{1.0, 1.5, 2.0, 2.5, 3.0};
  Extrapolator extrapolator = Extrapolator::richardson();

  void validate() const {
    if (scale_factors.size() < 2)
      throw std::invalid_argument("need at least two scale factors");
    if (std::abs(scale_factors.front() - 1.0) > 1e-12)
      throw std::invalid_argument("first scale factor must be 1.0");
    for (std::size_t i = 0; i < scale_factors.size(); ++i) {
      if (scale_factors[i] < 1.0)
        throw std::invalid_argument("scale factors must be >= 1");
      if (i > 0 && scale_factors[i] <= scale_factors[i - 1] + 1e-12)
        throw std::invalid_argument("scale factors must be strictly ascending");
    }
    if (extrapolator.kind == Extrapolator::Kind::polynomial &&
        (extrapolator.degree < 1 ||
         extrapolator.degree >=
             static_cast<int>(scale_factors.size())))
      throw std::invalid_argument(
          "polynomial degree must be below the number of scale factors");
  }
};

namespace detail {

/// Inverse of a single gate as an equal-length-or-shorter gate list. SX has
/// no one-gate inverse in this gate set, so its folded form uses the exact
/// identity SX.X.X = SX instead of SX.SX^dagger.SX (see fold_local).
inline void append_inverse(const Gate& g, std::vector<Gate>& out) {
  switch (g.kind) {
    case GateKind::X:
    case GateKind::H:
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::SWAP:
      out.push_back(g);
      break;
    case GateKind::RZ:
    case GateKind::P:
    case GateKind::CP: {
      Gate inv = g;
      inv.params[0] = -inv.params[0];
      out.push_back(std::move(inv));
      break;
    }
    case GateKind::DIAG: {
      Gate inv = g;
      for (double& ph : inv.phases) ph = -ph;
      out.push_back(std::move(inv));
      break;
    }
    default:
      throw std::invalid_argument("gate has no folding inverse");
  }
}

}  // namespace detail

/// Local unitary folding: the first d = round(N_g (lambda-1) / 2) gates are
/// each replaced by a three-gate block equal to the original gate, tripling
/// their noise exposure. lambda = 3 folds every gate once. Measurements are
/// not folded and must sit at the end.
inline Circuit fold_local(const Circuit& circuit, double lambda) {
  if (lambda < 1.0) throw std::invalid_argument("scale factor below 1");
  const Circuit body = circuit.unitary_part();
  const auto n_g = static_cast<double>(body.gates.size());
  long long d = std::llround(n_g * (lambda - 1.0) / 2.0);
  d = std::min<long long>(d, body.gates.size());
  Circuit out(circuit.num_qubits, circuit.num_clbits);
  out.metadata = circuit.metadata;
  long long folded = 0;
  for (const Gate& g : circuit.gates) {
    if (g.kind != GateKind::MEASURE && folded < d) {
      ++folded;
      if (g.kind == GateKind::SX) {
        Gate x = g;
        x.kind = GateKind::X;
        out.add(x);
        out.add(x);
        out.add(g);
      } else {
        out.add(g);
        std::vector<Gate> inv;
        detail::append_inverse(g, inv);
        for (Gate& gi : inv) out.add(std::move(gi));
        out.add(g);
      }
    } else {
      out.add(g);
    }
  }
  return out;
}

struct ZneResult {
  double mitigated = 0.0;
  std::vector<std::pair<double, double>> points;  // (lambda, E)
  std::string extrapolator;
};

namespace detail {

inline double lagrange_at_zero(
    const std::vector<std::pair<double, double>>& pts) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double w = pts[i].second;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      const double denom = pts[i].first - pts[j].first;
      if (std::abs(denom) < 1e-12)
        throw std::invalid_argument("degenerate scale factors");
      w *= (0.0 - pts[j].first) / denom;
    }
    acc += w;
  }
  return acc;
}

inline double polyfit_at_zero(
    const std::vector<std::pair<double, double>>& pts, int degree) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd v(m, degree + 1);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      v(i, c) = p;
      p *= pts[i].first;
    }
    y(i) = pts[i].second;
  }
  Eigen::VectorXd coeff = v.colPivHouseholderQr().solve(y);
  return coeff(0);  // value of the fit at lambda = 0
}

}  // namespace detail

inline ZneResult zne_estimate(
    const std::function<double(const Circuit&)>& executor,
    const Circuit& circuit, const ZneConfig& config) {
  config.validate();
  ZneResult result;
  result.extrapolator = config.extrapolator.name();
  for (double lambda : config.scale_factors)
    result.points.emplace_back(lambda,
                               executor(fold_local(circuit, lambda)));
  result.mitigated =
      config.extrapolator.kind == Extrapolator::Kind::richardson
          ? detail::lagrange_at_zero(result.points)
          : detail::polyfit_at_zero(result.points,
                                    config.extrapolator.degree);
  return result;
}

// ---------------------------------------------------------------------------
// Readout error mitigation
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
  int n = 0;
  std::string mode;  // "correlated" or "local"
  Eigen::MatrixXd m;  // m(v, u) = P(measure v | prepared u)

  void validate() const {
    if (m.rows() != m.cols() ||
        m.rows() != (Eigen::Index{1} << n))
      throw std::invalid_argument("confusion matrix dimension mismatch");
    for (Eigen::Index u = 0; u < m.cols(); ++u) {
      double col = 0.0;
      for (Eigen::Index v = 0; v < m.rows(); ++v) {
        if (m(v, u) < -1e-12 || m(v, u) > 1.0 + 1e-12)
          throw std::invalid_argument("confusion entry outside [0,1]");
        col += m(v, u);
      }
      if (std::abs(col - 1.0) > 1e-9)
        throw std::invalid_argument("confusion column does not sum to 1");
    }
  }
};

using CountsExecutor =
    std::function<CountsDistribution(const Circuit&, long long)>;

/// Runs X-gate calibration circuits through the executor. Correlated mode
/// prepares all 2^n basis states; local mode runs two circuits per qubit and
/// assembles the tensor product of the per-qubit 2x2 blocks.
inline ConfusionMatrix build_confusion_matrix(const CountsExecutor& executor,
                                              int n, long long shots,
                                              const std::string& mode) {
  if (shots <= 0) throw std::invalid_argument("calibration needs shots");
  if (n < 1 || n > 20) throw std::invalid_argument("invalid qubit count");
  const Eigen::Index dim = Eigen::Index{1} << n;
  ConfusionMatrix cm;
  cm.n = n;
  cm.mode = mode;

  auto prep = [n](std::uint64_t u) {
    Circuit c(n, n);
    for (int q = 0; q < n; ++q)
      if (u & (std::uint64_t{1} << q)) c.add(qcore::g_x(q));
    for (int q = 0; q < n; ++q) c.add(qcore::g_measure(q, q));
    return c;
  };
  auto column = [&](std::uint64_t u) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(dim);
    CountsDistribution counts = executor(prep(u), shots);
    for (const auto& [key, c] : counts.counts)
      col(static_cast<Eigen::Index>(qcore::index_of_bitstring(key))) +=
          static_cast<double>(c) / static_cast<double>(shots);
    return col;
  };

  if (mode == "correlated") {
    cm.m.resize(dim, dim);
    for (Eigen::Index u = 0; u < dim; ++u)
      cm.m.col(u) = column(static_cast<std::uint64_t>(u));
  } else if (mode == "local") {
    std::vector<Eigen::Matrix2d> blocks(n);
    for (int q = 0; q < n; ++q) {
      for (int prepared : {0, 1}) {
        Eigen::VectorXd col =
            column(prepared ? (std::uint64_t{1} << q) : 0);
        double p1 = 0.0;  // marginal of qubit q reading 1
        for (Eigen::Index v = 0; v < dim; ++v)
          if (v & (Eigen::Index{1} << q)) p1 += col(v);
        blocks[q](0, prepared) = 1.0 - p1;
        blocks[q](1, prepared) = p1;
      }
    }
    cm.m = Eigen::MatrixXd::Ones(1, 1);
    for (int q = n - 1; q >= 0; --q) {
      Eigen::MatrixXd next(cm.m.rows() * 2, cm.m.cols() * 2);
      next << cm.m * blocks[q](0, 0), cm.m * blocks[q](0, 1),
          cm.m * blocks[q](1, 0), cm.m * blocks[q](1, 1);
      cm.m = std::move(next);
    }
  } else {
    throw std::invalid_argument("unknown confusion mode: " + mode);
  }
  cm.validate();
  return cm;
}

struct RemResult {
  std::map<std::string, double> probabilities;
  std::vector<double> raw;        // pre-clip pseudoinverse output
  double negative_mass = 0.0;     // total clipped weight (diagnostic)
};

inline RemResult apply_rem(const ConfusionMatrix& cm,
                           const CountsDistribution& counts) {
  const Eigen::Index dim = Eigen::Index{1} << cm.n;
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(dim);
  for (const auto& [key, c] : counts.counts) {
    if (static_cast<int>(key.size()) != cm.n)
      throw std::invalid_argument("counts width does not match matrix");
    observed(static_cast<Eigen::Index>(qcore::index_of_bitstring(key))) +=
        static_cast<double>(c) / static_cast<double>(counts.shots);
  }
  Eigen::VectorXd x =
      cm.m.completeOrthogonalDecomposition().pseudoInverse() * observed;
  RemResult result;
  result.raw.assign(x.data(), x.data() + x.size());
  double total = 0.0;
  for (Eigen::Index v = 0; v < dim; ++v) {
    if (x(v) < 0.0) {
      result.negative_mass -= x(v);
      x(v) = 0.0;
    }
    total += x(v);
  }
  if (total <= 0.0) throw std::runtime_error("mitigated distribution empty");
  for (Eigen::Index v = 0; v < dim; ++v)
    if (x(v) > 0.0)
      result.probabilities[qcore::bitstring_of(
          static_cast<std::uint64_t>(v), cm.n)] = x(v) / total;
  return result;
}

inline qcore::json to_json(const ConfusionMatrix& cm) {
  qcore::json rows = qcore::json::array();
  for (Eigen::Index v = 0; v < cm.m.rows(); ++v) {
    qcore::json row = qcore::json::array();
    for (Eigen::Index u = 0; u < cm.m.cols(); ++u) row.push_back(cm.m(v, u));
    rows.push_back(std::move(row));
  }
  return qcore::json{{"n", cm.n}, {"mode", cm.mode}, {"matrix", rows}};
}

inline ConfusionMatrix confusion_from_json(const qcore::json& j) {
  ConfusionMatrix cm;
  cm.n = j.at("n").get<int>();
  cm.mode = j.at("mode").get<std::string>();
  const auto& rows = j.at("matrix");
  const Eigen::Index dim = Eigen::Index{1} << cm.n;
  cm.m.resize(dim, dim);
  for (Eigen::Index v = 0; v < dim; ++v)
    for (Eigen::Index u = 0; u < dim; ++u)
      cm.m(v, u) = rows.at(v).at(u).get<double>();
  cm.validate();
  return cm;
}

// ---------------------------------------------------------------------------
// Mitigation report
// ---------------------------------------------------------------------------

struct MitigationReport {
  double T = 0.0;      // ideal transmission
  double T_run = 0.0;  // unmitigated estimate
  double E1 = 0.0;     // T - T_run
  double T_em = 0.0;   // mitigated estimate
  double E2 = 0.0;     // |T - T_em|
  std::vector<std::pair<double, double>> points;
  std::string extrapolator;
};

inline MitigationReport make_report(
    double ideal, double unmitigated, double mitigated,
    std::vector<std::pair<double, double>> points, std::string extrapolator) {
  MitigationReport r;
  r.T = ideal;
  r.T_run = unmitigated;
  r.E1 = ideal - unmitigated;
  r.T_em = mitigated;
  r.E2 = std::abs(ideal - mitigated);
  r.points = std::move(points);
  r.extrapolator = std::move(extrapolator);
  return r;
}

inline qcore::json to_json(const MitigationReport& r) {
  qcore::json points = qcore::json::array();
  for (const auto& [l, e] : r.points) points.push_back({l, e});
  return qcore::json{{"T", r.T},       {"T_run", r.T_run},
                     {"E1", r.E1},     {"T_em", r.T_em},
                     {"E2", r.E2},     {"points", std::move(points)},
                     {"extrapolator", r.extrapolator}};
}

}  // namespace qtsim::mitigate
