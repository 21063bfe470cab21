#include "gbitlab/circuits.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "gbitlab/quantum_oracle.hpp"

namespace gbitlab {

OperatorTensor gate_from_generator(const OperatorTensor& x, double t) {
  if (!std::isfinite(t))
    throw std::invalid_argument("gate_from_generator: non-finite time");
  if (!x.matrix.allFinite())
    throw std::invalid_argument("gate_from_generator: non-finite generator");
  if (t == 0.0) return OperatorTensor::identity(x.d, x.n);
  Matrix e = (t * x.matrix).exp();
  return OperatorTensor(x.d, x.n, std::move(e));
}

OperatorTensor gate_matrix(const Circuit& c, const GateSpec& g) {
  if (std::holds_alternative<LocalGate>(g)) {
    const auto& lg = std::get<LocalGate>(g);
    if (lg.site < 0 || lg.site >= c.n)
      throw std::invalid_argument("local gate: site out of range");
    if (lg.rotation.d != c.d)
      throw std::invalid_argument("local gate: rotation dimension mismatch");
    std::vector<Matrix> factors(c.n, Matrix::Identity(c.d + 1, c.d + 1));
    factors[lg.site] = lift_rotation(lg.rotation);
    return tensor_product(c.d, factors);
  }
  if (std::holds_alternative<GeneratorGate>(g)) {
    const auto& gg = std::get<GeneratorGate>(g);
    if (gg.generator.d != c.d || gg.generator.n != c.n)
      throw std::invalid_argument("generator gate: size mismatch");
    return gate_from_generator(gg.generator, gg.time);
  }
  if (std::holds_alternative<RawGate>(g)) {
    const auto& rg = std::get<RawGate>(g);
    if (rg.op.d != c.d || rg.op.n != c.n)
      throw std::invalid_argument("raw gate: size mismatch");
    const long dim = rg.op.matrix.rows();
    const double res = (rg.op.matrix.transpose() * rg.op.matrix -
                        Matrix::Identity(dim, dim))
                           .cwiseAbs()
                           .maxCoeff();
    if (res > tol::kOrthogonal)
      throw std::invalid_argument("raw gate: not orthogonal, residual " +
                                  std::to_string(res));
    return rg.op;
  }
  const auto& qg = std::get<QuantumGate>(g);
  if (c.d != 3)
    throw std::invalid_argument("quantum gate: only available at d = 3");
  return transfer_matrix(
      embed_unitary(gate_unitary(qg.name, qg.param), qg.sites, c.n), c.n);
}

OperatorTensor total_transfer(const Circuit& c) {
  if (static_cast<int>(c.preps.size()) != c.n ||
      static_cast<int>(c.meas.size()) != c.n)
    throw std::invalid_argument("circuit: preps/meas must have n entries");
  OperatorTensor g = OperatorTensor::identity(c.d, c.n);
  for (const GateSpec& spec : c.gates) {
    const OperatorTensor gm = gate_matrix(c, spec);
    g = OperatorTensor(c.d, c.n, gm.matrix * g.matrix);
  }
  return g;
}

OutcomeDistribution evaluate(const Circuit& c) {
  const OperatorTensor g = total_transfer(c);
  for (const BlochVector& b : c.meas) b.require_unit(1e-9);
  for (const BlochVector& a : c.preps)
    if (a.norm() > 1.0 + 1e-9)
      throw std::invalid_argument("circuit: preparation outside the ball");
  const Vector evolved = g.matrix * lifted_product(c.preps);
  OutcomeDistribution out;
  out.n = c.n;
  const long outcomes = 1L << c.n;
  out.probabilities.resize(outcomes);
  double sum = 0;
  for (long s = 0; s < outcomes; ++s) {
    std::vector<BlochVector> signed_meas;
    signed_meas.reserve(c.n);
    for (int i = 0; i < c.n; ++i) {
      const double sign = ((s >> (c.n - 1 - i)) & 1) ? -1.0 : 1.0;
      signed_meas.push_back(BlochVector(c.d, sign * c.meas[i].components));
    }
    const double p =
        std::ldexp(lifted_product(signed_meas).dot(evolved), -c.n);
    if (p < -1e-8 || p > 1.0 + 1e-8)
      throw std::runtime_error("circuit: inadmissible gate, outcome " +
                               outcome_string(s, c.n) + " has probability " +
                               std::to_string(p));
    out.probabilities[s] = p;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw std::runtime_error("circuit: outcome probabilities sum to " +
                             std::to_string(sum));
  out.correlation_residual = correlation_check(out.probabilities, c.n);
  return out;
}

double correlation_check(const std::vector<double>& probabilities, int n) {
  const long outcomes = 1L << n;
  if (static_cast<long>(probabilities.size()) != outcomes)
    throw std::invalid_argument("correlation_check: need 2^n probabilities");
  // Single-wire marginals P_i(+).
  std::vector<double> plus(n, 0.0);
  for (long s = 0; s < outcomes; ++s)
    for (int i = 0; i < n; ++i)
      if (!((s >> (n - 1 - i)) & 1)) plus[i] += probabilities[s];
  double l1 = 0;
  for (long s = 0; s < outcomes; ++s) {
    double prod = 1;
    for (int i = 0; i < n; ++i) {
      const bool minus = (s >> (n - 1 - i)) & 1;
      prod *= minus ? 1.0 - plus[i] : plus[i];
    }
    l1 += std::abs(probabilities[s] - prod);
  }
  return 0.5 * l1;
}

std::string outcome_string(long index, int n) {
  std::string s;
  for (int i = 0; i < n; ++i)
    s.push_back(((index >> (n - 1 - i)) & 1) ? '-' : '+');
  return s;
}

}  // namespace gbitlab
