#pragma once

#include <string>
#include <variant>

#include "gbitlab/tensor.hpp"

namespace gbitlab {

struct LocalGate {
  int site = 0;  // 0-indexed
  Rotation rotation;
};
struct GeneratorGate {
  OperatorTensor generator;
  double time = 0;
};
struct RawGate {
  OperatorTensor op;
};
struct QuantumGate {  // d = 3 only
  std::string name;
  std::vector<int> sites;
  double param = 0;
};

using GateSpec = std::variant<LocalGate, GeneratorGate, RawGate, QuantumGate>;

/// Prepare a product state, apply the gates in order, measure locally on
/// every wire.
struct Circuit {
  int d = 0, n = 0;
  std::vector<BlochVector> preps;
  std::vector<GateSpec> gates;
  std::vector<BlochVector> meas;
};

struct OutcomeDistribution {
  int n = 0;
  // Lexicographic outcome order over {+,-}^n, + before -, wire 1 first.
  std::vector<double> probabilities;
  double correlation_residual = 0;
};

/// exp(t X) by scaling and squaring.
OperatorTensor gate_from_generator(const OperatorTensor& x, double t);

/// The (d+1)^n transfer matrix of one gate.
OperatorTensor gate_matrix(const Circuit& c, const GateSpec& g);

/// Product of the gates in application order.
OperatorTensor total_transfer(const Circuit& c);

OutcomeDistribution evaluate(const Circuit& c);

/// Largest deviation between the joint distribution and the product of its
/// single-wire marginals over outcome events (equivalently half the L1
/// distance); zero iff the statistics factorize across wires.
double correlation_check(const std::vector<double>& probabilities, int n);

std::string outcome_string(long index, int n);

}  // namespace gbitlab
