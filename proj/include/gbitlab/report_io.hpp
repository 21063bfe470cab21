#pragma once

#include <string>

#include "json.hpp"

#include "gbitlab/analyzer.hpp"
#include "gbitlab/circuits.hpp"

// File formats: JSON, UTF-8, schema version "gbitlab/1". Keys are emitted
// in the fixed insertion order coded here; floats serialize as shortest
// round-trip decimals, so identical runs produce byte-identical files.
// Site indices are 1-based in files, 0-based in code.

namespace gbitlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "gbitlab/1";

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Sparse operator encoding {"d","n","entries":[[row,col,value]...]} with
/// entries sorted row-major.
Json operator_to_json(const OperatorTensor& x);
OperatorTensor operator_from_json(const Json& j);

Json certificate_to_json(const ExclusionCertificate& cert);
ExclusionCertificate certificate_from_json(const Json& j);

Json report_to_json(const AnalysisReport& report);

Json distribution_to_json(int d, const OutcomeDistribution& dist);

Circuit circuit_from_json(const Json& j);
Json circuit_to_json(const Circuit& c);

struct CertificateVerification {
  bool ok = false;
  double stored = 0, recomputed = 0, threshold = 0;
  std::string message;
};

/// Independent re-evaluation of the stored constraint: reproduces the value
/// to `match_tol` and requires it below -margin * |Y|^2.
CertificateVerification verify_certificate(const ExclusionCertificate& cert,
                                           double match_tol = 1e-9,
                                           double margin = tol::kCertMargin);

void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace gbitlab
