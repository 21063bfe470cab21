#include "gbitlab/report_io.hpp"

#include <fstream>

namespace gbitlab {

namespace {

void require_schema(const Json& j, const char* type) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  if (j.value("schema", "") != kSchemaVersion)
    throw std::invalid_argument("schema: expected \"" +
                                std::string(kSchemaVersion) + "\"");
  if (j.value("type", "") != type)
    throw std::invalid_argument("type: expected \"" + std::string(type) +
                                "\", got \"" + j.value("type", "") + "\"");
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::vector<BlochVector> bloch_list_from_json(const Json& j, int d,
                                              const char* what) {
  std::vector<BlochVector> out;
  for (const Json& row : j) out.emplace_back(d, vector_from_json(row, what));
  return out;
}

Json bloch_list_to_json(const std::vector<BlochVector>& v) {
  Json a = Json::array();
  for (const BlochVector& b : v) a.push_back(vector_to_json(b.components));
  return a;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const long rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (static_cast<long>(j[r].size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (long c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Json operator_to_json(const OperatorTensor& x) {
  Json j;
  j["d"] = x.d;
  j["n"] = x.n;
  Json entries = Json::array();
  for (long r = 0; r < x.matrix.rows(); ++r)
    for (long c = 0; c < x.matrix.cols(); ++c)
      if (x.matrix(r, c) != 0.0)
        entries.push_back(Json::array({r, c, x.matrix(r, c)}));
  j["entries"] = std::move(entries);
  return j;
}

OperatorTensor operator_from_json(const Json& j) {
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  const long dim = tensor_dim(d, n);
  Matrix m = Matrix::Zero(dim, dim);
  for (const Json& e : j.at("entries")) {
    const long r = e.at(0).get<long>(), c = e.at(1).get<long>();
    if (r < 0 || r >= dim || c < 0 || c >= dim)
      throw std::invalid_argument("operator: entry index out of range");
    m(r, c) = e.at(2).get<double>();
  }
  return OperatorTensor(d, n, std::move(m));
}

Json certificate_to_json(const ExclusionCertificate& cert) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["type"] = "exclusion_certificate";
  j["d"] = cert.d;
  j["n"] = cert.n;
  j["candidate_id"] = cert.candidate_id;
  j["sector"] = cert.sector;
  Json order = Json::array();
  for (int s : cert.site_order) order.push_back(s + 1);
  j["site_order"] = std::move(order);
  Json conj = Json::array();
  for (const Matrix& r : cert.conjugation) conj.push_back(matrix_to_json(r));
  j["conjugation"] = std::move(conj);
  j["y"] = operator_to_json(cert.y);
  j["constraint"] = {{"kind", constraint_kind_name(cert.kind)},
                     {"site_k", cert.site_k + 1}};
  j["preps"] = bloch_list_to_json(cert.preps);
  j["meas"] = bloch_list_to_json(cert.meas);
  j["value"] = cert.value;
  j["margin"] = cert.margin;
  return j;
}

ExclusionCertificate certificate_from_json(const Json& j) {
  require_schema(j, "exclusion_certificate");
  ExclusionCertificate cert;
  cert.d = j.at("d").get<int>();
  cert.n = j.at("n").get<int>();
  cert.candidate_id = j.value("candidate_id", "");
  cert.sector = j.value("sector", "");
  for (const Json& s : j.value("site_order", Json::array()))
    cert.site_order.push_back(s.get<int>() - 1);
  for (const Json& r : j.value("conjugation", Json::array()))
    cert.conjugation.push_back(matrix_from_json(r));
  cert.y = operator_from_json(j.at("y"));
  cert.kind =
      constraint_kind_from_name(j.at("constraint").at("kind").get<std::string>());
  cert.site_k = j.at("constraint").at("site_k").get<int>() - 1;
  cert.preps = bloch_list_from_json(j.at("preps"), cert.d, "preps");
  cert.meas = bloch_list_from_json(j.at("meas"), cert.d, "meas");
  cert.value = j.at("value").get<double>();
  cert.margin = j.at("margin").get<double>();
  return cert;
}

Json report_to_json(const AnalysisReport& report) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["type"] = "analysis_report";
  j["d"] = report.d;
  j["n"] = report.n;
  j["seed"] = report.options.seed;
  j["tolerances"] = {{"svd_cutoff", report.options.svd_cutoff},
                     {"constraint_tol", report.options.constraint_tol},
                     {"cert_margin", report.options.cert_margin}};
  j["budgets"] = {{"structured", report.options.structured_budget},
                  {"random", report.options.random_budget},
                  {"survivor_spot_checks", report.options.survivor_spot_checks}};
  j["null_space"] = {
      {"dim", report.null_dim},
      {"loc_dim", report.loc_dim},
      {"nonlocal_dim", report.nonlocal_dim},
      {"site_svd",
       {{"rank", report.site_svd.rank},
        {"rank_gap", report.site_svd.rank_gap},
        {"unstable", report.site_svd.unstable}}},
      {"diag_svd",
       {{"rank", report.diag_svd.rank},
        {"rank_gap", report.diag_svd.rank_gap},
        {"unstable", report.diag_svd.unstable}}}};
  Json dirs = Json::array();
  long structured = 0, random_trials = 0;
  for (const DirectionOutcome& dir : report.directions) {
    Json dj;
    dj["index"] = dir.index;
    dj["status"] = dir.status;
    dj["sector"] = dir.sector;
    Json norms;
    for (const auto& [sec, nm] : dir.sector_norms) norms[sec] = nm;
    dj["sector_norms"] = std::move(norms);
    dj["trials"] = {{"structured", dir.trials_structured},
                    {"random", dir.trials_random}};
    dj["best_value"] = dir.best_value;
    if (dir.certificate)
      dj["certificate"] = certificate_to_json(*dir.certificate);
    if (dir.status == "survivor") {
      dj["spot_check_min"] = dir.spot_check_min;
      dj["spot_checks_passed"] = dir.spot_checks_passed;
    }
    if (dir.oracle_alignment >= 0) dj["oracle_alignment"] = dir.oracle_alignment;
    dirs.push_back(std::move(dj));
    structured += dir.trials_structured;
    random_trials += dir.trials_random;
  }
  j["directions"] = std::move(dirs);
  j["work"] = {{"structured", structured}, {"random", random_trials}};
  j["conclusion"] = report.conclusion;
  j["excluded_count"] = report.excluded_count;
  j["survivor_count"] = report.survivor_count;
  if (report.d == 3) {
    j["oracle"] = {
        {"image_count", report.oracle_image_count},
        {"membership_residual", report.oracle_membership_residual}};
  }
  return j;
}

Json distribution_to_json(int d, const OutcomeDistribution& dist) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["type"] = "distribution";
  j["d"] = d;
  j["n"] = dist.n;
  Json outcomes = Json::array();
  for (long s = 0; s < static_cast<long>(dist.probabilities.size()); ++s)
    outcomes.push_back(outcome_string(s, dist.n));
  j["outcomes"] = std::move(outcomes);
  Json probs = Json::array();
  for (double p : dist.probabilities) probs.push_back(p);
  j["probabilities"] = std::move(probs);
  j["correlation_residual"] = dist.correlation_residual;
  return j;
}

Circuit circuit_from_json(const Json& j) {
  Circuit c;
  c.d = j.at("d").get<int>();
  c.n = j.at("n").get<int>();
  if (c.d < 1 || c.n < 1) throw std::invalid_argument("circuit: bad d or n");
  c.preps = bloch_list_from_json(j.at("preps"), c.d, "preps");
  c.meas = bloch_list_from_json(j.at("meas"), c.d, "meas");
  for (const Json& g : j.at("gates")) {
    const std::string type = g.at("type").get<std::string>();
    if (type == "local") {
      LocalGate lg;
      lg.site = g.at("site").get<int>() - 1;
      lg.rotation = Rotation(c.d, matrix_from_json(g.at("rotation")));
      c.gates.emplace_back(std::move(lg));
    } else if (type == "exp") {
      GeneratorGate gg;
      gg.generator = OperatorTensor(c.d, c.n, matrix_from_json(g.at("matrix")));
      gg.time = g.at("time").get<double>();
      c.gates.emplace_back(std::move(gg));
    } else if (type == "raw") {
      RawGate rg;
      rg.op = OperatorTensor(c.d, c.n, matrix_from_json(g.at("matrix")));
      c.gates.emplace_back(std::move(rg));
    } else if (type == "quantum") {
      QuantumGate qg;
      qg.name = g.at("name").get<std::string>();
      for (const Json& s : g.at("sites"))
        qg.sites.push_back(s.get<int>() - 1);
      qg.param = g.value("param", 0.0);
      c.gates.emplace_back(std::move(qg));
    } else {
      throw std::invalid_argument("circuit: unknown gate type \"" + type +
                                  "\"");
    }
  }
  return c;
}

Json circuit_to_json(const Circuit& c) {
  Json j;
  j["d"] = c.d;
  j["n"] = c.n;
  j["preps"] = bloch_list_to_json(c.preps);
  Json gates = Json::array();
  for (const GateSpec& g : c.gates) {
    Json gj;
    if (std::holds_alternative<LocalGate>(g)) {
      const auto& lg = std::get<LocalGate>(g);
      gj["type"] = "local";
      gj["site"] = lg.site + 1;
      gj["rotation"] = matrix_to_json(lg.rotation.matrix);
    } else if (std::holds_alternative<GeneratorGate>(g)) {
      const auto& gg = std::get<GeneratorGate>(g);
      gj["type"] = "exp";
      gj["matrix"] = matrix_to_json(gg.generator.matrix);
      gj["time"] = gg.time;
    } else if (std::holds_alternative<RawGate>(g)) {
      gj["type"] = "raw";
      gj["matrix"] = matrix_to_json(std::get<RawGate>(g).op.matrix);
    } else {
      const auto& qg = std::get<QuantumGate>(g);
      gj["type"] = "quantum";
      gj["name"] = qg.name;
      Json sites = Json::array();
      for (int s : qg.sites) sites.push_back(s + 1);
      gj["sites"] = std::move(sites);
      if (qg.param != 0.0) gj["param"] = qg.param;
    }
    gates.push_back(std::move(gj));
  }
  j["gates"] = std::move(gates);
  j["meas"] = bloch_list_to_json(c.meas);
  return j;
}

CertificateVerification verify_certificate(const ExclusionCertificate& cert,
                                           double match_tol, double margin) {
  CertificateVerification out;
  out.stored = cert.value;
  const double norm_sq = std::pow(hs_norm(cert.y), 2);
  out.threshold = -margin * norm_sq;
  try {
    out.recomputed = evaluate_certificate_constraint(
        cert.y, cert.kind, cert.site_k, cert.preps, cert.meas);
  } catch (const std::exception& e) {
    out.message = std::string("re-evaluation failed: ") + e.what();
    return out;
  }
  if (std::abs(out.recomputed - cert.value) > match_tol) {
    out.message = "stored value does not reproduce: stored " +
                  std::to_string(cert.value) + ", recomputed " +
                  std::to_string(out.recomputed);
    return out;
  }
  if (!(out.recomputed < out.threshold)) {
    out.message = "value not below the certification threshold";
    return out;
  }
  out.ok = true;
  out.message = "ok";
  return out;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

}  // namespace gbitlab
