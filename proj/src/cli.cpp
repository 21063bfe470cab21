#include "gbitlab/cli.hpp"

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "gbitlab/report_io.hpp"

namespace gbitlab {

namespace {

int env_thread_cap() {
  const char* env = std::getenv("GBITLAB_THREADS");
  if (!env) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;
}

ProjectorSpec parse_kind(const std::string& name) {
  if (name == "A") return {ProjectorKind::A, 1};
  if (name == "B") return {ProjectorKind::B, 1};
  if (name == "I") return {ProjectorKind::I, 1};
  if (name == "AI") return {ProjectorKind::AI, 1};
  if (name == "prime") return {ProjectorKind::Prime, 1};
  if (name.rfind("stab", 0) == 0)
    return {ProjectorKind::Stabilizer, std::max(1, std::atoi(name.c_str() + 4))};
  throw std::invalid_argument("unknown projector kind \"" + name + "\"");
}

int cmd_analyze(int d, int n, const AnalyzeOptions& opt,
                const std::string& out_path, const std::string& certs_dir) {
  const AnalysisReport report = analyze(d, n, opt);
  write_json_file(out_path, report_to_json(report));
  if (!certs_dir.empty()) {
    for (const DirectionOutcome& dir : report.directions)
      if (dir.certificate)
        write_json_file(
            certs_dir + "/direction-" + std::to_string(dir.index) + ".json",
            certificate_to_json(*dir.certificate));
  }
  std::cout << "analyze d=" << d << " n=" << n << ": " << report.conclusion
            << " (null=" << report.null_dim << ", loc=" << report.loc_dim
            << ", nonlocal=" << report.nonlocal_dim
            << ", excluded=" << report.excluded_count
            << ", survivors=" << report.survivor_count << ")\n";
  return report.conclusion == "budget exhausted" ? 2 : 0;
}

int cmd_simulate(const std::string& in_path, const std::string& out_path) {
  const Circuit circuit = circuit_from_json(read_json_file(in_path));
  const OutcomeDistribution dist = evaluate(circuit);
  write_json_file(out_path, distribution_to_json(circuit.d, dist));
  std::cout << "simulate: " << dist.probabilities.size()
            << " outcomes, correlation residual " << dist.correlation_residual
            << "\n";
  return 0;
}

int cmd_project(const std::string& in_path, const std::string& out_path) {
  const Json in = read_json_file(in_path);
  const int d = in.at("d").get<int>();
  const int n = in.at("n").get<int>();
  OperatorTensor x(d, n, matrix_from_json(in.at("matrix")));
  std::vector<ProjectorSpec> kinds;
  for (const Json& k : in.at("kinds")) kinds.push_back(parse_kind(k));
  const OperatorTensor y = tensor_projector(kinds, x);
  Json out;
  out["schema"] = kSchemaVersion;
  out["type"] = "projection";
  out["d"] = d;
  out["n"] = n;
  out["kinds"] = in.at("kinds");
  out["matrix"] = matrix_to_json(y.matrix);
  write_json_file(out_path, out);
  return 0;
}

int cmd_canon(const std::string& in_path, const std::string& out_path) {
  const Json in = read_json_file(in_path);
  const Matrix abar = matrix_from_json(in.at("matrix"));
  const CanonicalForm cf = antisymmetric_canonical_form(abar);
  const int d = static_cast<int>(abar.rows());
  const double residual =
      (cf.rot.matrix * abar * cf.rot.matrix.transpose() -
       canonical_block_matrix(d, cf.lambdas))
          .norm();
  Json out;
  out["schema"] = kSchemaVersion;
  out["type"] = "canonical_form";
  out["d"] = d;
  out["rotation"] = matrix_to_json(cf.rot.matrix);
  Json lambdas = Json::array();
  for (double l : cf.lambdas) lambdas.push_back(l);
  out["lambdas"] = std::move(lambdas);
  out["residual"] = residual;
  write_json_file(out_path, out);
  return 0;
}

int cmd_verify_cert(const std::string& path, double match_tol, double margin) {
  const ExclusionCertificate cert =
      certificate_from_json(read_json_file(path));
  const CertificateVerification v = verify_certificate(cert, match_tol, margin);
  std::cout << "verify-cert " << cert.candidate_id << ": " << v.message
            << " (stored " << v.stored << ", recomputed " << v.recomputed
            << ", threshold " << v.threshold << ")\n";
  return v.ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"gbitlab: reversible-circuit admissibility lab for Bloch-ball bits"};
  app.require_subcommand(1);

  int d = 0, n = 0;
  AnalyzeOptions opt;
  std::string out_path, certs_dir, in_path;
  double match_tol = 1e-9;

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "compute and certify the generator space");
  analyze_cmd->add_option("--d", d, "Bloch ball dimension")->required();
  analyze_cmd->add_option("--n", n, "number of wires")->required();
  analyze_cmd->add_option("--seed", opt.seed, "master seed");
  analyze_cmd->add_option("--budget", opt.random_budget,
                          "randomized trials per direction");
  analyze_cmd->add_option("--structured-budget", opt.structured_budget,
                          "structured trials per direction");
  analyze_cmd->add_option("--spot-checks", opt.survivor_spot_checks,
                          "randomized spot checks per survivor");
  analyze_cmd->add_option("--svd-cutoff", opt.svd_cutoff,
                          "relative singular value cutoff");
  analyze_cmd->add_option("--constraint-tol", opt.constraint_tol,
                          "first-order residual tolerance");
  analyze_cmd->add_option("--cert-margin", opt.cert_margin,
                          "relative certificate margin");
  analyze_cmd->add_option("--threads", opt.threads,
                          "worker threads (capped by GBITLAB_THREADS)");
  analyze_cmd->add_option("--out", out_path, "report path")->required();
  analyze_cmd->add_option("--certs-dir", certs_dir,
                          "also write one certificate file per direction");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "evaluate a circuit file");
  simulate_cmd->add_option("circuit", in_path, "circuit JSON")->required();
  simulate_cmd->add_option("--out", out_path, "distribution path")->required();

  CLI::App* project_cmd =
      app.add_subcommand("project", "apply per-site group-averaging projectors");
  project_cmd->add_option("input", in_path, "operator JSON")->required();
  project_cmd->add_option("--out", out_path, "output path")->required();

  CLI::App* canon_cmd = app.add_subcommand(
      "canon", "sigma-block canonical form of an antisymmetric matrix");
  canon_cmd->add_option("input", in_path, "matrix JSON")->required();
  canon_cmd->add_option("--out", out_path, "output path")->required();

  CLI::App* verify_cmd =
      app.add_subcommand("verify-cert", "re-evaluate an exclusion certificate");
  verify_cmd->add_option("certificate", in_path, "certificate JSON")
      ->required();
  verify_cmd->add_option("--match-tol", match_tol,
                         "reproduction tolerance for the stored value");
  verify_cmd->add_option("--cert-margin", opt.cert_margin,
                         "relative violation threshold");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*analyze_cmd) {
      const int cap = env_thread_cap();
      if (cap > 0) opt.threads = std::min(opt.threads < 1 ? cap : opt.threads, cap);
      return cmd_analyze(d, n, opt, out_path, certs_dir);
    }
    if (*simulate_cmd) return cmd_simulate(in_path, out_path);
    if (*project_cmd) return cmd_project(in_path, out_path);
    if (*canon_cmd) return cmd_canon(in_path, out_path);
    if (*verify_cmd) return cmd_verify_cert(in_path, match_tol, opt.cert_margin);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace gbitlab
