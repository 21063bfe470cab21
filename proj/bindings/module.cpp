#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbitlab/cli.hpp"
#include "gbitlab/quantum_oracle.hpp"
#include "gbitlab/report_io.hpp"

namespace py = pybind11;
using namespace gbitlab;

namespace {

std::vector<BlochVector> to_bloch(const std::vector<Vector>& vs) {
  std::vector<BlochVector> out;
  for (const Vector& v : vs)
    out.emplace_back(static_cast<int>(v.size()), v);
  return out;
}

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const Json& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

Json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    Json j = Json::object();
    for (auto item : obj.cast<py::dict>())
      j[item.first.cast<std::string>()] = py_to_json(item.second);
    return j;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    Json j = Json::array();
    for (auto item : obj.cast<py::sequence>()) j.push_back(py_to_json(item));
    return j;
  }
  throw std::invalid_argument("unsupported python value in JSON conversion");
}

}  // namespace

PYBIND11_MODULE(_gbitlab, m) {
  m.doc() = "Bloch-ball circuit admissibility lab (C++ core)";

  // single-gbit geometry
  m.def("lift",
        [](const Vector& a) {
          return lift(BlochVector(static_cast<int>(a.size()), a));
        },
        py::arg("a"), "The affine embedding (1, a).");
  m.def("outcome_probability",
        [](const Vector& a, const Vector& b) {
          return outcome_probability(
              BlochVector(static_cast<int>(a.size()), a),
              BlochVector(static_cast<int>(b.size()), b));
        },
        py::arg("a"), py::arg("b"));
  m.def("lift_rotation",
        [](const Matrix& r) {
          return lift_rotation(Rotation(static_cast<int>(r.rows()), r));
        },
        py::arg("rotation"));
  m.def("random_unit_vector",
        [](int d, std::uint64_t seed) {
          return random_unit_vector(d, seed).components;
        },
        py::arg("d"), py::arg("seed"));
  m.def("random_rotation",
        [](int d, std::uint64_t seed) { return random_rotation(d, seed).matrix; },
        py::arg("d"), py::arg("seed"));

  // tensors
  m.def("product_lift",
        [](const std::vector<Vector>& factors) {
          return product_lift(to_bloch(factors)).vector;
        },
        py::arg("factors"));
  m.def("joint_probability",
        [](int d, int n, const Matrix& g, const std::vector<Vector>& preps,
           const std::vector<Vector>& meas) {
          return joint_probability(OperatorTensor(d, n, g), to_bloch(preps),
                                   to_bloch(meas));
        },
        py::arg("d"), py::arg("n"), py::arg("g"), py::arg("preps"),
        py::arg("meas"));
  m.def("hs_inner",
        [](int d, int n, const Matrix& x, const Matrix& y) {
          return hs_inner(OperatorTensor(d, n, x), OperatorTensor(d, n, y));
        },
        py::arg("d"), py::arg("n"), py::arg("x"), py::arg("y"));
  m.def("sector_project",
        [](int d, int n, const Matrix& x, const std::string& sector) {
          return sector_project(OperatorTensor(d, n, x),
                                SectorString::parse(sector))
              .matrix;
        },
        py::arg("d"), py::arg("n"), py::arg("x"), py::arg("sector"));

  // subspaces and projectors
  m.def("standard_matrices", [](int d) {
    const StandardMatrices sm = standard_matrices(d);
    py::dict out;
    out["a"] = sm.a;
    out["p"] = sm.p;
    out["b"] = sm.b;
    out["p_b"] = sm.p_b;
    out["sigma"] = sm.sigma;
    return out;
  });
  m.def("d2_matrices", []() {
    const D2Matrices dm = d2_matrices();
    py::dict out;
    out["a0"] = dm.a0;
    out["a1"] = dm.a1;
    out["b0"] = dm.b0;
    out["b1"] = dm.b1;
    return out;
  });
  m.def("antisymmetric_canonical_form", [](const Matrix& abar) {
    const CanonicalForm cf = antisymmetric_canonical_form(abar);
    return py::make_tuple(cf.rot.matrix, cf.lambdas);
  });
  m.def("phi_i", &phi_I, py::arg("m"));
  m.def("phi_b", [](const Matrix& m) { return phi_B(m, 1); }, py::arg("m"));
  m.def("phi_a", &phi_A, py::arg("m"));
  m.def("phi_ai", &phi_AI, py::arg("m"));
  m.def("phi_prime", &phi_prime, py::arg("m"));

  // constraints
  m.def("first_order_value",
        [](int d, int n, const Matrix& x, const std::vector<Vector>& preps,
           const std::vector<Vector>& meas, int site) {
          return first_order_value(OperatorTensor(d, n, x), to_bloch(preps),
                                   to_bloch(meas), site);
        });
  m.def("second_order_flip",
        [](int d, int n, const Matrix& x, const std::vector<Vector>& preps,
           const std::vector<Vector>& meas, int site) {
          return second_order_flip(OperatorTensor(d, n, x), to_bloch(preps),
                                   to_bloch(meas), site);
        });
  m.def("second_order_diag",
        [](int d, int n, const Matrix& x, const std::vector<Vector>& preps) {
          return second_order_diag(OperatorTensor(d, n, x), to_bloch(preps));
        });
  m.def("first_order_null_space", [](int d, int n) {
    FirstOrderSystem system(d, n);
    SvdDiagnostics diag;
    const GeneratorSpace ns = null_space(system, tol::kSvdCutoff, &diag);
    py::dict out;
    out["dim"] = ns.dim();
    out["loc_dim"] = local_algebra_basis(d, n).dim();
    out["rank_gap"] = diag.rank_gap;
    std::vector<Matrix> basis;
    for (long i = 0; i < ns.dim(); ++i) basis.push_back(ns.materialize(i).matrix);
    out["basis"] = basis;
    return out;
  });

  // quantum oracle (d = 3)
  m.def("adjoint_generator", [](const CMatrix& h) {
    int n = 0;
    for (long s = h.rows(); s > 1; s >>= 1) ++n;
    return adjoint_generator(HermitianOperator(n, h)).matrix;
  });
  m.def("transfer_matrix", [](const CMatrix& u) {
    int n = 0;
    for (long s = u.rows(); s > 1; s >>= 1) ++n;
    return transfer_matrix(u, n).matrix;
  });

  // pipeline
  m.def(
      "analyze",
      [](int d, int n, std::uint64_t seed, long budget, long spot_checks,
         int threads) {
        AnalyzeOptions opt;
        opt.seed = seed;
        opt.random_budget = budget;
        opt.survivor_spot_checks = spot_checks;
        opt.threads = threads;
        return json_to_py(report_to_json(analyze(d, n, opt)));
      },
      py::arg("d"), py::arg("n"), py::arg("seed") = 1,
      py::arg("budget") = 100000, py::arg("spot_checks") = 10000,
      py::arg("threads") = 1);
  m.def("simulate", [](const py::dict& circuit) {
    const Circuit c = circuit_from_json(py_to_json(circuit));
    return json_to_py(distribution_to_json(c.d, evaluate(c)));
  });
  m.def("verify_certificate", [](const py::dict& cert) {
    const auto v = verify_certificate(certificate_from_json(py_to_json(cert)));
    py::dict out;
    out["ok"] = v.ok;
    out["stored"] = v.stored;
    out["recomputed"] = v.recomputed;
    out["threshold"] = v.threshold;
    out["message"] = v.message;
    return out;
  });
  m.def("run_cli", &run_cli, py::arg("args"),
        "Run a CLI invocation in-process; returns the exit code.");

  m.attr("__version__") = "1.0.0";
  m.attr("schema_version") = kSchemaVersion;
}
