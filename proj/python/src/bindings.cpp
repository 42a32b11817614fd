#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matsg/cauchy.hpp"
#include "matsg/decomp.hpp"
#include "matsg/error.hpp"
#include "matsg/gaussmarkov.hpp"
#include "matsg/generate.hpp"
#include "matsg/json_io.hpp"
#include "matsg/linalg.hpp"

namespace py = pybind11;
using namespace matsg;

namespace {

CauchySolution solution(const std::vector<std::string>& basis, const std::vector<double>& values) {
  std::vector<Real> v(values.begin(), values.end());
  return CauchySolution::real(ModuleBasis::from_expressions(basis), std::move(v));
}

py::dict cluster_dict(const EigenCluster& c) {
  py::dict d;
  d["center"] = c.center;
  d["multiplicity"] = c.multiplicity;
  d["basis"] = CMat(c.basis);
  d["residual"] = c.residual;
  return d;
}

Json parse_doc(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix semigroups: construction, verification and structure recovery";

  // Translators run most recent first: the base class goes first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());

  m.def("mat_exp", [](const Mat& a) { return mat_exp(a); });
  m.def("unipotent_log", [](const Mat& t, double tol) { return unipotent_log(t, tol); }, py::arg("t"),
        py::arg("tol") = 1e-8);
  m.def("operator_norm", &operator_norm);
  m.def("eigenclusters", [](const Mat& a) {
    py::list out;
    for (const auto& c : eigenclusters(a)) out.append(cluster_dict(c));
    return out;
  });
  m.def("jc_multiplicative", [](const Mat& a) {
    JCPair p = jc_multiplicative(Matrix(a));
    return py::make_tuple(p.d.to_real(), p.t.to_real());
  });
  // Exact variant: entries as "p/q" strings.
  m.def("jc_multiplicative_exact", [](const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::vector<Rational>> q;
    for (const auto& r : rows) {
      q.emplace_back();
      for (const auto& e : r) q.back().push_back(parse_rational(e));
    }
    JCPair p = jc_multiplicative(Matrix(RatMatrix::from_rows(q)));
    auto strings = [](const RatMatrix& a) {
      std::vector<std::vector<std::string>> out(a.rows());
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out[i].push_back(to_string(a(i, j)));
      return out;
    };
    return py::make_tuple(strings(p.d.exact()), strings(p.t.exact()));
  });
  m.def("rotation", [](double theta) { return rotation(theta); });

  m.def("is_linear", [](const std::vector<std::string>& basis, const std::vector<double>& values,
                        std::optional<double> tol) { return is_linear(solution(basis, values), tol); },
        py::arg("basis"), py::arg("values"), py::arg("tol") = std::nullopt);
  m.def("equivalent",
        [](const std::vector<std::string>& basis, const std::vector<double>& f, const std::vector<double>& g,
           std::optional<double> tol) { return equivalent(solution(basis, f), solution(basis, g), tol); },
        py::arg("basis"), py::arg("f"), py::arg("g"), py::arg("tol") = std::nullopt);
  m.def("pi_sequence", [](const std::vector<std::string>& basis, const std::vector<double>& f,
                          const std::vector<double>& g, int n) {
    auto fs = solution(basis, f), gs = solution(basis, g);
    PiSequence seq = pi_sequence(fs, gs, n);
    const auto& fp = seq.swapped ? gs : fs;
    const auto& gp = seq.swapped ? fs : gs;
    py::list terms;
    for (const auto& x : seq.terms)
      terms.append(py::make_tuple(to_double(x.value()), to_double(fp.evaluate(x)), to_double(gp.evaluate(x))));
    py::dict out;
    out["terms"] = terms;
    out["swapped"] = seq.swapped;
    out["theta"] = to_double(seq.theta);
    return out;
  });

  // Document-level API: JSON strings in and out.
  m.def("generate", [](std::uint64_t seed, const std::string& mode) {
    GeneratedModel gm = parse_mode(mode) == ScalarMode::real ? random_model(seed) : random_exact_model(seed, true);
    Json doc = to_json(sample(gm.model));
    doc["model"] = to_json(gm.model);
    return doc.dump();
  }, py::arg("seed"), py::arg("mode") = "real");
  m.def("verify", [](const std::string& samples, double tol) {
    SampleSet s = samples_from_json(parse_doc(samples));
    return to_json(verify_semigroup(s, tol), s).dump();
  }, py::arg("samples"), py::arg("tol") = 1e-9);
  m.def("classify", [](const std::string& samples, const std::string& bound, double tol_verify,
                       double tol_recover) {
    SampleSet s = samples_from_json(parse_doc(samples));
    return to_json(classify(s, BoundFunction::from_expression(bound), Tolerances{tol_verify, tol_recover})).dump();
  }, py::arg("samples"), py::arg("bound"), py::arg("tol_verify") = 1e-9, py::arg("tol_recover") = 1e-8);
  m.def("markov_check", [](const std::string& kernel, const std::vector<std::array<double, 3>>& triples,
                           double tol) {
    return to_json(markov_check(covariance_from_json(parse_doc(kernel)), triples, tol)).dump();
  }, py::arg("kernel"), py::arg("triples"), py::arg("tol") = 1e-9);
  m.def("kernel", [](const std::string& kernel, double s, double t) {
    return covariance_from_json(parse_doc(kernel))(s, t);
  });
}
