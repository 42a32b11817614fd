#include "matsg/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "matsg/error.hpp"
#include "matsg/generate.hpp"
#include "matsg/json_io.hpp"

namespace matsg {

namespace {

struct UsageError : Error {
  using Error::Error;
};

Json read_json(const std::string& path) {
  if (path.empty()) throw UsageError("missing --in");
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write(const Json& doc, const RunConfig& cfg, std::ostream& out) {
  std::string text = doc.dump(2) + "\n";
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + cfg.out + "'");
  f << text;
}

void check_mode(const RunConfig& cfg, ScalarMode mode) {
  if (cfg.mode && parse_mode(*cfg.mode) != mode)
    throw UsageError("--mode " + *cfg.mode + " does not match the input mode " + to_string(mode));
}

Tolerances tolerances(const RunConfig& cfg) {
  Tolerances t;
  if (cfg.tol_verify) t.verify = *cfg.tol_verify;
  if (cfg.tol_recover) t.recover = *cfg.tol_recover;
  return t;
}

// exp(kx) with k the next integer above the sampled growth rate.
BoundFunction growth_bound(const SampleSet& s) {
  double rate = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    double x = to_double(s.points[i].value());
    if (x > 0) rate = std::max(rate, std::log(std::max(operator_norm(s.samples[i].to_real()), 1e-300)) / x);
  }
  return BoundFunction::from_expression("exp(" + std::to_string(static_cast<int>(std::ceil(rate)) + 1) + "x)");
}

int generate(const RunConfig& cfg, std::ostream& out) {
  ScalarMode mode = cfg.mode ? parse_mode(*cfg.mode) : ScalarMode::real;
  GeneratedModel gm = mode == ScalarMode::real ? random_model(cfg.seed) : random_exact_model(cfg.seed, true);
  SampleSet s = sample(gm.model);
  s.bound = growth_bound(s);
  Json doc = to_json(s);
  doc["model"] = to_json(gm.model);
  doc["seed"] = cfg.seed;
  write(doc, cfg, out);
  return kExitPass;
}

int verify(const RunConfig& cfg, std::ostream& out) {
  SampleSet s = samples_from_json(read_json(cfg.in));
  check_mode(cfg, s.mode);
  double tol = cfg.tol_verify.value_or(s.mode == ScalarMode::exact ? 0.0 : 1e-9);
  SemigroupReport rep = verify_semigroup(s, tol);
  Json doc = {{"schema", kSchema}, {"command", "verify"}, {"semigroup", to_json(rep, s)}};
  bool pass = rep.pass;
  std::optional<BoundFunction> f = s.bound;
  if (cfg.bound) f = BoundFunction::from_expression(*cfg.bound);
  if (f) {
    BoundReport b = verify_bound(s, *f);
    doc["bound"] = to_json(b);
    pass = pass && b.pass;
  }
  doc["pass"] = pass;
  write(doc, cfg, out);
  return pass ? kExitPass : kExitFail;
}

int classify_cmd(const RunConfig& cfg, std::ostream& out) {
  SampleSet s = samples_from_json(read_json(cfg.in));
  check_mode(cfg, s.mode);
  std::optional<BoundFunction> f = s.bound;
  if (cfg.bound) f = BoundFunction::from_expression(*cfg.bound);
  if (!f) throw UsageError("classify needs a bound (--bound or a \"bound\" field in the input)");
  StructureResult res = classify(s, *f, tolerances(cfg));
  Json doc = to_json(res);
  doc["command"] = "classify";
  // Every "for all x" claim above holds at this resolution only.
  size_t pairs = 0;
  for (const auto& x : s.points)
    for (const auto& y : s.points)
      if (s.find(x + y)) ++pairs;
  doc["coverage"] = {{"points", s.size()}, {"law_pairs", pairs}};
  write(doc, cfg, out);
  return res.pass ? kExitPass : kExitFail;
}

int markov(const RunConfig& cfg, std::ostream& out) {
  Json spec = read_json(cfg.in);
  CovarianceModel r = covariance_from_json(spec);
  double tol = cfg.tol_verify.value_or(1e-9);
  BasisPtr basis = ModuleBasis::from_expressions({"1", "sqrt(2)", "sqrt(3)"});
  auto points = default_points(basis);
  std::vector<std::array<double, 3>> triples;
  if (spec.contains("triples")) {
    const Json& t = spec["triples"];
    if (!t.is_array()) throw ParseError("kernel.triples: expected an array");
    for (size_t i = 0; i < t.size(); ++i) {
      if (!t[i].is_array() || t[i].size() != 3 || !t[i][0].is_number() || !t[i][1].is_number() || !t[i][2].is_number())
        throw ParseError("kernel.triples[" + std::to_string(i) + "]: expected [s, t, u]");
      triples.push_back({t[i][0].get<double>(), t[i][1].get<double>(), t[i][2].get<double>()});
    }
  } else {
    triples = markov_triples(points);
  }
  MarkovReport m = markov_check(r, triples, tol);
  Json doc = {{"schema", kSchema}, {"command", "markov"}, {"kernel", to_json(r)}, {"markov", to_json(m)}};
  try {
    SampleSet s = to_semigroup(r, basis, points, tol);
    SemigroupReport sg = verify_semigroup(s, tol);
    doc["semigroup"] = to_json(sg, s);
    doc["consistent"] = sg.pass == m.pass;
  } catch (const PreconditionError& e) {
    doc["reduction_error"] = e.what();
  }
  doc["pass"] = m.pass;
  write(doc, cfg, out);
  return m.pass ? kExitPass : kExitFail;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.tol_verify && !(*cfg.tol_verify >= 0)) throw UsageError("--tol-verify must be non-negative");
    if (cfg.tol_recover && !(*cfg.tol_recover > 0)) throw UsageError("--tol-recover must be positive");
    if (cfg.command == "generate") return generate(cfg, out);
    if (cfg.command == "verify") return verify(cfg, out);
    if (cfg.command == "classify") return classify_cmd(cfg, out);
    if (cfg.command == "markov") return markov(cfg, out);
    throw UsageError("unknown command '" + cfg.command + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "failed: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace matsg
