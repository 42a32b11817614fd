#include "matsg/json_io.hpp"

#include <cmath>

#include "matsg/error.hpp"

namespace matsg {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + "." + key + ": missing");
  return *it;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<long>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  return j;
}

Rational rational(const Json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational(text(j, where));
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

Real real_value(const Json& j, const std::string& where) {
  try {
    if (j.is_number()) return Real(j.get<double>());
    return parse_real(text(j, where));
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

// Non-finite doubles become null so that the output re-parses to itself.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void check_schema(const Json& j, const std::string& where) {
  std::string s = text(field(j, "schema", where), where + ".schema");
  if (s != kSchema) throw ParseError(where + ".schema: unsupported version '" + s + "'");
}

ScalarMode mode_field(const Json& j, const std::string& where) {
  try {
    return parse_mode(text(field(j, "mode", where), where + ".mode"));
  } catch (const ParseError& e) {
    throw ParseError(where + ".mode: " + e.what());
  }
}

std::string at(const std::string& where, size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace

Json to_json(const Matrix& m) {
  Json entries = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) {
      if (m.is_exact()) row.push_back(to_string(m.exact()(static_cast<int>(i), static_cast<int>(j))));
      else row.push_back(num(m.real()(i, j)));
    }
    entries.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"mode", to_string(m.mode())}, {"entries", entries}};
}

Json to_json(const Mat& m) { return to_json(Matrix(m)); }

Matrix matrix_from_json(const Json& j, const std::string& where) {
  long rows = integer(field(j, "rows", where), where + ".rows");
  long cols = integer(field(j, "cols", where), where + ".cols");
  if (rows < 0 || cols < 0 || rows > 64 || cols > 64) throw ParseError(where + ": dimensions must be in [0, 64]");
  ScalarMode mode = mode_field(j, where);
  const Json& e = array(field(j, "entries", where), where + ".entries");
  if (static_cast<long>(e.size()) != rows) throw ParseError(where + ".entries: expected " + std::to_string(rows) + " rows");
  RatMatrix q(mode == ScalarMode::exact ? static_cast<int>(rows) : 0, mode == ScalarMode::exact ? static_cast<int>(cols) : 0);
  Mat r(mode == ScalarMode::real ? rows : 0, mode == ScalarMode::real ? cols : 0);
  for (long i = 0; i < rows; ++i) {
    std::string wr = at(where + ".entries", i);
    const Json& row = array(e[i], wr);
    if (static_cast<long>(row.size()) != cols) throw ParseError(wr + ": expected " + std::to_string(cols) + " entries");
    for (long k = 0; k < cols; ++k) {
      std::string wk = at(wr, k);
      if (mode == ScalarMode::exact) q(static_cast<int>(i), static_cast<int>(k)) = rational(row[k], wk);
      else r(i, k) = number(row[k], wk);
    }
  }
  return mode == ScalarMode::exact ? Matrix(q) : Matrix(r);
}

Json to_json(const ModuleBasis& b) {
  Json out = Json::array();
  for (const auto& e : b.entries()) {
    Json j = {{"label", e.label}, {"value", to_string(e.value)}, {"precision", e.precision}};
    if (e.exact) j["exact"] = to_string(*e.exact);
    out.push_back(std::move(j));
  }
  return out;
}

BasisPtr basis_from_json(const Json& j) {
  const Json& arr = array(j, "basis");
  std::vector<BasisEntry> entries;
  for (size_t i = 0; i < arr.size(); ++i) {
    std::string w = at("basis", i);
    BasisEntry e;
    e.label = text(field(arr[i], "label", w), w + ".label");
    e.value = arr[i].contains("value") ? real_value(arr[i]["value"], w + ".value") : real_value(Json(e.label), w + ".label");
    if (arr[i].contains("precision")) e.precision = static_cast<int>(integer(arr[i]["precision"], w + ".precision"));
    if (arr[i].contains("exact")) e.exact = rational(arr[i]["exact"], w + ".exact");
    entries.push_back(std::move(e));
  }
  try {
    return ModuleBasis::make(std::move(entries));
  } catch (const DomainError& e) {
    throw ParseError(std::string("basis: ") + e.what());
  }
}

Json to_json(const ModuleElement& x) {
  Json out = Json::array();
  for (const auto& c : x.coords()) out.push_back(to_string(c));
  return out;
}

ModuleElement element_from_json(const Json& j, const BasisPtr& basis, const std::string& where) {
  const Json& arr = array(j, where);
  if (arr.size() != basis->size())
    throw ParseError(where + ": expected " + std::to_string(basis->size()) + " coordinates");
  std::vector<Rational> c;
  for (size_t i = 0; i < arr.size(); ++i) c.push_back(rational(arr[i], at(where, i)));
  return ModuleElement(basis, std::move(c));
}

Json to_json(const CauchySolution& f) {
  Json values = Json::array();
  if (f.mode() == ScalarMode::exact)
    for (const auto& v : f.exact_values()) values.push_back(to_string(v));
  else
    for (const auto& v : f.values()) values.push_back(to_string(v));
  Json out = {{"basis", to_json(*f.basis())}, {"values", values}, {"mode", to_string(f.mode())}};
  if (f.mode() == ScalarMode::exact && f.unit_label() != "1") {
    out["unit"] = to_string(f.unit());
    out["unit_label"] = f.unit_label();
  }
  return out;
}

namespace {

CauchySolution cauchy_on(const Json& j, const BasisPtr& basis, const std::string& where) {
  ScalarMode mode = mode_field(j, where);
  const Json& vals = array(field(j, "values", where), where + ".values");
  if (vals.size() != basis->size())
    throw ParseError(where + ".values: expected " + std::to_string(basis->size()) + " values");
  if (mode == ScalarMode::exact) {
    std::vector<Rational> v;
    for (size_t i = 0; i < vals.size(); ++i) v.push_back(rational(vals[i], at(where + ".values", i)));
    if (j.contains("unit"))
      return CauchySolution::exact(basis, std::move(v), real_value(j["unit"], where + ".unit"),
                                   j.contains("unit_label") ? text(j["unit_label"], where + ".unit_label") : "unit");
    return CauchySolution::exact(basis, std::move(v));
  }
  std::vector<Real> v;
  for (size_t i = 0; i < vals.size(); ++i) v.push_back(real_value(vals[i], at(where + ".values", i)));
  return CauchySolution::real(basis, std::move(v));
}

BasisPtr shared_basis(const Json& j, const BasisPtr& basis, const std::string& where) {
  if (!j.contains("basis")) return basis;
  BasisPtr b = basis_from_json(j["basis"]);
  if (!b->same_as(*basis)) throw ParseError(where + ".basis: differs from the document basis");
  return basis;
}

}  // namespace

CauchySolution cauchy_from_json(const Json& j) {
  return cauchy_on(j, basis_from_json(field(j, "basis", "solution")), "solution");
}

Json to_json(const BoundFunction& f) {
  if (f.tabulated()) {
    Json t = Json::array();
    for (auto [x, v] : f.table()) t.push_back({x, v});
    return {{"table", t}};
  }
  return {{"expression", f.text()}};
}

BoundFunction bound_from_json(const Json& j) {
  if (j.is_string()) return BoundFunction::from_expression(j.get<std::string>());
  if (j.contains("expression")) return BoundFunction::from_expression(text(j["expression"], "bound.expression"));
  const Json& t = array(field(j, "table", "bound"), "bound.table");
  std::vector<std::pair<double, double>> rows;
  for (size_t i = 0; i < t.size(); ++i) {
    std::string w = at("bound.table", i);
    if (!t[i].is_array() || t[i].size() != 2) throw ParseError(w + ": expected [x, f(x)]");
    rows.emplace_back(number(t[i][0], w), number(t[i][1], w));
  }
  return BoundFunction::from_table(std::move(rows));
}

Json to_json(const SemigroupModel& m) {
  Json blocks = Json::array();
  for (const auto& b : m.blocks()) {
    if (auto* p = std::get_if<PlainBlock>(&b)) {
      blocks.push_back({{"kind", "plain"}, {"m", to_json(p->m)}});
    } else if (auto* r = std::get_if<RotatingBlock>(&b)) {
      Json nu = to_json(r->nu);
      nu.erase("basis");
      Json jb = {{"kind", "rotating"}, {"m", to_json(r->m)}, {"nu", nu}};
      if (r->unit) jb["unit"] = {{"cos", to_string(r->unit->cos)}, {"sin", to_string(r->unit->sin)}};
      blocks.push_back(std::move(jb));
    } else {
      blocks.push_back({{"kind", "zero"}, {"dim", std::get<ZeroBlock>(b).dim}});
    }
  }
  Json out = {{"schema", kSchema}, {"basis", to_json(*m.basis())}, {"mode", to_string(m.mode())}, {"blocks", blocks}};
  if (m.conjugator()) out["conjugator"] = to_json(*m.conjugator());
  return out;
}

SemigroupModel model_from_json(const Json& j) {
  check_schema(j, "model");
  BasisPtr basis = basis_from_json(field(j, "basis", "model"));
  ScalarMode mode = mode_field(j, "model");
  const Json& arr = array(field(j, "blocks", "model"), "model.blocks");
  std::vector<Block> blocks;
  for (size_t i = 0; i < arr.size(); ++i) {
    std::string w = at("model.blocks", i);
    std::string kind = text(field(arr[i], "kind", w), w + ".kind");
    if (kind == "plain") {
      blocks.push_back(PlainBlock{matrix_from_json(field(arr[i], "m", w), w + ".m")});
    } else if (kind == "rotating") {
      const Json& nu = field(arr[i], "nu", w);
      RotatingBlock rb{matrix_from_json(field(arr[i], "m", w), w + ".m"),
                       cauchy_on(nu, shared_basis(nu, basis, w + ".nu"), w + ".nu"), std::nullopt};
      if (arr[i].contains("unit")) {
        const Json& u = arr[i]["unit"];
        rb.unit = AngleUnit{rational(field(u, "cos", w + ".unit"), w + ".unit.cos"),
                            rational(field(u, "sin", w + ".unit"), w + ".unit.sin")};
      }
      blocks.push_back(std::move(rb));
    } else if (kind == "zero") {
      blocks.push_back(ZeroBlock{static_cast<int>(integer(field(arr[i], "dim", w), w + ".dim"))});
    } else {
      throw ParseError(w + ".kind: unknown block kind '" + kind + "'");
    }
  }
  std::optional<Matrix> conj;
  if (j.contains("conjugator")) conj = matrix_from_json(j["conjugator"], "model.conjugator");
  try {
    return SemigroupModel(basis, mode, std::move(blocks), std::move(conj));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

Json to_json(const SampleSet& s) {
  Json points = Json::array(), samples = Json::object();
  for (const auto& x : s.points) points.push_back(to_json(x));
  for (size_t i = 0; i < s.samples.size(); ++i) samples[std::to_string(i)] = to_json(s.samples[i]);
  Json out = {{"schema", kSchema}, {"basis", to_json(*s.basis)}, {"mode", to_string(s.mode)},
              {"points", points}, {"samples", samples}};
  if (s.bound) out["bound"] = to_json(*s.bound);
  return out;
}

SampleSet samples_from_json(const Json& j) {
  check_schema(j, "samples");
  SampleSet s;
  s.basis = basis_from_json(field(j, "basis", "samples"));
  s.mode = mode_field(j, "samples");
  const Json& pts = array(field(j, "points", "samples"), "samples.points");
  // Samples keyed by point index; a plain array in point order is accepted too.
  const Json& gs = field(j, "samples", "samples");
  if (!gs.is_object() && !gs.is_array()) throw ParseError("samples.samples: expected an object keyed by point index");
  if (gs.size() != pts.size()) throw ParseError("samples: points and samples differ in count");
  for (size_t i = 0; i < pts.size(); ++i) {
    s.points.push_back(element_from_json(pts[i], s.basis, at("samples.points", i)));
    std::string key = std::to_string(i);
    if (gs.is_object() && !gs.contains(key)) throw ParseError("samples.samples." + key + ": missing");
    s.samples.push_back(matrix_from_json(gs.is_object() ? gs[key] : gs[i], "samples.samples." + key));
  }
  if (j.contains("bound")) s.bound = bound_from_json(j["bound"]);
  try {
    s.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("samples: ") + e.what());
  }
  return s;
}

Json to_json(const CovarianceModel& r) {
  Json out = {{"kind", to_string(r.kind())}, {"dim", r.dimension()}};
  if (r.hurst()) out["H"] = *r.hurst();
  if (r.kind() == KernelKind::table) {
    Json values = Json::array();
    for (const auto& row : r.values()) {
      Json jr = Json::array();
      for (const auto& m : row) jr.push_back(to_json(m));
      values.push_back(std::move(jr));
    }
    out["grid"] = {{"times", r.times()}, {"values", values}};
  }
  return out;
}

CovarianceModel covariance_from_json(const Json& j) {
  std::string kind = text(field(j, "kind", "kernel"), "kernel.kind");
  int d = j.contains("dim") ? static_cast<int>(integer(j["dim"], "kernel.dim")) : 1;
  std::optional<double> h;
  if (j.contains("H")) h = number(j["H"], "kernel.H");
  try {
    if (kind == "min") return CovarianceModel::min(d);
    if (kind == "fractional") {
      if (!h) throw ParseError("kernel.H: missing");
      return CovarianceModel::fractional(*h, d);
    }
    if (kind == "table") {
      const Json& grid = field(j, "grid", "kernel");
      const Json& times = array(field(grid, "times", "kernel.grid"), "kernel.grid.times");
      const Json& values = array(field(grid, "values", "kernel.grid"), "kernel.grid.values");
      std::vector<double> t;
      for (size_t i = 0; i < times.size(); ++i) t.push_back(number(times[i], at("kernel.grid.times", i)));
      std::vector<std::vector<Mat>> v;
      for (size_t i = 0; i < values.size(); ++i) {
        std::string w = at("kernel.grid.values", i);
        std::vector<Mat> row;
        for (size_t k = 0; k < array(values[i], w).size(); ++k) row.push_back(matrix_from_json(values[i][k], at(w, k)).to_real());
        v.push_back(std::move(row));
      }
      return CovarianceModel::table(std::move(t), std::move(v), h);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("kernel: ") + e.what());
  }
  throw ParseError("kernel.kind: unknown kind '" + kind + "'");
}

Json to_json(const SemigroupReport& r, const SampleSet& s) {
  Json viol = Json::array();
  for (const auto& v : r.violations) {
    Json pts = Json::array();
    for (size_t i : v.points) pts.push_back({{"index", i}, {"coords", to_json(s.points[i])}});
    viol.push_back({{"kind", v.kind}, {"points", pts}, {"residual", num(v.residual)}});
  }
  return {{"schema", kSchema},
          {"pass", r.pass},
          {"tol", r.tol},
          {"pairs_checked", r.pairs_checked},
          {"max_identity", num(r.max_identity)},
          {"max_law", num(r.max_law)},
          {"max_commutation", num(r.max_commutation)},
          {"max_kernel", num(r.max_kernel)},
          {"violations", viol}};
}

Json to_json(const BoundReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back({{"index", p.point}, {"x", num(p.value)}, {"norm", num(p.norm)}, {"bound", num(p.bound)},
                   {"margin", num(p.margin)}});
  return {{"pass", r.pass},
          {"one_at_zero", r.one_at_zero},
          {"locally_bounded", r.locally_bounded},
          {"right_continuous", r.right_continuous},
          {"points", pts}};
}

Json to_json(const MarkovReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json je = {{"triple", e.triple}, {"residual", num(e.residual)}};
    if (!e.error.empty()) je["error"] = e.error;
    entries.push_back(std::move(je));
  }
  return {{"pass", r.pass}, {"tol", r.tol}, {"max_residual", num(r.max_residual)}, {"entries", entries}};
}

Json to_json(const StructureResult& r) {
  Json stages = Json::array();
  for (const auto& st : r.stages) {
    Json res = Json::object();
    for (const auto& [k, v] : st.residuals) res[k] = num(v);
    Json js = {{"name", st.name}, {"status", st.pass ? "pass" : "fail"}, {"residuals", res}};
    if (!st.message.empty()) js["message"] = st.message;
    stages.push_back(std::move(js));
  }
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    Json jb = {{"tag", b.tag}, {"dim", b.dim}, {"a", b.a}, {"basis", to_json(b.basis)}};
    if (b.nu) {
      Json vals = Json::array();
      for (const auto& v : b.nu->values()) vals.push_back(num(to_double(v)));
      jb["nu_basis_values"] = vals;
    }
    if (b.u) jb["U"] = to_json(*b.u);
    if (b.m) jb["M"] = to_json(*b.m);
    blocks.push_back(std::move(jb));
  }
  Json viol = Json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"stage", v.stage}, {"kind", v.kind}, {"detail", v.detail}, {"value", num(v.value)}});
  return {{"schema", kSchema}, {"pass", r.pass}, {"reconstruction", num(r.reconstruction)},
          {"stages", stages}, {"blocks", blocks}, {"violations", viol}};
}

}  // namespace matsg
