#pragma once

// JSON documents: matrices, bases, Cauchy solutions, models, sample sets,
// kernels and reports. Documents carry "schema": "1". Readers raise
// ParseError naming the offending field.

#include <json.hpp>

#include "matsg/decomp.hpp"
#include "matsg/gaussmarkov.hpp"
#include "matsg/semigroup.hpp"

namespace matsg {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "1";

// {rows, cols, mode, entries}; exact entries are "p/q" strings.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& where = "matrix");
Json to_json(const Mat& m);

Json to_json(const ModuleBasis& b);
BasisPtr basis_from_json(const Json& j);

Json to_json(const ModuleElement& x);
ModuleElement element_from_json(const Json& j, const BasisPtr& basis, const std::string& where = "point");

// {basis, values, mode, unit?, unit_label?}
Json to_json(const CauchySolution& f);
CauchySolution cauchy_from_json(const Json& j);

Json to_json(const BoundFunction& f);
BoundFunction bound_from_json(const Json& j);

// {schema, basis, mode, blocks, conjugator?}
Json to_json(const SemigroupModel& m);
SemigroupModel model_from_json(const Json& j);

// {schema, basis, mode, points, samples, bound?}
Json to_json(const SampleSet& s);
SampleSet samples_from_json(const Json& j);

// {kind: "min" | "fractional" | "table", H?, dim?, grid?: {times, values}}
Json to_json(const CovarianceModel& r);
CovarianceModel covariance_from_json(const Json& j);

Json to_json(const SemigroupReport& r, const SampleSet& s);
Json to_json(const BoundReport& r);
Json to_json(const MarkovReport& r);
// {schema, stages, blocks, violations}
Json to_json(const StructureResult& r);

}  // namespace matsg
