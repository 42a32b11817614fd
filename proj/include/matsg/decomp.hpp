#pragma once

// Recovery of the structure g(x) = S(x) exp(Mx) from samples of a matrix
// semigroup: kernel split, primary decomposition, Jordan-Chevalley factors,
// generators, partition by equivalent rotation angles and rotation normal
// form.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matsg/bound.hpp"
#include "matsg/cauchy.hpp"
#include "matsg/linalg.hpp"
#include "matsg/semigroup.hpp"

namespace matsg {

struct Tolerances {
  double verify = 1e-9;
  double recover = 1e-8;
};

struct KernelSplit {
  Mat v1;  // orthonormal basis of the invertible part
  Mat v2;  // orthonormal basis of the common kernel
  SampleSet invertible;  // samples restricted to v1 (coordinates in v1)
  double kernel_angle = 0.0;  // largest principal angle between sampled kernels
};

// PreconditionError without samples at x > 0 is not raised: the zero part is
// then empty. InconsistencyError when kernels disagree across x > 0.
KernelSplit kernel_split(const SampleSet& s, const Tolerances& tol = {});

enum class ComponentType { first, second };
std::string to_string(ComponentType t);

struct PrimaryComponent {
  Mat basis;              // real orthonormal columns
  ComponentType type = ComponentType::first;
  CMat complex_basis;     // second type: the component U1 with Im lambda > 0 where first non-real
  std::vector<Complex> track;  // lambda(x) per sample point
  // Real track at every sample but negative somewhere: a rotation that the
  // samples cannot tell apart from a real eigenvalue.
  bool ambiguous = false;
};

// Complex components of the commuting sample family.
std::vector<InvariantSubspace> spd(const SampleSet& s, const Tolerances& tol = {});
// Real components, conjugate complex components merged.
std::vector<PrimaryComponent> srpd(const SampleSet& s, const Tolerances& tol = {});

// Unit vector v with g(x) v = lambda(x) v at every sample.
struct CommonEigenvector {
  Vec vector;
  int iterations = 0;
  double residual = 0.0;
};
CommonEigenvector common_eigenvector(const SampleSet& s, const PrimaryComponent& comp,
                                     const Tolerances& tol = {});

// Multiplicative Jordan-Chevalley decomposition A = D T = T D. Exact input
// gives exact output.
struct JCPair {
  Matrix d, t;
};
JCPair jc_multiplicative(const Matrix& a);

struct IdentityCheck {
  IdentityCheck(std::string n = {}) : name(std::move(n)) {}  // NOLINT
  std::string name;  // D(x)D(y)=D(x+y) | T(x)T(y)=T(x+y) | T(x)D(y)=D(y)T(x) | N(x)+N(y)=N(x+y) | DT=TD=g
  double max_residual = 0.0;
  std::vector<size_t> worst;  // sample indices of the worst case
  bool pass = true;
};

struct JCResult {
  std::vector<Mat> d, t, n, j;  // per sample point
  std::vector<IdentityCheck> checks;
  bool pass = true;
};
JCResult semigroup_jc(const SampleSet& s, const Tolerances& tol = {});

struct ComponentGenerators {
  double a = 0.0;           // mu(x) = a x
  double a_residual = 0.0;
  Mat p;                    // N(x) = P x, in the component basis
  double p_residual = 0.0;
  std::vector<double> nu_track;  // arg lambda(x) in (-pi, pi]
};

// InconsistencyError when log|lambda| or N is not linear in x within tol.recover.
// With a bound, PreconditionError when the samples violate it.
std::vector<ComponentGenerators> generators(const SampleSet& s,
                                            const std::vector<PrimaryComponent>& comps,
                                            const JCResult& jc, const BoundFunction* f = nullptr,
                                            const Tolerances& tol = {});

struct PartitionBlock {
  std::vector<size_t> components;
  CauchySolution eta;             // representative angle, zero for the linear class
  bool linear_class = false;
  std::vector<Real> offsets;      // nu_j = orientation_j (eta + offset_j x)
  std::vector<int> orientation;   // +1 or -1 per component
};

struct Partition {
  std::vector<PartitionBlock> blocks;
  // Sub-lattice generators of the sampled points (rows: coordinates).
  std::vector<std::vector<Rational>> lattice;
  // Component pairs whose equivalence test was within a factor 100 of the
  // tolerance on the failing side.
  std::vector<std::pair<size_t, size_t>> borderline;
};

Partition partitioned_srpd(const SampleSet& s, const std::vector<PrimaryComponent>& comps,
                           const std::vector<ComponentGenerators>& gens, const Tolerances& tol = {});

struct NormalForm {
  Mat u;  // orthogonal, u Q^eta(x) u^T = S(x)
  double orthogonality = 0.0;    // ||U U^T - id||
  double reconstruction = 0.0;   // max over samples of ||U Q U^T - S||
  double independence = 0.0;     // spread of u across admissible samples
};

// s_samples: isometric block samples in an orthonormal basis of the block;
// eta: the block angle at each sample. DegeneracyError when sin(eta) ~ 0 at
// every sample.
NormalForm rotation_normal_form(const std::vector<Mat>& s_samples, const std::vector<Real>& eta,
                                const Tolerances& tol = {});

struct Stage {
  Stage(std::string n = {}) : name(std::move(n)) {}  // NOLINT
  std::string name;
  bool pass = true;
  std::map<std::string, double> residuals;
  std::string message;
};

struct ReportViolation {
  std::string stage;
  std::string kind;
  std::string detail;
  double value = 0.0;
};

struct StructureBlock {
  std::string tag;  // elementary-plain | elementary-rotating | zero
  int dim = 0;
  Mat basis;                   // orthonormal columns (ambient)
  std::vector<double> a;       // per primary component
  std::optional<CauchySolution> nu;  // block angle on the sample basis
  std::optional<Mat> u;        // ambient columns, U^T S(x) U = Q^nu(x)
  std::optional<Mat> m;        // generator in the block basis
};

struct StructureResult {
  bool pass = true;
  std::vector<Stage> stages;
  std::vector<StructureBlock> blocks;
  std::vector<ReportViolation> violations;
  Mat m;                      // ambient generator on the invertible part (zero on the kernel)
  std::vector<Mat> s;         // ambient S(x) per sample
  double reconstruction = 0.0;
  std::vector<PrimaryComponent> components;
  std::vector<ComponentGenerators> generators;
};

// Structure of an invertible sample set (coordinates as given).
StructureResult structure(const SampleSet& s, const BoundFunction& f, const Tolerances& tol = {});

// Full pipeline including the zero part.
StructureResult classify(const SampleSet& s, const BoundFunction& f, const Tolerances& tol = {});

}  // namespace matsg
