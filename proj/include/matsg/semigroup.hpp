#pragma once

// Matrix semigroups g : module -> L(V) with g(0) = id, g(x + y) = g(x) g(y),
// built from elementary blocks exp(Mx) and Q^nu(x) exp(Mx), zero blocks and
// a global change of basis.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matsg/bound.hpp"
#include "matsg/cauchy.hpp"
#include "matsg/linalg.hpp"

namespace matsg {

// Rotation angle unit with rational cosine and sine, e.g. (3/5, 4/5). Exact
// rotating blocks measure nu in multiples of this unit.
struct AngleUnit {
  Rational cos, sin;
  Real angle() const;
};

struct PlainBlock {
  Matrix m;
};

struct RotatingBlock {
  Matrix m;
  CauchySolution nu;
  std::optional<AngleUnit> unit;  // required in exact mode
};

struct ZeroBlock {
  int dim = 0;
};

using Block = std::variant<PlainBlock, RotatingBlock, ZeroBlock>;

int block_dimension(const Block& b);

class SemigroupModel {
 public:
  SemigroupModel(BasisPtr basis, ScalarMode mode, std::vector<Block> blocks,
                 std::optional<Matrix> conjugator = std::nullopt);

  const BasisPtr& basis() const { return basis_; }
  ScalarMode mode() const { return mode_; }
  int dimension() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::optional<Matrix>& conjugator() const { return conj_; }

  // A g_blocks(x) A^{-1}. Exact mode needs exact values wherever M != 0 and
  // integral multiples of the angle unit.
  Matrix evaluate(const ModuleElement& x) const;
  // Block-diagonal value before conjugation.
  Matrix evaluate_blocks(const ModuleElement& x) const;

 private:
  BasisPtr basis_;
  ScalarMode mode_;
  std::vector<Block> blocks_;
  std::optional<Matrix> conj_;
  std::optional<Matrix> conj_inv_;
  int dim_ = 0;
};

// diag(L, ..., L), L = [[0, 1], [-1, 0]]; Q(theta) = exp(theta L).
Mat skew_unit(int k);
RatMatrix skew_unit_exact(int k);

// A Q^nu(x) exp(Mx) A^{-1}, or A exp(Mx) A^{-1} without nu. A linear nu is
// folded into M in real mode.
SemigroupModel build_elementary(BasisPtr basis, const Matrix& m,
                                const std::optional<CauchySolution>& nu = std::nullopt,
                                const std::optional<Matrix>& conjugator = std::nullopt,
                                const std::optional<AngleUnit>& unit = std::nullopt);
SemigroupModel zero_model(BasisPtr basis, ScalarMode mode, int k);
SemigroupModel direct_sum(const std::vector<SemigroupModel>& models);
SemigroupModel with_zero_block(const SemigroupModel& model, int k);
SemigroupModel conjugate(const SemigroupModel& model, const Matrix& a);

struct SampleSet {
  BasisPtr basis;
  ScalarMode mode = ScalarMode::real;
  std::vector<ModuleElement> points;
  std::vector<Matrix> samples;
  std::optional<BoundFunction> bound;

  int dimension() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
  size_t size() const { return points.size(); }
  std::optional<size_t> find(const ModuleElement& x) const;
  // Index of the zero point.
  size_t origin() const;
  // Checks the structural invariants (zero present, consistent sizes/modes).
  void validate() const;
  // Same points restricted to the subspace with orthonormal basis columns B:
  // B^T g(x) B (floating point).
  SampleSet restricted(const Mat& basis_columns) const;
};

// 0, k/8 r_i (k = 1..8) and r_i + r_j (i <= j).
std::vector<ModuleElement> default_points(const BasisPtr& basis);

SampleSet sample(const SemigroupModel& model, const std::vector<ModuleElement>& points);
SampleSet sample(const SemigroupModel& model);

struct Violation {
  std::string kind;  // identity | law | commutation | kernel
  std::vector<size_t> points;
  double residual = 0.0;
};

struct SemigroupReport {
  bool pass = true;
  double tol = 0.0;
  size_t pairs_checked = 0;
  double max_identity = 0.0, max_law = 0.0, max_commutation = 0.0, max_kernel = 0.0;
  std::vector<Violation> violations;
};

// Residuals are Frobenius norms scaled by max(1, ||g(x)|| ||g(y)||); exact
// samples are compared exactly (residual 0 or the rounded norm).
SemigroupReport verify_semigroup(const SampleSet& s, double tol);

struct BoundPoint {
  size_t point = 0;
  double value = 0.0, norm = 0.0, bound = 0.0, margin = 0.0;
};

struct BoundReport {
  bool pass = true;
  bool one_at_zero = true, locally_bounded = true, right_continuous = true;
  std::vector<BoundPoint> points;
};

BoundReport verify_bound(const SampleSet& s, const BoundFunction& f);

}  // namespace matsg
