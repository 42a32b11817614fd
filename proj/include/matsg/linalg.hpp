#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "matsg/cauchy.hpp"
#include "matsg/rational_matrix.hpp"

namespace matsg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// A matrix in one scalar mode: exact rational or 64-bit floating point.
class Matrix {
 public:
  Matrix() : data_(Mat()) {}
  Matrix(Mat m);        // NOLINT: implicit by design of the tagged value
  Matrix(RatMatrix m);  // NOLINT

  ScalarMode mode() const {
    return std::holds_alternative<RatMatrix>(data_) ? ScalarMode::exact : ScalarMode::real;
  }
  bool is_exact() const { return mode() == ScalarMode::exact; }
  long rows() const;
  long cols() const;

  // Floating view; exact entries are rounded.
  Mat to_real() const;
  const Mat& real() const { return std::get<Mat>(data_); }
  const RatMatrix& exact() const { return std::get<RatMatrix>(data_); }
  Mat& real() { return std::get<Mat>(data_); }
  RatMatrix& exact() { return std::get<RatMatrix>(data_); }

  bool operator==(const Matrix& o) const;

 private:
  std::variant<Mat, RatMatrix> data_;
};

Matrix identity_matrix(ScalarMode mode, int n);
Matrix zero_matrix(ScalarMode mode, int n);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
// Both operands promoted to floating point unless both are exact.
Matrix inverse(const Matrix& a);
Matrix transpose(const Matrix& a);
Matrix block_diagonal(const std::vector<Matrix>& blocks);
double frobenius_norm(const Matrix& a);

// Frobenius norm of a - b in the common mode (0 exactly for equal exact
// matrices).
double difference_norm(const Matrix& a, const Matrix& b);

// exp(M) by scaling and squaring with the diagonal [6/6] Pade approximant.
Mat mat_exp(const Mat& m);
// Exact exp(M) for nilpotent M (finite Taylor sum); DomainError otherwise.
RatMatrix mat_exp(const RatMatrix& m);

// log of a unipotent T: sum_{k=1}^{d-1} (-1)^{k+1} (T - id)^k / k.
// tol bounds both the unipotence test and the exp round trip, relative to
// the size of T. DomainError on non-unipotent input.
Mat unipotent_log(const Mat& t, double tol = 1e-8);
RatMatrix unipotent_log(const RatMatrix& t);

bool is_nilpotent(const RatMatrix& m);

struct EigenCluster {
  Complex center;
  int multiplicity = 0;
  CMat basis;  // d x multiplicity, orthonormal columns spanning ker (A - center)^m
  double residual = 0.0;
};

// Eigenvalues grouped by single linkage at distance tol (default
// 1e-7 * ||A||). Clusters whose generalized eigenspaces come out linearly
// dependent (a defective eigenvalue split by rounding) are merged further.
// Real inputs yield conjugation-closed clusters; clusters with |Im| <= tol
// are reported as real.
std::vector<EigenCluster> eigenclusters(const Mat& a, std::optional<double> tol = std::nullopt);
std::vector<EigenCluster> eigenclusters(const CMat& a, std::optional<double> tol = std::nullopt);

// Spectral projector onto each cluster's generalized eigenspace along the
// others. Projectors sum to the identity.
std::vector<CMat> spectral_projectors(const std::vector<EigenCluster>& clusters);

struct InvariantSubspace {
  CMat basis;                        // orthonormal columns
  std::vector<Complex> eigenvalues;  // one per family member
};

// Simultaneous primary decomposition of a commuting family over C.
// PreconditionError when some pair fails ||AB - BA|| <= tol * max(1, ||A|| ||B||).
std::vector<InvariantSubspace> refine_invariant(const std::vector<Mat>& family, double tol = 1e-9);

struct RealInvariantSubspace {
  Mat basis;                   // orthonormal real columns
  int complex_index = -1;      // representative complex component
  int conjugate_index = -1;    // its conjugate partner, -1 for self-conjugate
};

// Pairs each complex component with its conjugate and returns the real
// subspaces they span together.
std::vector<RealInvariantSubspace> real_closure(const std::vector<InvariantSubspace>& components,
                                                double tol = 1e-7);

struct Orthonormalized {
  Mat basis;                   // columns
  std::vector<size_t> dropped; // input indices found linearly dependent
};
// Modified Gram-Schmidt with one re-orthogonalization pass.
Orthonormalized orthonormalize(const std::vector<Vec>& vectors, double tol = 1e-10);
Orthonormalized orthonormalize(const Mat& columns, double tol = 1e-10);

// Largest singular value.
double operator_norm(const Mat& a);

// Orthonormal basis of ker(a) from the singular values below
// threshold * max(1, sigma_max).
Mat kernel_basis(const Mat& a, double threshold = 1e-10);
// Orthonormal basis of range(a).
Mat range_basis(const Mat& a, double threshold = 1e-10);
// Largest principal angle between the column spans (same dimension).
double subspace_distance(const Mat& a, const Mat& b);

// Q(theta) = [[cos, sin], [-sin, cos]].
Mat rotation(double theta);
Mat rotation(const Real& theta);
// k/2 copies of Q(theta) on the diagonal; k even.
Mat rotation_block(int k, const Real& theta);
// Exact Q^n for the rational rotation with cosine c and sine s.
RatMatrix rotation_block_exact(int k, const Rational& c, const Rational& s, const Integer& n);

// Block of k/2 rotations driven by an additive angle.
class RotationBlock {
 public:
  RotationBlock(int k, CauchySolution nu);
  int dimension() const { return k_; }
  const CauchySolution& angle() const { return nu_; }
  // Angle evaluated at working precision, then rounded once.
  Mat realize(const ModuleElement& x) const;

 private:
  int k_;
  CauchySolution nu_;
};

Mat block_diagonal(const std::vector<Mat>& blocks);
RatMatrix block_diagonal(const std::vector<RatMatrix>& blocks);

}  // namespace matsg
