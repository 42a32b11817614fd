#pragma once

#include <Eigen/Dense>
#include <vector>

#include "matsg/scalar.hpp"

namespace matsg {

// Desk-scale kernel: every matrix in the library has at most this many rows
// and columns.
inline constexpr int kMaxDim = 64;

void check_dimensions(long rows, long cols);

// Dense matrix over Q with exact arithmetic.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols);

  static RatMatrix identity(int n);
  static RatMatrix from_rows(const std::vector<std::vector<Rational>>& rows);
  static RatMatrix from_integers(const std::vector<std::vector<long>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Rational& operator()(int i, int j) { return data_[static_cast<size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const {
    return data_[static_cast<size_t>(i * cols_ + j)];
  }

  RatMatrix operator+(const RatMatrix& o) const;
  RatMatrix operator-(const RatMatrix& o) const;
  RatMatrix operator*(const RatMatrix& o) const;
  RatMatrix operator*(const Rational& s) const;
  RatMatrix operator-() const;
  RatMatrix& operator+=(const RatMatrix& o);
  bool operator==(const RatMatrix& o) const;
  bool operator!=(const RatMatrix& o) const { return !(*this == o); }

  RatMatrix transpose() const;
  RatMatrix pow(unsigned k) const;
  Rational trace() const;
  bool is_zero() const;
  bool is_identity() const;

  Eigen::MatrixXd to_double() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

inline RatMatrix operator*(const Rational& s, const RatMatrix& m) { return m * s; }

// Gauss-Jordan inverse; DomainError when singular or non-square.
RatMatrix inverse(const RatMatrix& a);
int rank(const RatMatrix& a);
// Columns form a basis of {v : a v = 0}.
RatMatrix nullspace(const RatMatrix& a);
Rational determinant(const RatMatrix& a);

// Polynomial over Q, coefficients stored from the constant term upwards.
class RatPolynomial {
 public:
  RatPolynomial() = default;
  explicit RatPolynomial(std::vector<Rational> coeffs);
  static RatPolynomial monomial(const Rational& c, int degree);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int k) const;
  Rational leading() const;

  RatPolynomial operator+(const RatPolynomial& o) const;
  RatPolynomial operator-(const RatPolynomial& o) const;
  RatPolynomial operator*(const RatPolynomial& o) const;
  RatPolynomial operator*(const Rational& s) const;
  bool operator==(const RatPolynomial& o) const { return c_ == o.c_; }

  RatPolynomial derivative() const;
  RatPolynomial monic() const;
  Rational operator()(const Rational& x) const;
  // Horner evaluation at a square matrix.
  RatMatrix operator()(const RatMatrix& a) const;

 private:
  void trim();
  std::vector<Rational> c_;
};

// quotient, remainder
std::pair<RatPolynomial, RatPolynomial> divmod(const RatPolynomial& a, const RatPolynomial& b);
RatPolynomial gcd(RatPolynomial a, RatPolynomial b);  // monic, or zero

// det(t I - a) by Faddeev-LeVerrier.
RatPolynomial characteristic_polynomial(const RatMatrix& a);

}  // namespace matsg
