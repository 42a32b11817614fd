#include "matsg/rational_matrix.hpp"

#include <string>

#include "matsg/error.hpp"

namespace matsg {

void check_dimensions(long rows, long cols) {
  if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim)
    throw DomainError("matrix dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " exceed the supported maximum of " + std::to_string(kMaxDim));
}

RatMatrix::RatMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  check_dimensions(rows, cols);
  data_.assign(static_cast<size_t>(rows * cols), Rational(0));
}

RatMatrix RatMatrix::identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  RatMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw DomainError("ragged matrix rows");
    for (int j = 0; j < c; ++j) {
      m(i, j) = rows[i][j];
      m(i, j).canonicalize();
    }
  }
  return m;
}

RatMatrix RatMatrix::from_integers(const std::vector<std::vector<long>>& rows) {
  std::vector<std::vector<Rational>> q;
  for (const auto& row : rows) {
    q.emplace_back();
    for (long v : row) q.back().emplace_back(v);
  }
  return from_rows(q);
}

RatMatrix RatMatrix::operator+(const RatMatrix& o) const {
  RatMatrix r = *this;
  r += o;
  return r;
}

RatMatrix& RatMatrix::operator+=(const RatMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("dimension mismatch in sum");
  for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

RatMatrix RatMatrix::operator-(const RatMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("dimension mismatch in difference");
  RatMatrix r = *this;
  for (size_t k = 0; k < data_.size(); ++k) r.data_[k] -= o.data_[k];
  return r;
}

RatMatrix RatMatrix::operator-() const {
  RatMatrix r = *this;
  for (auto& v : r.data_) v = -v;
  return r;
}

RatMatrix RatMatrix::operator*(const RatMatrix& o) const {
  if (cols_ != o.rows_) throw DomainError("dimension mismatch in product");
  RatMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

RatMatrix RatMatrix::operator*(const Rational& s) const {
  RatMatrix r = *this;
  for (auto& v : r.data_) v *= s;
  return r;
}

bool RatMatrix::operator==(const RatMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RatMatrix RatMatrix::pow(unsigned k) const {
  if (!square()) throw DomainError("power of non-square matrix");
  RatMatrix result = identity(rows_);
  RatMatrix base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

Rational RatMatrix::trace() const {
  Rational t = 0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool RatMatrix::is_zero() const {
  for (const auto& v : data_)
    if (v != 0) return false;
  return true;
}

bool RatMatrix::is_identity() const { return square() && *this == identity(rows_); }

Eigen::MatrixXd RatMatrix::to_double() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RatMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int piv = -1;
    for (int i = row; i < m.rows(); ++i)
      if (m(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
    Rational inv = 1 / m(row, col);
    for (int j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col);
      for (int j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

RatMatrix inverse(const RatMatrix& a) {
  if (!a.square()) throw DomainError("inverse of non-square matrix");
  int n = a.rows();
  RatMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = rref(aug);
  if (static_cast<int>(piv.size()) < n || (n > 0 && piv[n - 1] >= n))
    throw DomainError("matrix is singular");
  RatMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

int rank(const RatMatrix& a) {
  RatMatrix m = a;
  return static_cast<int>(rref(m).size());
}

RatMatrix nullspace(const RatMatrix& a) {
  RatMatrix m = a;
  auto piv = rref(m);
  std::vector<bool> is_piv(static_cast<size_t>(a.cols()), false);
  for (int p : piv) is_piv[static_cast<size_t>(p)] = true;
  int nfree = a.cols() - static_cast<int>(piv.size());
  RatMatrix basis(a.cols(), nfree);
  int k = 0;
  for (int f = 0; f < a.cols(); ++f) {
    if (is_piv[static_cast<size_t>(f)]) continue;
    basis(f, k) = 1;
    for (size_t r = 0; r < piv.size(); ++r) basis(piv[r], k) = -m(static_cast<int>(r), f);
    ++k;
  }
  return basis;
}

Rational determinant(const RatMatrix& a) {
  if (!a.square()) throw DomainError("determinant of non-square matrix");
  RatMatrix m = a;
  int n = m.rows();
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (m(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (int i = col + 1; i < n; ++i) {
      if (m(i, col) == 0) continue;
      Rational f = m(i, col) / m(col, col);
      for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------

RatPolynomial::RatPolynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

RatPolynomial RatPolynomial::monomial(const Rational& c, int degree) {
  std::vector<Rational> v(static_cast<size_t>(degree + 1), Rational(0));
  v.back() = c;
  return RatPolynomial(std::move(v));
}

void RatPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational RatPolynomial::coeff(int k) const {
  return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<size_t>(k)] : Rational(0);
}

Rational RatPolynomial::leading() const { return c_.empty() ? Rational(0) : c_.back(); }

RatPolynomial RatPolynomial::operator+(const RatPolynomial& o) const {
  std::vector<Rational> r(std::max(c_.size(), o.c_.size()), Rational(0));
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return RatPolynomial(std::move(r));
}

RatPolynomial RatPolynomial::operator-(const RatPolynomial& o) const { return *this + o * Rational(-1); }

RatPolynomial RatPolynomial::operator*(const RatPolynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return RatPolynomial(std::move(r));
}

RatPolynomial RatPolynomial::operator*(const Rational& s) const {
  std::vector<Rational> r = c_;
  for (auto& v : r) v *= s;
  return RatPolynomial(std::move(r));
}

RatPolynomial RatPolynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> r(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) r[k - 1] = c_[k] * static_cast<long>(k);
  return RatPolynomial(std::move(r));
}

RatPolynomial RatPolynomial::monic() const {
  if (is_zero()) return {};
  return *this * (1 / leading());
}

Rational RatPolynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RatMatrix RatPolynomial::operator()(const RatMatrix& a) const {
  if (!a.square()) throw DomainError("polynomial of non-square matrix");
  RatMatrix acc(a.rows(), a.cols());
  RatMatrix id = RatMatrix::identity(a.rows());
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * a + id * *it;
  return acc;
}

std::pair<RatPolynomial, RatPolynomial> divmod(const RatPolynomial& a, const RatPolynomial& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  RatPolynomial q, r = a;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    RatPolynomial t = RatPolynomial::monomial(r.leading() / b.leading(), r.degree() - b.degree());
    q = q + t;
    r = r - t * b;
  }
  return {q, r};
}

RatPolynomial gcd(RatPolynomial a, RatPolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

RatPolynomial characteristic_polynomial(const RatMatrix& a) {
  if (!a.square()) throw DomainError("characteristic polynomial of non-square matrix");
  int n = a.rows();
  // c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k)/k.
  std::vector<Rational> c(static_cast<size_t>(n + 1), Rational(0));
  c[static_cast<size_t>(n)] = 1;
  RatMatrix m(n, n);
  RatMatrix id = RatMatrix::identity(n);
  for (int k = 1; k <= n; ++k) {
    m = a * m + id * c[static_cast<size_t>(n - k + 1)];
    c[static_cast<size_t>(n - k)] = -(a * m).trace() / k;
  }
  return RatPolynomial(std::move(c));
}

}  // namespace matsg
