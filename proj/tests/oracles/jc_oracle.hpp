#pragma once

// Exact semisimple part of A = P J P^{-1} with known integer eigenvalues,
// computed as D = p(A) where p is the Hermite interpolant with
// p = lambda_i mod (t - lambda_i)^{m_i}. Self-contained: plain mpq_class
// vectors and a local Gaussian elimination, nothing from the library.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;
using QMat = std::vector<std::vector<Q>>;

inline QMat identity(int n) {
  QMat m(n, std::vector<Q>(n, Q(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline QMat mul(const QMat& a, const QMat& b) {
  size_t n = a.size(), k = b.size(), p = b[0].size();
  QMat c(n, std::vector<Q>(p, Q(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (size_t j = 0; j < p; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

inline QMat add(const QMat& a, const QMat& b, const Q& sb = 1) {
  QMat c = a;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) c[i][j] += sb * b[i][j];
  return c;
}

// Solves V c = rhs exactly (V square, invertible).
inline std::vector<Q> solve(QMat v, std::vector<Q> rhs) {
  const size_t n = v.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (v[piv][col] == 0) ++piv;
    std::swap(v[piv], v[col]);
    std::swap(rhs[piv], rhs[col]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || v[r][col] == 0) continue;
      Q f = v[r][col] / v[col][col];
      for (size_t j = col; j < n; ++j) v[r][j] -= f * v[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Q> c(n);
  for (size_t i = 0; i < n; ++i) c[i] = rhs[i] / v[i][i];
  return c;
}

// eigen: (lambda, algebraic multiplicity) pairs, sum of multiplicities = d.
inline QMat semisimple_part(const QMat& a, const std::vector<std::pair<long, int>>& eigen) {
  const int d = static_cast<int>(a.size());
  // Rows: conditions p^{(k)}(lambda) = [k == 0] lambda, unknowns: coefficients c_0..c_{d-1}.
  QMat v;
  std::vector<Q> rhs;
  for (auto [lam, m] : eigen) {
    for (int k = 0; k < m; ++k) {
      std::vector<Q> row(d, Q(0));
      for (int j = k; j < d; ++j) {
        // d^k/dt^k t^j = j!/(j-k)! t^{j-k}
        Q coef = 1;
        for (int r = 0; r < k; ++r) coef *= (j - r);
        Q pw = 1;
        for (int r = 0; r < j - k; ++r) pw *= lam;
        row[j] = coef * pw;
      }
      v.push_back(row);
      rhs.push_back(k == 0 ? Q(lam) : Q(0));
    }
  }
  std::vector<Q> c = solve(v, rhs);
  QMat out(d, std::vector<Q>(d, Q(0)));
  QMat pw = identity(d);
  for (int j = 0; j < d; ++j) {
    out = add(out, pw, c[j]);
    pw = mul(pw, a);
  }
  return out;
}

struct Instance {
  QMat a;
  std::vector<std::pair<long, int>> eigen;
};

// Random A = P J P^{-1}: J of Jordan blocks with nonzero integer
// eigenvalues, P a product of elementary shears whose inverse is formed from
// the inverse shears in reverse order.
inline Instance random_instance(std::uint64_t seed, int max_dim = 5) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int d = uni(1, max_dim);
  QMat j(d, std::vector<Q>(d, Q(0)));
  std::vector<std::pair<long, int>> eigen;
  int pos = 0;
  while (pos < d) {
    long lam = 0;
    while (lam == 0) lam = uni(-4, 4);
    int size = std::min(d - pos, uni(1, 3));
    for (int i = 0; i < size; ++i) {
      j[pos + i][pos + i] = lam;
      if (i + 1 < size) j[pos + i][pos + i + 1] = 1;
    }
    bool merged = false;
    for (auto& e : eigen)
      if (e.first == lam) {
        e.second += size;
        merged = true;
      }
    if (!merged) eigen.emplace_back(lam, size);
    pos += size;
  }
  QMat p = identity(d), pinv = identity(d);
  for (int step = 0; step < 3 * d && d > 1; ++step) {
    int r = uni(0, d - 1), c = uni(0, d - 1);
    if (r == c) continue;
    Q f(uni(-3, 3), uni(1, 2));
    f.canonicalize();
    QMat e = identity(d), einv = identity(d);
    e[r][c] = f;
    einv[r][c] = -f;
    p = mul(p, e);
    pinv = mul(einv, pinv);
  }
  return {mul(mul(p, j), pinv), eigen};
}

}  // namespace oracle
