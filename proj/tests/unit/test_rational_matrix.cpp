#include <doctest.h>

#include <random>

#include "matsg/error.hpp"
#include "matsg/rational_matrix.hpp"

using namespace matsg;

namespace {

RatMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  RatMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = Rational(num(rng), den(rng));
      a(i, j).canonicalize();
    }
  return a;
}

}  // namespace

TEST_CASE("basic arithmetic") {
  RatMatrix a = RatMatrix::from_integers({{1, 2}, {3, 4}});
  RatMatrix b = RatMatrix::from_integers({{0, 1}, {1, 0}});
  CHECK(a * b == RatMatrix::from_integers({{2, 1}, {4, 3}}));
  CHECK(a + b == RatMatrix::from_integers({{1, 3}, {4, 4}}));
  CHECK(a.transpose() == RatMatrix::from_integers({{1, 3}, {2, 4}}));
  CHECK(a.trace() == 5);
  CHECK(b.pow(2).is_identity());
  CHECK(RatMatrix(2, 2).is_zero());
  CHECK(determinant(a) == -2);
}

TEST_CASE("inverse is exact") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    RatMatrix a = random_matrix(4, rng);
    if (determinant(a) == 0) continue;
    CHECK((a * inverse(a)).is_identity());
    CHECK((inverse(a) * a).is_identity());
  }
  CHECK_THROWS_AS(inverse(RatMatrix::from_integers({{1, 2}, {2, 4}})), DomainError);
  CHECK_THROWS_AS(inverse(RatMatrix(2, 3)), DomainError);
}

TEST_CASE("rank and nullspace") {
  RatMatrix a = RatMatrix::from_integers({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  CHECK(rank(a) == 2);
  RatMatrix n = nullspace(a);
  CHECK(n.cols() == 1);
  CHECK((a * n).is_zero());
  CHECK(nullspace(RatMatrix::identity(3)).cols() == 0);
  CHECK(rank(RatMatrix(3, 3)) == 0);
}

TEST_CASE("dimensions above 64 are rejected") {
  CHECK_THROWS_AS(RatMatrix(65, 1), DomainError);
  CHECK_NOTHROW(RatMatrix(64, 64));
}

TEST_CASE("polynomial division and gcd") {
  // (t - 1)^2 (t + 2) and (t - 1)(t + 3)
  RatPolynomial p({Rational(2), Rational(-3), Rational(0), Rational(1)});
  RatPolynomial q({Rational(-3), Rational(2), Rational(1)});
  auto [quot, rem] = divmod(p, q);
  CHECK(quot * q + rem == p);
  CHECK(rem.degree() < q.degree());
  CHECK(gcd(p, q) == RatPolynomial({Rational(-1), Rational(1)}));
  CHECK(p(Rational(1)) == 0);
  CHECK(p.derivative() == RatPolynomial({Rational(-3), Rational(0), Rational(3)}));
}

TEST_CASE("characteristic polynomial and Cayley-Hamilton") {
  RatMatrix a = RatMatrix::from_integers({{2, 1}, {0, 3}});
  RatPolynomial c = characteristic_polynomial(a);
  CHECK(c == RatPolynomial({Rational(6), Rational(-5), Rational(1)}));
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) {
    RatMatrix b = random_matrix(n, rng);
    RatPolynomial cb = characteristic_polynomial(b);
    CHECK(cb.degree() == n);
    CHECK(cb(b).is_zero());
    CHECK(cb.coeff(0) == (n % 2 == 0 ? 1 : -1) * determinant(b));
  }
}
