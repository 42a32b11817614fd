#include <doctest.h>

#include <cmath>

#include "../oracles/closed_form.hpp"
#include "matsg/error.hpp"
#include "matsg/semigroup.hpp"

using namespace matsg;

namespace {

BasisPtr b12() { return ModuleBasis::from_expressions({"1", "sqrt(2)"}); }
BasisPtr q1() { return ModuleBasis::from_expressions({"1"}); }

ModuleElement at(const BasisPtr& b, std::vector<Rational> c) { return ModuleElement(b, std::move(c)); }

Mat scalar(double a, int k) { return a * Mat::Identity(k, k); }

// Index of x in the sample set, or a test failure.
size_t index_of(const SampleSet& s, const ModuleElement& x) {
  auto i = s.find(x);
  REQUIRE(i.has_value());
  return *i;
}

}  // namespace

TEST_CASE("build_elementary examples") {
  auto b = b12();
  auto id = build_elementary(b, Matrix(Mat(Mat::Zero(3, 3))));
  CHECK((id.evaluate(at(b, {Rational(5), Rational(-1, 2)})).real() - Mat::Identity(3, 3)).norm() == 0.0);

  const double a = 0.3;
  auto nu = CauchySolution::real(b, {real_pi() / 2, Real(0)});
  auto g = build_elementary(b, Matrix(scalar(a, 2)), nu);
  Mat g1 = g.evaluate(ModuleElement::generator(b, 0)).real();
  CHECK((g1 - std::exp(a) * Mat(oracle::rot(M_PI / 2))).norm() < 1e-14);
  // Non-linear angle: nu(sqrt 2) = 0 while the value is sqrt 2.
  CHECK((g.evaluate(ModuleElement::generator(b, 1)).real() - std::exp(a * std::sqrt(2.0)) * Mat::Identity(2, 2)).norm() <
        1e-13);

  Mat l(2, 2);
  l << 0, 1, -1, 0;
  CHECK_NOTHROW(build_elementary(b, Matrix(l), nu));
  Mat bad(2, 2);
  bad << 1, 0, 0, 2;
  CHECK_THROWS_AS(build_elementary(b, Matrix(bad), nu), DomainError);
  CHECK_THROWS_AS(build_elementary(b, Matrix(Mat(Mat::Zero(3, 3))), nu), DomainError);
  Mat sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(build_elementary(b, Matrix(Mat(Mat::Zero(2, 2))), std::nullopt, Matrix(sing)), DomainError);
}

TEST_CASE("a linear angle folds into the generator") {
  auto b = b12();
  auto nu = CauchySolution::linear(b, Real("0.8"));
  auto g = build_elementary(b, Matrix(Mat(Mat::Zero(2, 2))), nu);
  REQUIRE(g.blocks().size() == 1);
  CHECK(std::holds_alternative<PlainBlock>(g.blocks()[0]));
  auto x = at(b, {Rational(1), Rational(1)});
  double v = 1 + std::sqrt(2.0);
  CHECK((g.evaluate(x).real() - Mat(oracle::rot(0.8 * v))).norm() < 1e-13);
}

TEST_CASE("direct sums, zero blocks and conjugation") {
  auto b = b12();
  auto i2 = build_elementary(b, Matrix(Mat(Mat::Zero(2, 2))));
  auto i3 = build_elementary(b, Matrix(Mat(Mat::Zero(3, 3))));
  auto s = direct_sum({i2, i3});
  CHECK(s.dimension() == 5);
  CHECK((s.evaluate(ModuleElement::generator(b, 1)).real() - Mat::Identity(5, 5)).norm() == 0.0);

  auto q = q1();
  auto e = build_elementary(q, Matrix(RatMatrix::from_integers({{1}})));
  auto z = with_zero_block(build_elementary(q, Matrix(Mat(Mat::Identity(1, 1)))), 1);
  Mat g1 = z.evaluate(ModuleElement::generator(q, 0)).real();
  CHECK(g1(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(g1(1, 1) == 0.0);
  CHECK((z.evaluate(ModuleElement::zero(q)).real() - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK_THROWS_AS(direct_sum({e, i2}), Error);
  CHECK_THROWS_AS(direct_sum({}), DomainError);

  Mat a(3, 3);
  a << 2, 1, 0, 0, 1, 3, 1, 0, 1;
  Mat m(3, 3);
  m << 0.1, 0.5, 0, -0.5, 0.1, 0, 0, 0, -0.4;
  auto base = build_elementary(b, Matrix(m));
  auto round = conjugate(conjugate(base, Matrix(a)), Matrix(Mat(a.inverse())));
  for (const auto& x : default_points(b))
    CHECK((round.evaluate(x).real() - base.evaluate(x).real()).norm() < 1e-12);
}

TEST_CASE("sample includes the origin and rejects negative points") {
  auto q = q1();
  auto id = build_elementary(q, Matrix(RatMatrix(2, 2)));
  auto s = sample(id, {ModuleElement::generator(q, 0)});
  CHECK(s.size() == 2);
  CHECK(s.samples[s.origin()].exact().is_identity());
  CHECK(s.samples[index_of(s, ModuleElement::generator(q, 0))].exact().is_identity());

  auto n = build_elementary(q, Matrix(RatMatrix::from_integers({{0, 1}, {0, 0}})));
  auto t = sample(n, {at(q, {Rational(1)}), at(q, {Rational(2)})});
  auto g1 = t.samples[index_of(t, at(q, {Rational(1)}))].exact();
  CHECK(t.samples[index_of(t, at(q, {Rational(2)}))].exact() == g1 * g1);

  CHECK_THROWS_AS(sample(id, {at(q, {Rational(-1)})}), DomainError);

  auto again = sample(n, {at(q, {Rational(1)}), at(q, {Rational(2)})});
  for (size_t i = 0; i < t.size(); ++i) CHECK(t.samples[i] == again.samples[i]);
}

TEST_CASE("default points cover multiples and pairwise sums") {
  auto b = b12();
  auto pts = default_points(b);
  // 0, 8 multiples per generator, 3 pairwise sums.
  CHECK(pts.size() == 1 + 16 + 3);
  CHECK(std::find(pts.begin(), pts.end(), at(b, {Rational(3, 8), Rational(0)})) != pts.end());
  CHECK(std::find(pts.begin(), pts.end(), at(b, {Rational(1), Rational(1)})) != pts.end());
}

TEST_CASE("constructed models pass the semigroup check") {
  auto b = b12();
  Mat m(4, 4);
  m << 0.2, 1, 0, 0, -1, 0.2, 0, 0, 0, 0, -0.1, 1, 0, 0, 0, -0.1;
  Mat a(4, 4);
  a << 1, 2, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 3, 1;
  auto rot = build_elementary(b, Matrix(scalar(-0.05, 2)), CauchySolution::real(b, {Real("0.3"), Real("1.1")}));
  auto g = with_zero_block(direct_sum({build_elementary(b, Matrix(m), std::nullopt, Matrix(a)), rot}), 1);
  auto rep = verify_semigroup(sample(g), 1e-9);
  CHECK(rep.pass);
  CHECK(rep.violations.empty());
  CHECK(rep.pairs_checked > 0);
  CHECK(rep.max_law <= 1e-9);

  // Exact: unipotent generator and rational-angle rotation.
  auto q = q1();
  AngleUnit unit{Rational(3, 5), Rational(4, 5)};
  auto nu = CauchySolution::exact(q, {Rational(8)}, unit.angle(), "atan2(4/5,3/5)");
  auto ex = direct_sum({build_elementary(q, Matrix(RatMatrix::from_integers({{0, 1}, {0, 0}}))),
                        build_elementary(q, Matrix(RatMatrix(2, 2)), nu, std::nullopt, unit)});
  auto erep = verify_semigroup(sample(ex), 0.0);
  CHECK(erep.pass);
  CHECK(erep.max_law == 0.0);
}

TEST_CASE("faults are detected") {
  auto b = b12();
  Mat m(2, 2);
  m << 0.1, 0.4, -0.4, 0.1;
  auto s = sample(build_elementary(b, Matrix(m)));
  size_t target = index_of(s, at(b, {Rational(1), Rational(0)}));
  s.samples[target].real()(0, 1) += 1e-3;
  auto rep = verify_semigroup(s, 1e-9);
  CHECK_FALSE(rep.pass);
  bool listed = false;
  for (const auto& v : rep.violations)
    for (size_t p : v.points) listed = listed || p == target;
  CHECK(listed);

  // id + xN with N^2 != 0 is not a semigroup: g(1)^2 != g(2).
  auto q = q1();
  RatMatrix n = RatMatrix::from_integers({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  SampleSet f;
  f.basis = q;
  f.mode = ScalarMode::exact;
  for (int k = 0; k <= 2; ++k) {
    f.points.push_back(at(q, {Rational(k)}));
    f.samples.push_back(Matrix(RatMatrix::identity(3) + n * Rational(k)));
  }
  CHECK_FALSE(verify_semigroup(f, 0.0).pass);
  CHECK_FALSE(verify_semigroup(f, 1e-9).pass);

  // Identity at the origin is required.
  SampleSet o = f;
  o.samples[0] = Matrix(RatMatrix::identity(3) * Rational(2));
  auto orep = verify_semigroup(o, 1e-9);
  CHECK_FALSE(orep.pass);
  CHECK(orep.max_identity > 0);
}

TEST_CASE("rotating blocks commute with the generator part") {
  auto b = b12();
  Mat a(2, 2);
  a << 2, 1, 1, 1;
  auto g = build_elementary(b, Matrix(scalar(0.2, 2)), CauchySolution::real(b, {Real("0.7"), Real("-0.4")}),
                            Matrix(a));
  auto pts = default_points(b);
  for (const auto& x : pts)
    for (const auto& y : pts) {
      Mat gx = g.evaluate(x).real(), gy = g.evaluate(y).real();
      CHECK((gx * gy - gy * gx).norm() < 1e-12 * std::max(1.0, gx.norm() * gy.norm()));
    }
}

TEST_CASE("eigenvalues follow the multiplicative law") {
  auto b = b12();
  auto g = build_elementary(b, Matrix(scalar(0.35, 2)), CauchySolution::real(b, {Real("0.9"), Real("2.3")}));
  auto x = at(b, {Rational(1, 2), Rational(1)}), y = at(b, {Rational(3, 4), Rational(-1, 4)});
  auto lam = [&](const ModuleElement& p) {
    Eigen::ComplexEigenSolver<Mat> es(g.evaluate(p).real());
    Complex v = es.eigenvalues()(0);
    return v.imag() >= 0 ? v : std::conj(v);
  };
  // Both eigenvalues of a rotation block are conjugate; compare the same branch
  // through the angle of the defining solution.
  Complex lx = lam(x), ly = lam(y), lxy = lam(x + y);
  double ang = to_double(CauchySolution::real(b, {Real("0.9"), Real("2.3")}).evaluate(x + y));
  Complex ref = std::exp(0.35 * to_double((x + y).value())) * Complex(std::cos(ang), std::sin(ang));
  CHECK(std::abs(std::abs(lx * ly) - std::abs(lxy)) <= 1e-9 * std::abs(lxy));
  CHECK(std::min(std::abs(lxy - ref), std::abs(lxy - std::conj(ref))) <= 1e-9 * std::abs(ref));
}

TEST_CASE("verify_bound examples") {
  auto b = b12();
  auto rot = build_elementary(b, Matrix(Mat(Mat::Zero(2, 2))), CauchySolution::real(b, {Real(1), Real(3)}));
  auto r = verify_bound(sample(rot), BoundFunction::unit());
  CHECK(r.pass);
  for (const auto& p : r.points) CHECK(p.norm == doctest::Approx(1.0));

  auto e2 = build_elementary(b, Matrix(scalar(2.0, 1)));
  auto f = verify_bound(sample(e2), BoundFunction::from_expression("exp(x)"));
  CHECK_FALSE(f.pass);
  for (const auto& p : f.points)
    if (p.value > 0) CHECK(p.margin < 0);

  auto z = zero_model(b, ScalarMode::real, 2);
  CHECK(verify_bound(sample(z), BoundFunction::unit()).pass);

  CHECK_FALSE(verify_bound(sample(rot), BoundFunction::from_expression("2")).pass);
}
