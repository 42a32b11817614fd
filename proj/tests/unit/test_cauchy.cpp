#include <doctest.h>

#include <random>

#include "matsg/cauchy.hpp"
#include "matsg/error.hpp"

using namespace matsg;
namespace mp = boost::multiprecision;

namespace {

BasisPtr b12() { return ModuleBasis::from_expressions({"1", "sqrt(2)"}); }
BasisPtr b123() { return ModuleBasis::from_expressions({"1", "sqrt(2)", "sqrt(3)"}); }

ModuleElement elem(const BasisPtr& b, std::vector<Rational> c) { return ModuleElement(b, std::move(c)); }

Real pi() { return real_pi(); }

}  // namespace

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(ModuleBasis::from_expressions({}), DomainError);
  CHECK_THROWS_AS(ModuleBasis::from_expressions({"1", "1"}), DomainError);
  CHECK_THROWS_AS(ModuleBasis::from_expressions({"-1"}), DomainError);
  CHECK_THROWS_AS(ModuleBasis::make({BasisEntry{"r", Real(2), 20, std::nullopt}}), DomainError);
  auto b = b12();
  CHECK(b->size() == 2);
  CHECK_FALSE(b->rational());
  CHECK(ModuleBasis::from_expressions({"1", "3/2"})->rational());
}

TEST_CASE("evaluate: linear extension of basis values") {
  auto one = ModuleBasis::from_expressions({"1"});
  auto f1 = CauchySolution::real(one, {Real(1)});
  CHECK(f1.evaluate(elem(one, {Rational(3, 2)})) == Real(3) / 2);

  auto b = b12();
  auto f = CauchySolution::real(b, {Real(1), Real(0)});
  CHECK(f.evaluate(elem(b, {Rational(2), Rational(3)})) == 2);
  CHECK(f.evaluate(elem(b, {Rational(0), Rational(1, 3)})) == 0);

  auto other = b123();
  CHECK_THROWS_AS(f.evaluate(ModuleElement::zero(other)), DomainError);
}

TEST_CASE("exact mode evaluates exactly") {
  auto b = b12();
  auto f = CauchySolution::exact(b, {Rational(8), Rational(-3, 2)});
  auto x = elem(b, {Rational(1, 4), Rational(2)});
  CHECK(f.evaluate_exact(x) == Rational(-1));
}

TEST_CASE("additivity holds in coordinates and in value") {
  auto b = b123();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  std::uniform_real_distribution<double> val(-3, 3);
  auto f = CauchySolution::real(b, {Real(val(rng)), Real(val(rng)), Real(val(rng))});
  for (int t = 0; t < 50; ++t) {
    auto a = elem(b, {Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng))});
    auto c = elem(b, {Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng))});
    CHECK(mp::abs(f.evaluate(a + c) - f.evaluate(a) - f.evaluate(c)) < Real("1e-12"));
    CHECK(mp::abs((a + c).value() - a.value() - c.value()) < Real("1e-40"));
  }
}

TEST_CASE("is_linear") {
  auto b = b12();
  CHECK(is_linear(CauchySolution::real(b, {Real(2), 2 * b->value(1)})));
  CHECK_FALSE(is_linear(CauchySolution::real(b, {Real(1), Real(0)})));
  CHECK(is_linear(CauchySolution::real(ModuleBasis::from_expressions({"1"}), {Real(5)})));
  CHECK(is_linear(CauchySolution::linear(b, Real(-7))));
  // Exact mode on a rational basis compares exactly.
  auto q = ModuleBasis::from_expressions({"1", "3/2"});
  CHECK(is_linear(CauchySolution::exact(q, {Rational(2), Rational(3)})));
  CHECK_FALSE(is_linear(CauchySolution::exact(q, {Rational(2), Rational(3) + Rational(1, 1000000)})));
}

TEST_CASE("equivalent") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real(1), Real(0)});
  auto g = CauchySolution::real(b, {Real(3), 2 * b->value(1)});
  CHECK(equivalent(f, f));
  CHECK(equivalent(f, g));
  CHECK_FALSE(equivalent(f, CauchySolution::zero(b)));
  CHECK_THROWS_AS(equivalent(f, CauchySolution::zero(b123())), DomainError);
}

TEST_CASE("equivalence is an equivalence relation and respects negation") {
  auto q = ModuleBasis::from_expressions({"1", "3/2", "5/3"});
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-4, 4);
  auto random_sol = [&] {
    return CauchySolution::exact(q, {Rational(num(rng)), Rational(num(rng)), Rational(num(rng))});
  };
  for (int t = 0; t < 200; ++t) {
    auto f = random_sol(), g = random_sol(), h = random_sol();
    CHECK(equivalent(f, f, 0.0));
    CHECK(equivalent(f, g, 0.0) == equivalent(g, f, 0.0));
    if (equivalent(f, g, 0.0) && equivalent(g, h, 0.0)) CHECK(equivalent(f, h, 0.0));
    CHECK(equivalent(f, g, 0.0) == equivalent(-f, -g, 0.0));
  }
  // Force some transitive chains: add linear pieces.
  auto f = random_sol();
  auto g = f + CauchySolution::exact(q, {Rational(2), Rational(3), Rational(10, 3)});
  auto h = g + CauchySolution::exact(q, {Rational(-1), Rational(-3, 2), Rational(-5, 3)});
  CHECK(equivalent(f, g, 0.0));
  CHECK(equivalent(g, h, 0.0));
  CHECK(equivalent(f, h, 0.0));
}

TEST_CASE("lift") {
  auto b = b12();
  auto z = lift({Real(0), Real(0)}, pi(), b);
  CHECK(z.value_at(0) == 0);
  CHECK(z.value_at(1) == 0);

  auto f = lift({pi() / 2, -pi() / 3}, pi(), b);
  CHECK(mp::abs(f.value_at(0) - pi() / 2) < Real("1e-45"));
  CHECK(mp::abs(f.value_at(1) + pi() / 3) < Real("1e-45"));
  auto x = elem(b, {Rational(2), Rational(-3)});
  CHECK(mp::abs(f.evaluate(x) - (pi() + pi())) < Real("1e-45"));

  // Values outside [-a, a) are reduced, not rejected.
  auto r = lift({Real(4), Real(-4)}, pi(), b);
  CHECK(mp::abs(r.value_at(0) - (4 - 2 * pi())) < Real("1e-45"));
  CHECK(mp::abs(r.value_at(1) - (2 * pi() - 4)) < Real("1e-45"));

  CHECK_THROWS_AS(lift({Real(0)}, pi(), b), DomainError);
  CHECK_THROWS_AS(lift({Real(0), Real(0)}, Real(0), b), DomainError);
}

TEST_CASE("reduce undoes lift on basis values") {
  auto b = b123();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.1, 3.1);
  for (int t = 0; t < 20; ++t) {
    std::vector<Real> v = {Real(u(rng)), Real(u(rng)), Real(u(rng))};
    CHECK(reduce(lift(v, pi(), b), pi()) == v);
  }
}

TEST_CASE("lift transfers linearity both ways") {
  auto b = b12();
  Real c("0.9");
  auto lin = lift({c * b->value(0), c * b->value(1)}, pi(), b);
  CHECK(is_linear(lin));
  auto nonlin = lift({Real(1), Real(0)}, pi(), b);
  CHECK_FALSE(is_linear(nonlin));
  // Lifts are not unique: shifting one basis value by 2a breaks linearity.
  auto shifted = CauchySolution::real(b, {c * b->value(0) + 2 * pi(), c * b->value(1)});
  CHECK(reduce(shifted, pi()) == reduce(lin, pi()));
  CHECK_FALSE(is_linear(shifted));
}

TEST_CASE("linear_modulo finds the windings of a wrapped linear solution") {
  auto b = b123();
  Real slope("2.5");
  std::vector<Real> v;
  for (size_t i = 0; i < 3; ++i) v.push_back(reduce_symmetric(slope * b->value(i), pi()));
  auto fit = linear_modulo(CauchySolution::real(b, v), 2 * pi(), 1e-12);
  REQUIRE(fit);
  CHECK(mp::abs(fit->slope - slope) < Real("1e-30"));
  CHECK_FALSE(linear_modulo(CauchySolution::real(b, {Real(1), Real(0), Real(0)}), 2 * pi(), 1e-9, 8));
}

TEST_CASE("pi_sequence meets its bounds") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real(0), pi()});
  auto g = CauchySolution::zero(b);
  auto seq = pi_sequence(f, g, 20);
  REQUIRE(seq.terms.size() == 20);
  CHECK_FALSE(seq.swapped);
  for (int k = 1; k <= 20; ++k) {
    const auto& x = seq.terms[k - 1];
    CHECK(x.value() >= 0);
    CHECK(mp::abs(x.value()) <= Real(1) / k);
    CHECK(mp::abs(f.evaluate(x) - pi()) <= Real(1) / k);
    CHECK(mp::abs(g.evaluate(x)) < pi());
  }
  CHECK(mp::abs(seq.theta) < pi() - Real("1e-3"));
  // The limit coefficients solve q x - r y = 0 and q f(x) - r f(y) = pi.
  Real x = b->value(seq.pair_x), y = b->value(seq.pair_y);
  Real fx = f.value_at(seq.pair_x), fy = f.value_at(seq.pair_y);
  CHECK(mp::abs(seq.q_limit * x - seq.r_limit * y) < Real("1e-40"));
  CHECK(mp::abs(seq.q_limit * fx - seq.r_limit * fy - pi()) < Real("1e-40"));
}

TEST_CASE("pi_sequence swaps roles when g dominates") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real(0), Real("0.1")});
  auto g = CauchySolution::real(b, {Real(0), Real(3)});
  auto seq = pi_sequence(f, g, 10);
  CHECK(seq.swapped);
  for (int k = 1; k <= 10; ++k) CHECK(mp::abs(g.evaluate(seq.terms[k - 1]) - pi()) <= Real(1) / k);
}

TEST_CASE("pi_sequence preconditions") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real(1), Real(0)});
  auto g = f + CauchySolution::linear(b, Real(2));
  CHECK_THROWS_AS(pi_sequence(f, g, 5), PreconditionError);
  auto one = ModuleBasis::from_expressions({"1"});
  CHECK_THROWS_AS(pi_sequence(CauchySolution::zero(one), CauchySolution::linear(one, Real(1)), 5),
                  PreconditionError);
}

TEST_CASE("dense_graph_witness") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real(0), Real(1)});
  auto w = dense_graph_witness(f, {Real("0.5"), Real(10)}, Real("0.01"), 1000000);
  REQUIRE(w);
  CHECK(mp::abs(w->value() - Real("0.5")) < Real("0.01"));
  CHECK(mp::abs(f.evaluate(*w) - 10) < Real("0.01"));

  // A target hit by a basis multiple is found with small denominators.
  auto direct = dense_graph_witness(f, {b->value(1), Real(1)}, Real("0.5"), 2);
  REQUIRE(direct);

  // Denominator budget exhausted.
  CHECK_FALSE(dense_graph_witness(f, {Real("0.5"), Real(10)}, Real("1e-12"), 3));
  CHECK_THROWS_AS(dense_graph_witness(CauchySolution::linear(b, Real(1)), {Real(0), Real(0)}, Real("0.1"), 10),
                  PreconditionError);
}

TEST_CASE("rebasing preserves evaluation") {
  auto b = b12();
  auto f = CauchySolution::real(b, {Real("0.3"), Real("-1.7")});
  // New generators: 1 + sqrt(2) and sqrt(2).
  auto nb = ModuleBasis::make({BasisEntry{"g1", b->value(0) + b->value(1), kRealDigits, std::nullopt},
                               BasisEntry{"g2", b->value(1), kRealDigits, std::nullopt}});
  auto g = f.rebased(nb, {{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
  CHECK(mp::abs(g.evaluate(elem(nb, {Rational(1), Rational(-1)})) - f.value_at(0)) < Real("1e-45"));
}
