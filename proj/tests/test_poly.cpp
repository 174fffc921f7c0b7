#include <cmath>
#include <random>

#include "doctest.h"
#include "sipsdp/poly.hpp"

using namespace sipsdp;

namespace {

VarSpace xy22() { return VarSpace({"x1", "x2"}, {"y1", "y2"}); }

// p = -x1^2 - 2 y2 x1 x2 - y1 x2^2 - x1 - x2
Polynomial wedge_constraint() {
  VarSpace s = xy22();
  Polynomial p(s);
  p.add_term(Monomial({2, 0, 0, 0}), -1.0);
  p.add_term(Monomial({1, 1, 0, 1}), -2.0);
  p.add_term(Monomial({0, 2, 1, 0}), -1.0);
  p.add_term(Monomial({1, 0, 0, 0}), -1.0);
  p.add_term(Monomial({0, 1, 0, 0}), -1.0);
  return p;
}

}  // namespace

TEST_CASE("evaluate") {
  Polynomial p = wedge_constraint();
  CHECK(p.evaluate({-0.5, 0.0, 1.0, 0.0}) == doctest::Approx(0.25));

  VarSpace s = xy22();
  CHECK(Polynomial::constant(s, 1.0).evaluate({3, 4, 5, 6}) == doctest::Approx(1.0));

  VarSpace s11({"x1"}, {"y1"});
  Polynomial xy(s11);
  xy.add_term(Monomial({1, 1}), 1.0);
  CHECK(xy.evaluate({2.0, 3.0}) == doctest::Approx(6.0));

  CHECK_THROWS_AS(p.evaluate({1.0, 2.0}), DimensionError);
}

TEST_CASE("block degrees") {
  Polynomial p = wedge_constraint();
  CHECK(p.block_degree(VarBlock::X) == 2);
  CHECK(p.block_degree(VarBlock::Y) == 1);

  VarSpace s = xy22();
  Polynomial c5 = Polynomial::constant(s, 5.0);
  CHECK(c5.block_degree(VarBlock::X) == 0);
  CHECK(c5.block_degree(VarBlock::Y) == 0);
  CHECK_FALSE(c5.is_zero());
  CHECK(Polynomial(s).is_zero());
}

TEST_CASE("homogenize_block") {
  VarSpace sy({}, {"y1"});
  Polynomial g(sy);
  g.add_term(Monomial({0}), 1.0);
  g.add_term(Monomial({2}), -1.0);
  Polynomial gh = g.homogenize_block(VarBlock::Y);
  // y0^2 - y1^2
  CHECK(gh.space().ny() == 2);
  CHECK(gh.space().y_names()[0] == "y0");
  CHECK(gh.coeff(Monomial({2, 0})) == doctest::Approx(1.0));
  CHECK(gh.coeff(Monomial({0, 2})) == doctest::Approx(-1.0));
  CHECK(gh.num_terms() == 2);

  // homogeneous input: y0 never appears
  Polynomial h(sy);
  h.add_term(Monomial({2}), 3.0);
  Polynomial hh = h.homogenize_block(VarBlock::Y);
  for (const auto& [m, c] : hh.terms()) CHECK(m[hh.space().var_index(VarBlock::Y, 0)] == 0);

  Polynomial p = wedge_constraint();
  Polynomial ph = p.homogenize_block(VarBlock::Y);
  // -x1^2 y0 - 2 y2 x1 x2 - y1 x2^2 - x1 y0 - x2 y0, variables (x1,x2,y0,y1,y2)
  CHECK(ph.coeff(Monomial({2, 0, 1, 0, 0})) == doctest::Approx(-1.0));
  CHECK(ph.coeff(Monomial({1, 1, 0, 0, 1})) == doctest::Approx(-2.0));
  CHECK(ph.coeff(Monomial({0, 2, 0, 1, 0})) == doctest::Approx(-1.0));
  CHECK(ph.coeff(Monomial({1, 0, 1, 0, 0})) == doctest::Approx(-1.0));
  CHECK(ph.coeff(Monomial({0, 1, 1, 0, 0})) == doctest::Approx(-1.0));
  CHECK(ph.num_terms() == 5);

  VarSpace sx({"x1"}, {});
  CHECK_THROWS_AS(Polynomial::constant(sx, 1.0).homogenize_block(VarBlock::Y), PreconditionError);
}

TEST_CASE("homogenize round trip and homogeneity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> expo(0, 3);
  VarSpace sy({}, {"y1", "y2", "y3"});
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial g(sy);
    for (int t = 0; t < 6; ++t)
      g.add_term(Monomial({expo(rng), expo(rng), expo(rng)}), coef(rng));
    if (g.is_zero()) continue;
    Polynomial gh = g.homogenize_block(VarBlock::Y);
    int d = g.block_degree(VarBlock::Y);
    for (const auto& [m, c] : gh.terms()) CHECK(gh.block_degree_of(m, VarBlock::Y) == d);
    Polynomial back = gh.substitute_value(gh.space().var_index(VarBlock::Y, 0), 1.0)
                          .drop_variable(gh.space().var_index(VarBlock::Y, 0));
    CHECK(back.almost_equal(g, 1e-12));
  }
}

TEST_CASE("highest_degree_form") {
  VarSpace sy({}, {"y1"});
  Polynomial g(sy);
  g.add_term(Monomial({0}), 1.0);
  g.add_term(Monomial({2}), -1.0);
  Polynomial top = g.highest_degree_form(VarBlock::Y);
  CHECK(top.num_terms() == 1);
  CHECK(top.coeff(Monomial({2})) == doctest::Approx(-1.0));

  VarSpace sy2({}, {"y1", "y2"});
  Polynomial h(sy2);
  h.add_term(Monomial({1, 0}), 1.0);
  h.add_term(Monomial({0, 2}), -1.0);
  Polynomial t2 = h.highest_degree_form(VarBlock::Y);
  CHECK(t2.num_terms() == 1);
  CHECK(t2.coeff(Monomial({0, 2})) == doctest::Approx(-1.0));

  Polynomial hom(sy2);
  hom.add_term(Monomial({2, 0}), 1.0);
  hom.add_term(Monomial({0, 2}), 2.0);
  CHECK(hom.highest_degree_form(VarBlock::Y).almost_equal(hom));
}

TEST_CASE("coefficient_norm") {
  VarSpace sy({}, {"y1", "y2"});
  Polynomial a(sy);
  a.add_term(Monomial({2, 1}), 3.0);
  CHECK(a.coefficient_norm() == doctest::Approx(1.0));

  CHECK(Polynomial::constant(sy, -4.5).coefficient_norm() == doctest::Approx(4.5));

  Polynomial b(sy);
  b.add_term(Monomial({1, 0}), 1.0);
  b.add_term(Monomial({0, 1}), 1.0);
  CHECK(b.coefficient_norm() == doctest::Approx(1.0));

  // absolute homogeneity
  CHECK((a * -2.5).coefficient_norm() == doctest::Approx(2.5 * a.coefficient_norm()));
}

TEST_CASE("monomial_basis") {
  auto b21 = monomial_basis(2, 1);
  REQUIRE(b21.size() == 3);
  CHECK(b21[0] == Monomial({0, 0}));
  CHECK(b21[1] == Monomial({1, 0}));
  CHECK(b21[2] == Monomial({0, 1}));

  CHECK(monomial_basis(2, 2).size() == 6);
  CHECK(monomial_basis(3, 2).size() == 10);

  for (auto [n, k] : {std::pair{2, 4}, {3, 3}, {4, 2}}) {
    auto basis = monomial_basis(n, k);
    CHECK(basis.size() == binomial(n + k, k));
    for (size_t i = 1; i < basis.size(); ++i) CHECK(basis[i - 1] < basis[i]);
  }
}

TEST_CASE("perturbation_polynomial") {
  VarSpace s1({"x1"}, {});
  Polynomial t1 = perturbation_polynomial(s1, 1, 1.0);
  CHECK(t1.num_terms() == 1);
  CHECK(t1.coeff(Monomial({2})) == doctest::Approx(1.0));

  VarSpace s2({"x1", "x2"}, {});
  Polynomial t2 = perturbation_polynomial(s2, 2, 2.0);
  CHECK(t2.coeff(Monomial({4, 0})) == doctest::Approx(1.0 / 16));
  CHECK(t2.coeff(Monomial({0, 4})) == doctest::Approx(1.0 / 16));

  CHECK(t2.evaluate({2.0, 0.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(perturbation_polynomial(s2, 1, 0.0), PreconditionError);
}

TEST_CASE("arithmetic utilities") {
  VarSpace s({"x1", "x2"}, {});
  Polynomial x1 = Polynomial::variable(s, 0), x2 = Polynomial::variable(s, 1);
  Polynomial f = (x1 - Polynomial::constant(s, 1.0)).pow(2) + x2 * x2;
  CHECK(f.evaluate({1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(f.evaluate({0.0, 2.0}) == doctest::Approx(5.0));
  CHECK(f.degree() == 2);

  Polynomial dfdx1 = f.derivative(0);
  CHECK(dfdx1.evaluate({3.0, 0.0}) == doctest::Approx(4.0));

  Polynomial scaled = f.scale_variable(0, 2.0);
  CHECK(scaled.evaluate({1.0, 1.0}) == doctest::Approx(f.evaluate({2.0, 1.0})));

  Polynomial sub = f.substitute(1, x1 * 2.0);
  CHECK(sub.evaluate({1.5, 99.0}) == doctest::Approx(f.evaluate({1.5, 3.0})));
}
