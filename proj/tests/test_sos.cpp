#include <cmath>
#include <random>

#include "doctest.h"
#include "sipsdp/sos.hpp"

using namespace sipsdp;

namespace {

VarSpace x1() { return VarSpace({"x"}, {}); }
VarSpace y1() { return VarSpace({}, {"y"}); }

Polynomial poly_of(const VarSpace& s, std::vector<std::pair<std::vector<int>, double>> terms) {
  Polynomial p(s);
  for (auto& [e, c] : terms) p.add_term(Monomial(e), c);
  return p;
}

}  // namespace

TEST_CASE("sos_decompose perfect square") {
  Polynomial h = poly_of(x1(), {{{2}, 1.0}, {{1}, 2.0}, {{0}, 1.0}});
  SosDecomposition d = sos_decompose(h, 1);
  REQUIRE(d.feasible);
  CHECK(d.certificate.residual <= 1e-6);
  CHECK(d.certificate.min_eigenvalue() >= -1e-8);
  REQUIRE(d.certificate.basis.size() == 2);
  CHECK(d.certificate.gram(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(d.certificate.gram(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(d.certificate.gram(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("sos_decompose odd polynomial infeasible") {
  Polynomial h = poly_of(x1(), {{{1}, 1.0}});
  SosDecomposition d = sos_decompose(h, 1);
  CHECK_FALSE(d.feasible);
  CHECK(d.margin == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("sos_decompose nonnegative but not sos") {
  VarSpace s({"x", "y"}, {});
  Polynomial h = poly_of(s, {{{4, 2}, 1.0}, {{2, 4}, 1.0}, {{2, 2}, -3.0}, {{0, 0}, 1.0}});
  SosDecomposition d = sos_decompose(h, 3);
  CHECK_FALSE(d.feasible);
  CHECK(d.margin < -1e-4);
}

TEST_CASE("qmodule membership on the interval generator") {
  Polynomial g = poly_of(y1(), {{{0}, 1.0}, {{2}, -1.0}});
  Polynomial psi = g;
  QmoduleResult r = qmodule_membership(psi, {g}, 1);
  REQUIRE(r.feasible);
  CHECK(r.certificate.residual <= 1e-6);
  // sigma_0 vanishes, sigma_1 is the constant one
  CHECK(r.certificate.multipliers[0].gram.cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(r.certificate.multipliers[1].gram(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("qmodule membership strictly positive polynomial") {
  Polynomial g = poly_of(y1(), {{{0}, 1.0}, {{2}, -1.0}});
  Polynomial psi = poly_of(y1(), {{{0}, 2.0}, {{1}, 1.0}});
  QmoduleResult r = qmodule_membership(psi, {g}, 1);
  REQUIRE(r.feasible);
  CHECK(r.margin > 1e-3);
  CHECK(r.certificate.residual <= 1e-6);
  // certificate evaluates to psi on a grid of the interval
  for (double y = -1.0; y <= 1.0; y += 0.125) {
    double lhs = 0.0;
    for (size_t j = 0; j < r.certificate.generators.size(); ++j)
      lhs += r.certificate.generators[j].evaluate({y}) *
             r.certificate.multipliers[j].reconstruct(psi.space()).evaluate({y});
    CHECK(lhs == doctest::Approx(psi.evaluate({y})).epsilon(1e-5));
    CHECK(lhs >= -1e-6);
  }
}

TEST_CASE("qmodule membership rejects a negative constant") {
  Polynomial g = poly_of(y1(), {{{0}, 1.0}, {{2}, -1.0}});
  Polynomial psi = Polynomial::constant(y1(), -1.0);
  for (int t : {1, 2}) {
    QmoduleResult r = qmodule_membership(psi, {g}, t);
    CHECK_FALSE(r.feasible);
    CHECK(r.margin < -0.1);
  }
}

TEST_CASE("eps_star analytic values") {
  CHECK(eps_star(Polynomial::constant(x1(), -1.0), 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(eps_star(poly_of(x1(), {{{1}, -1.0}}), 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(eps_star(poly_of(x1(), {{{2}, 1.0}}), 1) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(eps_star(poly_of(x1(), {{{2}, 1.0}, {{1}, 2.0}, {{0}, 1.0}}), 1) ==
        doctest::Approx(0.0).epsilon(1e-7));
  CHECK_THROWS_AS(eps_star(poly_of(x1(), {{{4}, 1.0}}), 1), PreconditionError);
}

TEST_CASE("eps_star nonincreasing in the perturbation order") {
  VarSpace s2({"x", "w"}, {});
  std::vector<Polynomial> battery = {
      poly_of(x1(), {{{0}, 1.0}, {{1}, -1.0}}),                      // 1 - x
      poly_of(x1(), {{{0}, 1.0}, {{2}, -1.0}}),                      // 1 - x^2
      poly_of(x1(), {{{0}, 2.0}, {{1}, -1.0}, {{3}, -1.0}}),         // 2 - x - x^3
      poly_of(x1(), {{{4}, 1.0}, {{2}, -2.0}, {{0}, 1.0}}),          // (x^2-1)^2
      poly_of(s2, {{{0, 0}, 2.0}, {{1, 1}, -1.0}, {{2, 2}, -1.0}}),  // 2 - xw - x^2 w^2
  };
  for (const auto& h : battery) {
    int r0 = std::max((h.degree() + 1) / 2, 1);
    double prev = eps_star(h, r0);
    for (int r = r0 + 1; r <= r0 + 2; ++r) {
      double cur = eps_star(h, r);
      CHECK(cur <= prev + 1e-7);
      prev = cur;
    }
  }
}

TEST_CASE("is_sos_convex") {
  VarSpace s({"x1", "x2"}, {});
  Polynomial f = poly_of(s, {{{2, 0}, 1.0}, {{1, 0}, -2.0}, {{0, 0}, 1.0}, {{0, 2}, 1.0}});
  CHECK(is_sos_convex(f));

  // any quadratic with psd hessian
  Polynomial q = poly_of(s, {{{2, 0}, 2.0}, {{1, 1}, 2.0}, {{0, 2}, 1.0}});
  CHECK(is_sos_convex(q));

  // indefinite quartic is not convex, hence not sos-convex
  Polynomial bad = poly_of(s, {{{4, 0}, 1.0}, {{0, 4}, -1.0}});
  CHECK_FALSE(is_sos_convex(bad));

  // linear and constant polynomials are trivially sos-convex
  CHECK(is_sos_convex(poly_of(s, {{{1, 0}, 3.0}, {{0, 0}, -1.0}})));
}

TEST_CASE("sos-convexity implies pointwise psd hessian") {
  VarSpace s({"x1", "x2"}, {});
  Polynomial h = poly_of(s, {{{4, 0}, 1.0}, {{0, 4}, 1.0}, {{2, 2}, 1.0}, {{0, 2}, 0.5}});
  REQUIRE(is_sos_convex(h));
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pt = {unif(rng), unif(rng)};
    Eigen::Matrix2d H;
    H(0, 0) = h.derivative(0).derivative(0).evaluate(pt);
    H(0, 1) = H(1, 0) = h.derivative(0).derivative(1).evaluate(pt);
    H(1, 1) = h.derivative(1).derivative(1).evaluate(pt);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("interval certificate") {
  Polynomial base = poly_of(y1(), {{{0}, 1.0}, {{2}, -1.0}});
  QmoduleResult ok = interval_certificate(base, 1);
  REQUIRE(ok.feasible);
  CHECK(ok.certificate.multipliers[0].gram.cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(ok.certificate.multipliers[1].gram(0, 0) == doctest::Approx(1.0).epsilon(1e-5));

  QmoduleResult sign_change = interval_certificate(poly_of(y1(), {{{1}, 1.0}}), 1);
  CHECK_FALSE(sign_change.feasible);

  // (1 - y^2) y^2 + margin is nonnegative on the interval
  Polynomial near = poly_of(y1(), {{{2}, 1.0}, {{4}, -1.0}, {{0}, 1e-3}});
  QmoduleResult feas = interval_certificate(near, 2);
  CHECK(feas.feasible);
  CHECK(feas.certificate.residual <= 1e-6);
  // multiplier degree bound: deg sigma_1 <= 2t - 2
  CHECK(feas.certificate.multipliers[1].basis.back().degree() <= 1);
}
