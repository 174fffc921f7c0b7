#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "sipsdp/moments.hpp"

using namespace sipsdp;

namespace {

Atom make_atom(std::vector<double> pt, double w) {
  Atom a;
  a.point = Eigen::Map<Eigen::VectorXd>(pt.data(), static_cast<Eigen::Index>(pt.size()));
  a.weight = w;
  return a;
}

// match recovered atoms against the originals up to permutation
void check_atoms_match(std::vector<Atom> got, std::vector<Atom> want, double tol) {
  REQUIRE(got.size() == want.size());
  for (const auto& w : want) {
    double best = 1e100;
    size_t best_i = 0;
    for (size_t i = 0; i < got.size(); ++i) {
      double d = (got[i].point - w.point).norm() + std::abs(got[i].weight - w.weight);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    CHECK(best <= tol);
    got.erase(got.begin() + static_cast<long>(best_i));
  }
}

}  // namespace

TEST_CASE("from_atoms") {
  Atom a = make_atom({2.0, -1.0}, 1.0);
  MomentVector mv = from_atoms({a}, 2, 1);
  CHECK(mv.at(Monomial({0, 0})) == doctest::Approx(1.0));
  CHECK(mv.at(Monomial({1, 0})) == doctest::Approx(2.0));
  CHECK(mv.at(Monomial({1, 1})) == doctest::Approx(-2.0));
  CHECK(mv.at(Monomial({0, 2})) == doctest::Approx(1.0));

  MomentVector two = from_atoms({make_atom({0.0}, 1.0), make_atom({1.0}, 1.0)}, 1, 1);
  REQUIRE(two.length() == 3);
  CHECK(two.values[0] == doctest::Approx(2.0));
  CHECK(two.values[1] == doctest::Approx(1.0));
  CHECK(two.values[2] == doctest::Approx(1.0));

  MomentVector empty = from_atoms({}, 3, 2);
  CHECK(empty.values.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  CHECK_THROWS_AS(from_atoms({make_atom({1.0}, 1.0)}, 2, 1), DimensionError);
}

TEST_CASE("moment_matrix") {
  MomentVector mv = from_atoms({make_atom({1.0, 2.0}, 1.0)}, 2, 1);
  Eigen::MatrixXd M = moment_matrix(mv, 1);
  Eigen::MatrixXd expect(3, 3);
  expect << 1, 1, 2, 1, 1, 2, 2, 2, 4;
  CHECK((M - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(numerical_rank(M) == 1);

  MomentVector zero(2, 1);
  CHECK(moment_matrix(zero, 1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  MomentVector two = from_atoms({make_atom({0.3, -0.4}, 0.5), make_atom({-1.0, 0.2}, 0.7)}, 2, 2);
  CHECK(numerical_rank(moment_matrix(two, 1)) == 2);
  CHECK(numerical_rank(moment_matrix(two, 2)) == 2);

  CHECK_THROWS_AS(moment_matrix(two, 3), PreconditionError);
}

TEST_CASE("moment matrix is Hankel-structured") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unif(-1, 1);
  std::vector<Atom> atoms;
  for (int i = 0; i < 3; ++i) atoms.push_back(make_atom({unif(rng), unif(rng)}, 0.3 + i * 0.2));
  MomentVector mv = from_atoms(atoms, 2, 2);
  Eigen::MatrixXd M = moment_matrix(mv, 2);
  auto basis = monomial_basis(2, 2);
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j)
      for (size_t k = 0; k < basis.size(); ++k)
        for (size_t l = 0; l < basis.size(); ++l)
          if (basis[i] * basis[j] == basis[k] * basis[l])
            CHECK(M(static_cast<long>(i), static_cast<long>(j)) ==
                  doctest::Approx(M(static_cast<long>(k), static_cast<long>(l))));
}

TEST_CASE("localizing_matrix") {
  VarSpace sy({}, {"y1"});
  Polynomial g(sy);
  g.add_term(Monomial({0}), 1.0);
  g.add_term(Monomial({2}), -1.0);

  MomentVector at_half = from_atoms({make_atom({0.5}, 1.0)}, 1, 1);
  Eigen::MatrixXd L = localizing_matrix(at_half, g, 1);
  REQUIRE(L.rows() == 1);
  CHECK(L(0, 0) == doctest::Approx(0.75));

  Polynomial one = Polynomial::constant(sy, 1.0);
  MomentVector mv = from_atoms({make_atom({0.3}, 0.4), make_atom({-0.8}, 0.6)}, 1, 2);
  CHECK((localizing_matrix(mv, one, 2) - moment_matrix(mv, 2)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));

  MomentVector outside = from_atoms({make_atom({2.0}, 1.0)}, 1, 1);
  Eigen::MatrixXd Lo = localizing_matrix(outside, g, 1);
  CHECK(Lo(0, 0) == doctest::Approx(-3.0));
}

TEST_CASE("psd of atomic moment and localizing matrices") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  VarSpace sy({}, {"y1", "y2"});
  Polynomial g(sy);  // 1 - y1^2 - y2^2, nonnegative at every sampled atom
  g.add_term(Monomial({0, 0}), 1.0);
  g.add_term(Monomial({2, 0}), -1.0);
  g.add_term(Monomial({0, 2}), -1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Atom> atoms;
    for (int i = 0; i < 3; ++i) {
      double a = 0.7 * unif(rng), b = 0.7 * unif(rng);
      atoms.push_back(make_atom({a, b}, 0.1 + std::abs(unif(rng))));
    }
    MomentVector mv = from_atoms(atoms, 2, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(moment_matrix(mv, 2));
    CHECK(em.eigenvalues().minCoeff() >= -1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(localizing_matrix(mv, g, 2));
    CHECK(el.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("flat_extension_check") {
  MomentVector dirac = from_atoms({make_atom({0.4}, 1.0)}, 1, 2);
  auto fc = flat_extension_check(dirac, 2, 1);
  CHECK(fc.flat);
  CHECK(fc.rank_low == 1);
  CHECK(fc.rank_high == 1);

  MomentVector three =
      from_atoms({make_atom({-0.7, 0.1}, 0.3), make_atom({0.2, 0.5}, 0.3), make_atom({0.8, -0.6}, 0.4)},
                 2, 3);
  auto fc3 = flat_extension_check(three, 3, 1);
  CHECK(fc3.flat);
  CHECK(fc3.rank_low == 3);
  CHECK(fc3.rank_high == 3);

  // bump the top-degree moment of a dirac vector: rank grows only at the top
  MomentVector bumped = from_atoms({make_atom({0.5}, 1.0)}, 1, 2);
  bumped.values[bumped.length() - 1] += 0.5;  // y^4 entry
  auto fcb = flat_extension_check(bumped, 2, 1);
  CHECK_FALSE(fcb.flat);
  CHECK(fcb.rank_low == 1);
  CHECK(fcb.rank_high == 2);

  CHECK_THROWS_AS(flat_extension_check(dirac, 3, 1), PreconditionError);
}

TEST_CASE("extract_atoms dirac") {
  MomentVector mv = from_atoms({make_atom({0.3, -0.8}, 1.0)}, 2, 2);
  auto atoms = extract_atoms(mv, 2);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].weight == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(atoms[0].point[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(atoms[0].point[1] == doctest::Approx(-0.8).epsilon(1e-6));
}

TEST_CASE("extract_atoms two symmetric atoms") {
  std::vector<Atom> in = {make_atom({-1.0}, 0.5), make_atom({1.0}, 0.5)};
  MomentVector mv = from_atoms(in, 1, 2);
  auto atoms = extract_atoms(mv, 2);
  check_atoms_match(atoms, in, 1e-6);
}

TEST_CASE("extract_atoms random round trip") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    int count = 1 + static_cast<int>(trial % 5);
    std::vector<Atom> in;
    for (int i = 0; i < count; ++i) {
      // rejection keeps atoms pairwise separated so the round trip is well posed
      for (;;) {
        Atom cand = make_atom({unif(rng), unif(rng)}, 0.2 + 0.8 * std::abs(unif(rng)));
        bool ok = true;
        for (const auto& a : in)
          if ((a.point - cand.point).norm() < 0.35) ok = false;
        if (ok) {
          in.push_back(cand);
          break;
        }
      }
    }
    MomentVector mv = from_atoms(in, 2, 3);
    auto atoms = extract_atoms(mv, 3);
    check_atoms_match(atoms, in, 1e-6);
  }
}

TEST_CASE("extract_atoms three atoms in the plane") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Atom> in = {make_atom({unif(rng), unif(rng)}, 0.4),
                          make_atom({unif(rng), unif(rng)}, 0.9),
                          make_atom({unif(rng), unif(rng)}, 0.2)};
  MomentVector mv = from_atoms(in, 2, 3);
  check_atoms_match(extract_atoms(mv, 3), in, 1e-6);
}

TEST_CASE("apply_to_bipoly") {
  VarSpace s({"x1", "x2"}, {"y1", "y2"});
  Polynomial p(s);
  p.add_term(Monomial({2, 0, 0, 0}), -1.0);
  p.add_term(Monomial({1, 1, 0, 1}), -2.0);
  p.add_term(Monomial({0, 2, 1, 0}), -1.0);
  p.add_term(Monomial({1, 0, 0, 0}), -1.0);
  p.add_term(Monomial({0, 1, 0, 0}), -1.0);

  // dirac over x: evaluation at that x
  MomentVector lx = from_atoms({make_atom({-0.5, 0.0}, 1.0)}, 2, 1);
  Polynomial py = apply_to_bipoly(lx, p, VarBlock::X);
  CHECK(py.space().ny() == 2);
  CHECK(py.coeff(Monomial({0, 0})) == doctest::Approx(0.25));
  CHECK(py.block_degree(VarBlock::Y) == 0);

  // dirac over y: evaluation at that y
  MomentVector hy = from_atoms({make_atom({1.0, 0.5}, 1.0)}, 2, 1);
  Polynomial px = apply_to_bipoly(hy, p, VarBlock::Y);
  std::vector<double> pt = {0.7, -0.3};
  CHECK(px.evaluate(pt) == doctest::Approx(p.evaluate({0.7, -0.3, 1.0, 0.5})));

  // linearity in the functional
  MomentVector ha = from_atoms({make_atom({0.2, 0.1}, 1.0)}, 2, 1);
  MomentVector hb = from_atoms({make_atom({-0.9, 0.4}, 1.0)}, 2, 1);
  MomentVector mix = ha;
  mix.values = 0.25 * ha.values + 1.5 * hb.values;
  Polynomial lhs = apply_to_bipoly(mix, p, VarBlock::Y);
  Polynomial rhs = apply_to_bipoly(ha, p, VarBlock::Y) * 0.25 +
                   apply_to_bipoly(hb, p, VarBlock::Y) * 1.5;
  CHECK(lhs.almost_equal(rhs, 1e-12));

  MomentVector small(2, 0);
  CHECK_THROWS_AS(apply_to_bipoly(small, p, VarBlock::X), PreconditionError);
}
