#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "sipsdp/sdp.hpp"

using namespace sipsdp;

namespace {

// min x s.t. [[x, 1], [1, x]] psd, modeled with one free scalar
SdpProblem min_offdiag_problem() {
  SdpProblem prob;
  int blk = prob.add_psd_block("B", 2);
  int x = prob.add_free_var("x");
  int e0 = prob.add_equality(0.0);
  prob.add_entry_coeff(e0, blk, 0, 0, 1.0);
  prob.add_free_coeff(e0, x, -1.0);
  int e1 = prob.add_equality(0.0);
  prob.add_entry_coeff(e1, blk, 1, 1, 1.0);
  prob.add_free_coeff(e1, x, -1.0);
  int e2 = prob.add_equality(1.0);
  prob.add_entry_coeff(e2, blk, 0, 1, 1.0);
  prob.add_objective_free(x, 1.0);
  prob.set_sense(SdpProblem::Sense::minimize);
  return prob;
}

}  // namespace

TEST_CASE("min eigenvalue-style lmi") {
  SolveReport rep = solve(min_offdiag_problem());
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.primal_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.free_values[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.dual_value <= rep.primal_value + 1e-8 * (1 + std::abs(rep.primal_value)));
}

TEST_CASE("trace-one feasibility") {
  SdpProblem prob;
  int blk = prob.add_psd_block("X", 2);
  int eq = prob.add_equality(1.0);
  prob.add_entry_coeff(eq, blk, 0, 0, 1.0);
  prob.add_entry_coeff(eq, blk, 1, 1, 1.0);
  SolveReport rep = solve(prob);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.block_values[0].trace() == doctest::Approx(1.0).epsilon(1e-7));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.block_values[0]);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("max with slack block") {
  // max x s.t. -1 - x >= 0 encoded as a 1x1 psd block
  SdpProblem prob;
  int blk = prob.add_psd_block("slack", 1);
  int x = prob.add_free_var("x");
  int eq = prob.add_equality(-1.0);
  prob.add_entry_coeff(eq, blk, 0, 0, 1.0);
  prob.add_free_coeff(eq, x, 1.0);
  prob.add_objective_free(x, 1.0);
  prob.set_sense(SdpProblem::Sense::maximize);
  SolveReport rep = solve(prob);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.primal_value == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("weak duality and determinism") {
  SdpProblem prob = min_offdiag_problem();
  SolveReport a = solve(prob);
  SolveReport b = solve(prob);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_value == b.primal_value);
  CHECK(a.dual_value == b.dual_value);
  CHECK(a.dual_value <= a.primal_value + 1e-8 * (1 + std::abs(a.primal_value)));
}

TEST_CASE("infeasible equality over psd cone") {
  // X(0,0) = -1 with X psd is infeasible
  SdpProblem prob;
  int blk = prob.add_psd_block("X", 1);
  int eq = prob.add_equality(-1.0);
  prob.add_entry_coeff(eq, blk, 0, 0, 1.0);
  SolveReport rep = solve(prob);
  CHECK(rep.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded objective") {
  // min -x11 s.t. x12 = 0: x11 can grow without bound
  SdpProblem prob;
  int blk = prob.add_psd_block("X", 2);
  int eq = prob.add_equality(0.0);
  prob.add_entry_coeff(eq, blk, 0, 1, 1.0);
  prob.add_objective_entry(blk, 0, 0, -1.0);
  SolveReport rep = solve(prob);
  CHECK(rep.status == SolveStatus::unbounded);
}

TEST_CASE("nonneg scalar slack") {
  // min c'v s.t. v0 + v1 = 2, v0 - v1 = 1 with v >= 0
  SdpProblem prob;
  int v0 = prob.add_nonneg_var("v0");
  int v1 = prob.add_nonneg_var("v1");
  int blk = prob.add_psd_block("pad", 1);  // keep a cone block around
  int e0 = prob.add_equality(2.0);
  prob.add_nonneg_coeff(e0, v0, 1.0);
  prob.add_nonneg_coeff(e0, v1, 1.0);
  int e1 = prob.add_equality(1.0);
  prob.add_nonneg_coeff(e1, v0, 1.0);
  prob.add_nonneg_coeff(e1, v1, -1.0);
  int e2 = prob.add_equality(0.5);
  prob.add_entry_coeff(e2, blk, 0, 0, 1.0);
  prob.add_objective_nonneg(v0, 1.0);
  prob.add_objective_nonneg(v1, 3.0);
  SolveReport rep = solve(prob);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.nonneg_values[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(rep.nonneg_values[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.primal_value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("sdpa round trip") {
  SdpProblem prob = min_offdiag_problem();
  std::string path = (std::filesystem::temp_directory_path() / "sipsdp_roundtrip.dat-s").string();
  export_sdpa(prob, path);
  SdpProblem back = import_sdpa(path);
  SolveReport direct = solve(prob);
  SolveReport rt = solve(back);
  REQUIRE(direct.status == SolveStatus::optimal);
  REQUIRE(rt.status == SolveStatus::optimal);
  CHECK(rt.primal_value == doctest::Approx(direct.primal_value).epsilon(1e-6));
  std::filesystem::remove(path);
}

TEST_CASE("sdpa text format shape") {
  SdpProblem prob;
  int blk = prob.add_psd_block("X", 2);
  int v = prob.add_nonneg_var("w");
  int eq = prob.add_equality(1.0);
  prob.add_entry_coeff(eq, blk, 0, 0, 1.0);
  prob.add_nonneg_coeff(eq, v, 2.0);
  std::string text = sdpa_text(prob);
  // one constraint, two blocks, the scalar block marked diagonal
  CHECK(text.find("1\n2\n2 -1\n1\n") != std::string::npos);
  // zero objective: no matno-0 entries
  CHECK(text.find("\n0 ") == std::string::npos);

  SdpProblem back = parse_sdpa(text);
  CHECK(back.num_equalities() == 1);
  CHECK(back.num_blocks() == 1);
  CHECK(back.num_nonneg() == 1);
}

TEST_CASE("sdpa randomized solve equivalence") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    SdpProblem prob;
    int blk = prob.add_psd_block("X", 3);
    int w = prob.add_nonneg_var("w");
    // trace X + w = 3 and one random off-diagonal pin
    int e0 = prob.add_equality(3.0);
    for (int i = 0; i < 3; ++i) prob.add_entry_coeff(e0, blk, i, i, 1.0);
    prob.add_nonneg_coeff(e0, w, 1.0);
    int e1 = prob.add_equality(0.3 * unif(rng));
    prob.add_entry_coeff(e1, blk, 0, 1, 1.0);
    for (int i = 0; i <= 2; ++i)
      for (int j = i; j < 3; ++j) prob.add_objective_entry(blk, i, j, unif(rng));
    prob.add_objective_nonneg(w, unif(rng));

    std::string path = (std::filesystem::temp_directory_path() / "sipsdp_rand.dat-s").string();
    export_sdpa(prob, path);
    SdpProblem back = import_sdpa(path);
    SolveReport direct = solve(prob);
    SolveReport rt = solve(back);
    REQUIRE(direct.status == SolveStatus::optimal);
    REQUIRE(rt.status == SolveStatus::optimal);
    CHECK(rt.primal_value == doctest::Approx(direct.primal_value).epsilon(1e-6));
    std::filesystem::remove(path);
  }
}

TEST_CASE("sdpa parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_sdpa(""), doctest::Contains("line"), ParseError);
  CHECK_THROWS_WITH_AS(parse_sdpa("1\n1\n2\n1.0\n1 1 3 3 1.0\n"),
                       doctest::Contains("line 5"), ParseError);
  CHECK_THROWS_WITH_AS(parse_sdpa("1\n1\n-2\n1.0\n1 1 1 2 1.0\n"),
                       doctest::Contains("diagonal"), ParseError);
}

TEST_CASE("settings from flat key-value map") {
  SdpSettings s = SdpSettings::from_map({{"feas_tol", 1e-9}, {"max_iter", 50}});
  CHECK(s.feas_tol == doctest::Approx(1e-9));
  CHECK(s.max_iter == 50);
  CHECK_THROWS_AS(SdpSettings::from_map({{"bogus", 1.0}}), Error);
}
