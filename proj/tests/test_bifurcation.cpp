#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "varhunt/bifurcation.hpp"

using namespace varhunt;

namespace {

BranchModel corollary_model(int elements = 64) {
  BranchModel m;
  m.f = Expr::parse("xi^3");
  m.g = Expr::parse("xi^0.5");
  m.s = 3.0;
  m.q = 0.5;
  m.elements = elements;
  return m;
}

}  // namespace

TEST_CASE("model validation") {
  BranchModel m = corollary_model();
  CHECK_NOTHROW(m.validate());
  m.q = 0.0;  // the q -> 0 limit is excluded
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.q = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = corollary_model();
  m.s = 1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("single solve returns a certified non-negative solution") {
  BranchModel m = corollary_model();
  BranchPoint pt = solve_plambda(m, 0.05);
  CHECK(!pt.converged_to_zero);
  CHECK(pt.residual <= 1e-8);
  CHECK(pt.min_value >= -1e-10);
  CHECK(pt.u.max_abs_nodal() > 0.0);
  CHECK(pt.energy < 0.0);
  // stored fields recompute from the discrete function
  CHECK(branch_energy(m, 0.05, pt.u) == doctest::Approx(pt.energy).epsilon(1e-10));
  CHECK(branch_residual(m, 0.05, pt.u) ==
        doctest::Approx(pt.residual).epsilon(1e-8));
  NormReport n = norms(pt.u, 2.0);
  CHECK(n.c1proxy == doctest::Approx(pt.c1proxy).epsilon(1e-12));
  CHECK(pt.ratio == doctest::Approx(pt.c1proxy / 0.05).epsilon(1e-12));
}

TEST_CASE("the trivial branch stays at zero without the concave term") {
  BranchModel m = corollary_model(32);
  m.beta = 0.0;  // pure xi^3 problem: u = 0 solves it
  auto space = std::make_shared<const FeSpace>(
      FeSpace{Mesh1D::uniform(32), Bc::Dirichlet, 4});
  DiscreteFn zero = DiscreteFn::zero(space);
  BranchPoint pt = solve_plambda(m, 0.05, &zero);
  CHECK(pt.converged_to_zero);
  CHECK(pt.u.max_abs_nodal() <= 1e-10);
}

TEST_CASE("lambda validation and grid preconditions") {
  BranchModel m = corollary_model(16);
  CHECK_THROWS_AS(solve_plambda(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(continue_branch(m, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(
      continue_branch(m, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}),
      std::invalid_argument);  // not decreasing
  CHECK_THROWS_AS(geometric_lambda_grid(0.002, 0.2, 12), std::invalid_argument);
}

TEST_CASE("branch continuation verdicts on the concave-convex model") {
  BranchModel m = corollary_model();
  Branch br = continue_branch(m, geometric_lambda_grid(0.2, 0.002, 12));
  REQUIRE(br.points.size() == 12);
  CHECK(!br.branch_lost);
  CHECK(br.lambda_star_lower == doctest::Approx(0.2));
  CHECK(br.energy_negative);
  CHECK(br.energy_decreasing);
  CHECK(br.ratio_bounded);
  CHECK(br.norms_to_zero);
  for (const auto& pt : br.points) {
    CHECK(pt.residual <= 1e-8);
    CHECK(pt.min_value >= -1e-10);
  }
  // points sorted by decreasing lambda
  for (std::size_t i = 1; i < br.points.size(); ++i)
    CHECK(br.points[i].lambda < br.points[i - 1].lambda);

  BifurcationEvidence ev = bifurcation_evidence(br);
  CHECK(ev.answer == BifurcationEvidence::Answer::Yes);
  CHECK(ev.tail.size() >= 3);
}

TEST_CASE("halving the grid spacing barely moves matched branch points") {
  BranchModel m = corollary_model();
  std::vector<double> coarse = geometric_lambda_grid(0.2, 0.0125, 9);
  std::vector<double> fine = geometric_lambda_grid(0.2, 0.0125, 17);
  Branch a = continue_branch(m, coarse);
  Branch b = continue_branch(m, fine);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    // fine grid visits every coarse lambda at even indices
    double ca = a.points[i].c1proxy;
    double cb = b.points[2 * i].c1proxy;
    CHECK(std::fabs(ca - cb) <= 0.01 * std::max(ca, cb));
  }
}

TEST_CASE("evidence verdicts on degenerate branches") {
  CHECK(bifurcation_evidence(Branch{}).answer ==
        BifurcationEvidence::Answer::Inconclusive);

  // artificial fixture: constant norms do not bifurcate from zero
  Branch flat;
  for (int i = 0; i < 6; ++i) {
    BranchPoint pt;
    pt.lambda = 0.1 / (i + 1);
    pt.c1proxy = 1.0;
    flat.points.push_back(pt);
  }
  CHECK(bifurcation_evidence(flat).answer == BifurcationEvidence::Answer::No);
}
