#include <doctest.h>

#include <cmath>
#include <random>

#include "varhunt/fem.hpp"

using namespace varhunt;

namespace {

FeSpacePtr make_space(int n, Bc bc) {
  return std::make_shared<const FeSpace>(FeSpace{Mesh1D::uniform(n), bc, 4});
}

}  // namespace

TEST_CASE("hat function energies are exact") {
  auto space = make_space(2, Bc::Dirichlet);
  Vec c(1);
  c[0] = 1.0;
  DiscreteFn hat(space, c);

  EnergyModel m2(2.0, DirichletProblem{Expr::parse("xi")});
  CHECK(m2.assemble_psi(hat) == doctest::Approx(4.0).epsilon(1e-14));
  // Phi = -int u^2/2 = -1/6 for the unit hat
  CHECK(m2.assemble_phi(hat) == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));

  EnergyModel m3(3.0, DirichletProblem{Expr::parse("xi")});
  CHECK(m3.assemble_psi(hat) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("assembled gradient matches finite differences") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double p : {2.0, 3.0}) {
    for (int n : {8, 32}) {
      for (Bc bc : {Bc::Dirichlet, Bc::Neumann}) {
        auto space = make_space(n, bc);
        EnergyModel model =
            bc == Bc::Dirichlet
                ? EnergyModel(p, DirichletProblem{Expr::parse("xi^3")})
                : EnergyModel(p, NeumannProblem{Expr::parse("xi^3"),
                                                Expr::parse("xi"),
                                                Expr::parse("1"),
                                                Expr::parse("0.5"),
                                                Expr::parse("1+x")});
        double tol = p == 2.0 ? 1e-6 : 1e-4;
        for (int trial = 0; trial < 20; ++trial) {
          Vec c(space->dim());
          for (int i = 0; i < c.size(); ++i) c[i] = 0.5 * gauss(rng);
          DiscreteFn u(space, c);
          Vec g = model.grad_energy(u, 0.7);
          for (int i = 0; i < c.size(); i += std::max(1, space->dim() / 5)) {
            double h = 1e-6 * std::max(1.0, std::fabs(c[i]));
            Vec cp = c, cm = c;
            cp[i] += h;
            cm[i] -= h;
            double fd = (model.energy(DiscreteFn(space, cp), 0.7) -
                         model.energy(DiscreteFn(space, cm), 0.7)) /
                        (2 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(tol));
          }
        }
      }
    }
  }
}

TEST_CASE("linear solver reproduces -u''=1 exactly at the nodes") {
  auto space = make_space(64, Bc::Dirichlet);
  DiscreteFn u = solve_linear_dirichlet(space, Expr::parse("1"));
  auto vals = u.nodal_values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double x = space->mesh.nodes[i];
    CHECK(vals[i] == doctest::Approx(0.5 * x * (1.0 - x)).epsilon(1e-8));
  }
  // weak residual of the p=2 energy gradient at mu = 1/2 (so 1/(mu p) = 1)
  EnergyModel model(2.0, DirichletProblem{Expr::parse("1")});
  CHECK(model.residual(u, 1.0) <= 1e-12);
}

TEST_CASE("psi is convex along segments") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double p : {2.0, 3.0}) {
    auto space = make_space(16, Bc::Neumann);
    EnergyModel model(p, NeumannProblem{Expr::parse("0"), Expr::parse("0"),
                                        Expr::parse("1"), Expr::parse("0"),
                                        Expr::parse("1")});
    for (int trial = 0; trial < 10; ++trial) {
      Vec a(space->dim()), b(space->dim());
      for (int i = 0; i < a.size(); ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
      }
      double pa = model.assemble_psi(DiscreteFn(space, a));
      double pb = model.assemble_psi(DiscreteFn(space, b));
      double mid = model.assemble_psi(DiscreteFn(space, Vec(0.5 * (a + b))));
      CHECK(mid <= 0.5 * (pa + pb) + 1e-10);
    }
  }
}

TEST_CASE("norm report on the unit hat") {
  auto space = make_space(2, Bc::Dirichlet);
  Vec c(1);
  c[0] = 1.0;
  NormReport r = norms(DiscreteFn(space, c), 2.0);
  CHECK(r.c1proxy == doctest::Approx(3.0));  // max value 1 + max slope 2
  CHECK(r.grad_lp == doctest::Approx(2.0));
  CHECK(r.lp == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("neumann validation rejects nonpositive weights") {
  auto space = make_space(8, Bc::Neumann);
  EnergyModel bad(2.0, NeumannProblem{Expr::parse("xi"), Expr::parse("0"),
                                      Expr::parse("1"), Expr::parse("0"),
                                      Expr::parse("x - 0.5")});
  CHECK_THROWS_AS(bad.validate(*space), std::invalid_argument);
  EnergyModel good(2.0, NeumannProblem{Expr::parse("xi"), Expr::parse("0"),
                                       Expr::parse("1"), Expr::parse("0"),
                                       Expr::parse("1 + x")});
  CHECK_NOTHROW(good.validate(*space));
}

TEST_CASE("discrete function CSV round trip is bit exact") {
  auto space = make_space(8, Bc::Dirichlet);
  Vec c(7);
  for (int i = 0; i < 7; ++i) c[i] = std::sin(1e3 * (i + 1)) / 3.0;
  DiscreteFn u(space, c);
  DiscreteFn back = discrete_fn_from_csv(space, discrete_fn_to_csv(u));
  for (int i = 0; i < 7; ++i) CHECK(back.coeffs[i] == c[i]);
  CHECK_THROWS_AS(discrete_fn_from_csv(space, "not a csv"),
                  std::invalid_argument);
}
