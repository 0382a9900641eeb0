// Compares the serial reference multistart loop against the OpenMP variant
// on a representative sublevel-minimization workload and checks that the
// reduced results are identical.

#include <chrono>
#include <cstdio>

#include "varhunt/minhunt.hpp"

using namespace varhunt;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int N = argc > 1 ? std::atoi(argv[1]) : 64;
  int budget = argc > 2 ? std::atoi(argv[2]) : 24;
  int jobs = argc > 3 ? std::atoi(argv[3]) : 4;

  auto space = std::make_shared<const FeSpace>(
      FeSpace{Mesh1D::uniform(N), Bc::Dirichlet, 4});
  auto model = std::make_shared<const EnergyModel>(
      2.0, DirichletProblem{Expr::parse("xi^3")});
  EnergyPair pair = make_fem_pair(model, space);

  double rho = 50.0, mu = 0.5;
  SublevelConstraint con{pair.psi, pair.x0, rho * (1.0 - 1e-12)};
  auto worker = [&](int restart) {
    auto rng = restart_rng(42, restart);
    Vec start = con.restore(pair.propose(rho, restart, rng));
    LocalMin m = minimize_sublevel(pair, mu, rho, start);
    return Candidate{m.energy, m.x, m.converged};
  };

  set_jobs(1);
  double t0 = now_ms();
  auto serial = run_multistart_serial(budget, worker);
  double t1 = now_ms();
  set_jobs(jobs);
  auto parallel = run_multistart(budget, worker);
  double t2 = now_ms();

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i)
    identical = serial[i].value == parallel[i].value &&
                serial[i].x == parallel[i].x;

  std::printf("workload: N=%d budget=%d jobs=%d\n", N, budget, jobs);
  std::printf("serial:   %8.1f ms\n", t1 - t0);
  std::printf("parallel: %8.1f ms  (speedup %.2fx)\n", t2 - t1,
              (t1 - t0) / std::max(t2 - t1, 1e-9));
  std::printf("results identical: %s\n", identical ? "yes" : "NO");
  std::printf("best energy: %.17g\n", best_candidate(serial).value);
  return identical ? 0 : 1;
}
