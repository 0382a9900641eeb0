#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace varhunt {

using Vec = Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t x);

// Per-restart RNG: identical streams regardless of execution order.
std::mt19937_64 restart_rng(std::uint64_t seed, int restart);

// Global worker count for multistart loops (the CLI's --jobs flag).
void set_jobs(int jobs);
int get_jobs();

// Sublevel constraint {psi <= level}. Restoration pulls an infeasible point
// toward the interior anchor x0 along the straight segment until feasible.
struct SublevelConstraint {
  std::function<double(const Vec&)> psi;
  Vec x0;
  double level = 0.0;

  bool feasible(const Vec& x) const { return psi(x) <= level; }
  Vec restore(const Vec& x) const;
};

struct DescentOptions {
  int max_iters = 2000;
  double grad_tol = 1e-8;        // sup norm
  double initial_step = 1.0;
  double min_step = 1e-16;
  int stall_limit = 3;           // consecutive failed line searches before stop
};

struct DescentResult {
  Vec x;
  double value = 0.0;
  double grad_sup = 0.0;
  int iters = 0;
  bool grad_converged = false;  // gradient tolerance met
  bool stalled = false;         // stopped on step collapse (e.g. boundary min)
};

// Gradient descent with backtracking line search; steps leaving the sublevel
// set are replaced by their feasibility-restored versions.
DescentResult projected_descent(const std::function<double(const Vec&)>& f,
                                const std::function<Vec(const Vec&)>& grad,
                                const SublevelConstraint& con, Vec start,
                                const DescentOptions& opts = {});

struct Candidate {
  double value = 0.0;
  Vec x;
  bool converged = false;
};

// Runs `worker(restart)` for restart = 0..budget-1 and returns all candidates
// in restart order. The parallel variant distributes restarts over OpenMP
// threads; outputs are identical to the serial reference by construction.
std::vector<Candidate> run_multistart_serial(
    int budget, const std::function<Candidate(int)>& worker);
std::vector<Candidate> run_multistart(
    int budget, const std::function<Candidate(int)>& worker);

// Index-ordered reduce: strictly smaller value wins, ties keep the earlier
// restart.
const Candidate& best_candidate(const std::vector<Candidate>& candidates);

struct NewtonResult {
  Vec x;
  double res_sup = 0.0;
  bool converged = false;
  int iters = 0;
};

// Damped Newton on G(x) = 0 with central finite-difference Jacobian.
NewtonResult newton_solve(const std::function<Vec(const Vec&)>& G, Vec x,
                          int max_iters = 50, double tol = 1e-12,
                          double fd_step = 1e-6);

}  // namespace varhunt
