#include "varhunt/optimize.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace varhunt {

namespace {
std::atomic<int> g_jobs{1};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(restart) + 1)));
}

void set_jobs(int jobs) { g_jobs = jobs < 1 ? 1 : jobs; }
int get_jobs() { return g_jobs; }

Vec SublevelConstraint::restore(const Vec& x) const {
  if (feasible(x)) return x;
  // psi(x0) < level by contract; bisect on the segment [x0, x].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec cand = x0 + mid * (x - x0);
    if (psi(cand) <= level)
      lo = mid;
    else
      hi = mid;
  }
  return x0 + lo * (x - x0);
}

DescentResult projected_descent(const std::function<double(const Vec&)>& f,
                                const std::function<Vec(const Vec&)>& grad,
                                const SublevelConstraint& con, Vec start,
                                const DescentOptions& opts) {
  DescentResult out;
  Vec x = con.restore(start);
  double fx = f(x);
  double step = opts.initial_step;
  int stalls = 0;

  for (out.iters = 0; out.iters < opts.max_iters; ++out.iters) {
    Vec g = grad(x);
    out.grad_sup = g.lpNorm<Eigen::Infinity>();
    if (out.grad_sup <= opts.grad_tol) {
      out.grad_converged = true;
      break;
    }
    double gsq = g.squaredNorm();
    double t = step;
    bool accepted = false;
    while (t >= opts.min_step) {
      Vec cand = con.restore(x - t * g);
      double fc = f(cand);
      if (fc < fx - 1e-4 * t * gsq ||
          (fc < fx && (cand - x).lpNorm<Eigen::Infinity>() > 0.0)) {
        x = std::move(cand);
        fx = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (accepted) {
      stalls = 0;
      step = std::min(opts.initial_step, 2.0 * t);
    } else {
      if (++stalls >= opts.stall_limit) {
        out.stalled = true;
        break;
      }
      step = opts.initial_step;  // retry from a fresh step size once more
    }
  }

  out.x = std::move(x);
  out.value = fx;
  Vec g = grad(out.x);
  out.grad_sup = g.lpNorm<Eigen::Infinity>();
  out.grad_converged = out.grad_sup <= opts.grad_tol;
  return out;
}

std::vector<Candidate> run_multistart_serial(
    int budget, const std::function<Candidate(int)>& worker) {
  std::vector<Candidate> out(budget);
  for (int i = 0; i < budget; ++i) out[i] = worker(i);
  return out;
}

std::vector<Candidate> run_multistart(
    int budget, const std::function<Candidate(int)>& worker) {
  int jobs = get_jobs();
  if (jobs <= 1) return run_multistart_serial(budget, worker);
  std::vector<Candidate> out(budget);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < budget; ++i) out[i] = worker(i);
#else
  for (int i = 0; i < budget; ++i) out[i] = worker(i);
#endif
  return out;
}

const Candidate& best_candidate(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw std::logic_error("empty candidate set");
  const Candidate* best = &candidates[0];
  for (const auto& c : candidates)
    if (c.value < best->value) best = &c;
  return *best;
}

NewtonResult newton_solve(const std::function<Vec(const Vec&)>& G, Vec x,
                          int max_iters, double tol, double fd_step) {
  NewtonResult out;
  int m = static_cast<int>(x.size());
  Vec gx = G(x);
  double res = gx.lpNorm<Eigen::Infinity>();
  for (out.iters = 0; out.iters < max_iters; ++out.iters) {
    if (res <= tol) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd J(m, m);
    for (int j = 0; j < m; ++j) {
      double h = fd_step * std::max(1.0, std::fabs(x[j]));
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (G(xp) - G(xm)) / (2.0 * h);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Vec dx = lu.solve(gx);
    if (!dx.allFinite()) break;
    // damping on the residual norm
    double t = 1.0;
    bool ok = false;
    while (t >= 1e-8) {
      Vec cand = x - t * dx;
      Vec gc = G(cand);
      double rc = gc.lpNorm<Eigen::Infinity>();
      if (rc < res || (t == 1.0 && rc < res * (1.0 + 1e-12))) {
        x = std::move(cand);
        gx = std::move(gc);
        res = rc;
        ok = true;
        break;
      }
      t *= 0.5;
    }
    if (!ok) break;
  }
  out.x = std::move(x);
  out.res_sup = res;
  out.converged = res <= tol;
  return out;
}

}  // namespace varhunt
