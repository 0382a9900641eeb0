#include "varhunt/minhunt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varhunt {

namespace {

double fem_residual(const EnergyPair& pair, const Vec& x, double mu) {
  if (!pair.fem) return -1.0;
  return pair.fem->model->residual(pair.fem->wrap(x),
                                   pair.fem->residual_scale(mu));
}

LocalMin package(const EnergyPair& pair, double mu, double rho, Vec x,
                 const HuntTolerances& tol) {
  LocalMin m;
  m.x = std::move(x);
  m.mu = mu;
  m.psi = pair.psi(m.x);
  m.phi = pair.phi(m.x);
  m.energy = m.phi + mu * m.psi;
  m.grad_sup = pair.grad_energy(m.x, mu).lpNorm<Eigen::Infinity>();
  m.generating_rho = rho;
  m.interior = m.psi < rho - tol.interior_tol * std::max(1.0, rho);
  m.converged = m.grad_sup <= tol.grad_tol;
  m.residual = fem_residual(pair, m.x, mu);
  return m;
}

}  // namespace

LocalMin minimize_sublevel(const EnergyPair& pair, double mu, double rho,
                           const Vec& start, const HuntTolerances& tol) {
  // Restored starts may sit on the boundary Psi == rho to machine precision;
  // pull those strictly inside before insisting on feasibility.
  Vec s = start;
  if (pair.psi(s) <= rho)
    for (int it = 0; it < 64 && !(pair.psi(s) < rho); ++it)
      s = pair.x0 + 0.5 * (s - pair.x0);
  if (!(pair.psi(s) < rho))
    throw std::invalid_argument("infeasible start: Psi(start) >= rho");
  SublevelConstraint con{pair.psi, pair.x0, rho};
  auto f = [&](const Vec& x) { return pair.energy(x, mu); };
  auto g = [&](const Vec& x) { return pair.grad_energy(x, mu); };
  DescentOptions dopts;
  dopts.grad_tol = tol.grad_tol;
  dopts.max_iters = tol.max_iters;
  DescentResult r = projected_descent(f, g, con, std::move(s), dopts);

  Vec best = r.x;
  if (pair.smooth && r.grad_sup > 0.0) {
    NewtonResult nr = newton_solve(g, r.x, 40, tol.grad_tol * 0.1);
    if (nr.converged && con.feasible(nr.x) &&
        f(nr.x) <= r.value + 1e-9 * (1.0 + std::fabs(r.value)))
      best = nr.x;
  }
  return package(pair, mu, rho, std::move(best), tol);
}

bool curvature_spot_check(const EnergyPair& pair, double mu, const LocalMin& m,
                          std::uint64_t seed) {
  auto rng = restart_rng(seed, 7919);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double e0 = m.energy;
  double step = 1e-4;
  double slack = 1e-10 * (1.0 + std::fabs(e0)) + 10.0 * m.grad_sup * step;
  for (int d = 0; d < 2 * pair.dim; ++d) {
    Vec dir(pair.dim);
    for (int j = 0; j < pair.dim; ++j) dir[j] = gauss(rng);
    double n = dir.norm();
    if (n == 0.0) continue;
    dir /= n;
    if (pair.energy(m.x + step * dir, mu) < e0 - slack) return false;
  }
  return true;
}

namespace {

bool distinct_from(const std::vector<LocalMin>& accepted, const Vec& x,
                   double tol) {
  double nx = x.lpNorm<Eigen::Infinity>();
  for (const auto& a : accepted) {
    double na = a.x.lpNorm<Eigen::Infinity>();
    double d = (a.x - x).lpNorm<Eigen::Infinity>();
    if (d / (1.0 + std::max(na, nx)) <= tol) return false;
  }
  return true;
}

HuntReport hunt(const EnergyPair& pair, double mu, const LadderSpec& ladder,
                std::uint64_t seed, const HuntOptions& opts, bool increasing) {
  if (!pair.coercive && increasing)
    throw std::invalid_argument("increasing hunt requires a coercive Psi");
  if (!(ladder.factor > 1.0) || ladder.levels < 1)
    throw std::invalid_argument("bad ladder spec");

  HuntReport report;
  report.increasing = increasing;
  report.mu = mu;

  bool zero_is_min = pair.x0.lpNorm<Eigen::Infinity>() <= 1e-300;
  int since_accept = 0;
  double rho = ladder.rho0;
  for (int level = 0; level < ladder.levels; ++level) {
    report.levels.push_back(rho);
    SublevelConstraint con{pair.psi, pair.x0, rho * (1.0 - 1e-12)};

    auto worker = [&](int restart) {
      auto rng = restart_rng(splitmix64(seed + level), restart);
      Vec start;
      int warm = static_cast<int>(report.accepted.size());
      if (restart > 0 && restart <= warm)
        start = con.restore(report.accepted[restart - 1].x);
      else
        start = con.restore(pair.propose(rho, restart, rng));
      LocalMin m = minimize_sublevel(pair, mu, rho, start, opts.tol);
      return Candidate{m.energy, m.x, m.converged};
    };
    auto cands = run_multistart(opts.budget + static_cast<int>(report.accepted.size()),
                                worker);

    // examine candidates in restart order so acceptance is deterministic
    bool accepted_here = false;
    for (const auto& c : cands) {
      LocalMin m = package(pair, mu, rho, c.x, opts.tol);
      auto reject = [&](const std::string& why) {
        report.rejected.push_back({level, rho, why, m.psi, m.grad_sup});
      };
      if (!m.converged) {
        reject("gradient tolerance not met");
        continue;
      }
      if (!m.interior) {
        reject("not interior to the sublevel set");
        continue;
      }
      if (pair.fem && m.residual > opts.tol.residual_tol) {
        reject("weak-form residual above tolerance");
        continue;
      }
      if (!distinct_from(report.accepted, m.x, opts.tol.distinct_tol)) {
        reject("duplicate of an accepted minimum");
        continue;
      }
      if (increasing) {
        if (!report.accepted.empty() && m.psi <= report.accepted.back().psi) {
          reject("Psi level not strictly increasing");
          continue;
        }
      } else {
        if (zero_is_min && m.x.lpNorm<Eigen::Infinity>() <= opts.tol.nonzero_tol) {
          reject("zero function filtered in decreasing mode");
          continue;
        }
        if (!report.accepted.empty() && m.psi >= report.accepted.back().psi) {
          reject("Psi level not strictly decreasing");
          continue;
        }
      }
      if (!curvature_spot_check(pair, mu, m, seed)) {
        reject("curvature spot check failed");
        continue;
      }
      report.accepted.push_back(std::move(m));
      accepted_here = true;
    }

    since_accept = accepted_here ? 0 : since_accept + 1;
    if (since_accept >= opts.stagnation_levels) {
      report.stagnated = true;
      break;
    }
    rho = increasing ? rho * ladder.factor : rho / ladder.factor;
    if (!increasing && !(rho > pair.psi(pair.x0) + 1e-12)) break;
  }
  return report;
}

}  // namespace

HuntReport hunt_increasing(const EnergyPair& pair, double mu,
                           const LadderSpec& ladder, std::uint64_t seed,
                           const HuntOptions& opts) {
  return hunt(pair, mu, ladder, seed, opts, true);
}

HuntReport hunt_decreasing(const EnergyPair& pair, double mu,
                           const LadderSpec& ladder, std::uint64_t seed,
                           const HuntOptions& opts) {
  return hunt(pair, mu, ladder, seed, opts, false);
}

MountainPassResult mountain_pass(const EnergyPair& pair, double mu, Vec end_a,
                                 Vec end_b, const MountainPassOptions& opts) {
  MountainPassResult out;
  int K = std::max(opts.path_points, 5);
  auto E = [&](const Vec& x) { return pair.energy(x, mu); };
  auto G = [&](const Vec& x) { return pair.grad_energy(x, mu); };

  if ((end_a - end_b).lpNorm<Eigen::Infinity>() <= 1e-12) {
    out.collapsed = true;
    out.minimax = end_a;
    out.energy = E(end_a);
    out.path = {end_a, end_b};
    out.elevation = {out.energy, out.energy};
    return out;
  }

  std::vector<Vec> path(K);
  for (int i = 0; i < K; ++i) {
    double t = static_cast<double>(i) / (K - 1);
    path[i] = (1.0 - t) * end_a + t * end_b;
  }

  auto reparametrize = [&](std::vector<Vec>& p) {
    std::vector<double> arc(K, 0.0);
    for (int i = 1; i < K; ++i) arc[i] = arc[i - 1] + (p[i] - p[i - 1]).norm();
    double total = arc[K - 1];
    if (total <= 0.0) return;
    std::vector<Vec> fresh(K);
    fresh[0] = p[0];
    fresh[K - 1] = p[K - 1];
    int seg = 0;
    for (int i = 1; i < K - 1; ++i) {
      double target = total * i / (K - 1);
      while (seg < K - 2 && arc[seg + 1] < target) ++seg;
      double span = arc[seg + 1] - arc[seg];
      double t = span > 0.0 ? (target - arc[seg]) / span : 0.0;
      fresh[i] = (1.0 - t) * p[seg] + t * p[seg + 1];
    }
    p = std::move(fresh);
  };

  double spacing = (end_b - end_a).norm() / (K - 1);
  int max_idx = 0;
  for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
    for (int i = 1; i < K - 1; ++i) {
      Vec g = G(path[i]);
      double gn = g.norm();
      if (gn == 0.0) continue;
      double t = std::min(0.25 * spacing / gn, 0.5);
      double e0 = E(path[i]);
      for (int bt = 0; bt < 20; ++bt) {
        Vec cand = path[i] - t * g;
        if (E(cand) < e0) {
          path[i] = std::move(cand);
          break;
        }
        t *= 0.5;
      }
    }
    reparametrize(path);
    max_idx = 0;
    double emax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
      double e = E(path[i]);
      if (e > emax) {
        emax = e;
        max_idx = i;
      }
    }
    if (G(path[max_idx]).lpNorm<Eigen::Infinity>() <= opts.grad_tol) break;
  }

  out.path = path;
  out.elevation.resize(K);
  for (int i = 0; i < K; ++i) out.elevation[i] = E(path[i]);
  out.minimax = path[max_idx];
  out.energy = out.elevation[max_idx];
  out.grad_sup = G(out.minimax).lpNorm<Eigen::Infinity>();

  double end_max = std::max(E(end_a), E(end_b));
  if (opts.polish && pair.smooth && max_idx > 0 && max_idx < K - 1) {
    NewtonResult nr = newton_solve(G, out.minimax, 60, opts.grad_tol * 1e-2);
    if (nr.converged && E(nr.x) >= end_max - 1e-12) {
      out.minimax = nr.x;
      out.energy = E(out.minimax);
      out.grad_sup = nr.res_sup;
    }
  }

  if (out.energy <= end_max + 1e-12) {
    out.collapsed = true;
    return out;
  }
  out.residual = fem_residual(pair, out.minimax, mu);
  out.success = out.grad_sup <= opts.grad_tol;
  return out;
}

}  // namespace varhunt
