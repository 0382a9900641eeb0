#include "varhunt/varprinciple.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace varhunt {

std::vector<double> geometric_grid(const GridSpec& spec) {
  if (spec.count < 1 || !(spec.lo > 0.0) || !(spec.hi >= spec.lo))
    throw std::invalid_argument("bad grid spec");
  std::vector<double> out(spec.count);
  if (spec.count == 1) {
    out[0] = spec.lo;
    return out;
  }
  double ratio = std::pow(spec.hi / spec.lo, 1.0 / (spec.count - 1));
  for (int i = 0; i < spec.count; ++i) out[i] = spec.lo * std::pow(ratio, i);
  out.back() = spec.hi;
  return out;
}

std::pair<double, Vec> inf_phi_on_sublevel(const EnergyPair& pair, double rho,
                                           int budget, std::uint64_t seed) {
  if (!(rho > pair.psi(pair.x0)))
    throw std::invalid_argument("infeasible sublevel: rho <= Psi(x0)");
  SublevelConstraint con{pair.psi, pair.x0, rho};
  auto worker = [&](int restart) {
    auto rng = restart_rng(seed, restart);
    Vec start = con.restore(pair.propose(rho, restart, rng));
    DescentResult r = projected_descent(pair.phi, pair.grad_phi, con, start);
    return Candidate{r.value, r.x, r.grad_converged || r.stalled};
  };
  auto cands = run_multistart(std::max(budget, 1), worker);
  const Candidate& best = best_candidate(cands);
  return {best.value, best.x};
}

double quotient_at(const EnergyPair& pair, const Vec& x, double rho,
                   double m_hat) {
  double den = rho - pair.psi(x);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  double num = pair.phi(x) - m_hat;
  if (num < 0.0) num = 0.0;
  return num / den;
}

PhiCurvePoint phi_of_rho(const EnergyPair& pair, double rho, int budget,
                         std::uint64_t seed) {
  const double margin = 1e-9;
  if (!(rho > pair.psi(pair.x0) + margin))
    throw std::invalid_argument("rho too close to inf Psi");
  PhiCurvePoint out;
  out.rho = rho;
  out.restarts = budget;

  auto [m_hat, infx] = inf_phi_on_sublevel(pair, rho, budget, seed);
  out.m_hat = m_hat;
  out.certificate_infx = infx;

  // quotient search on the guarded sublevel {Psi <= rho - eps_bnd}
  double eps_bnd = 1e-6 * rho;
  double level = rho - eps_bnd;
  SublevelConstraint con{pair.psi, pair.x0, level};

  auto q = [&, m_hat = m_hat](const Vec& x) {
    double den = rho - pair.psi(x);
    double num = pair.phi(x) - m_hat;
    return num / den;  // den >= eps_bnd on the feasible set
  };
  auto grad_q = [&, m_hat = m_hat](const Vec& x) {
    double den = rho - pair.psi(x);
    double num = pair.phi(x) - m_hat;
    Vec g = (pair.grad_phi(x) * den + num * pair.grad_psi(x)) / (den * den);
    return g;
  };

  auto worker = [&](int restart) {
    auto rng = restart_rng(seed ^ 0x51e5ull, restart);
    Vec start;
    if (restart == 1 && pair.dim == static_cast<int>(infx.size()))
      start = con.restore(infx);
    else
      start = con.restore(pair.propose(level, restart, rng));
    DescentResult r = projected_descent(q, grad_q, con, std::move(start));
    return Candidate{r.value, r.x, r.grad_converged || r.stalled};
  };
  auto cands = run_multistart(std::max(budget, 2), worker);
  const Candidate& best = best_candidate(cands);
  out.certificate_x = best.x;
  out.phi_hat = quotient_at(pair, best.x, rho, m_hat);
  for (const auto& c : cands)
    if (!c.converged) out.converged = false;
  return out;
}

ThresholdReport thresholds(const EnergyPair& pair, const GridSpec& grid,
                           int window, int budget, std::uint64_t seed) {
  ThresholdReport out;
  out.grid = grid;
  out.window = window;
  auto rhos = geometric_grid(grid);
  for (std::size_t i = 0; i < rhos.size(); ++i)
    out.samples.push_back(phi_of_rho(pair, rhos[i], budget, splitmix64(seed + i)));

  double running = std::numeric_limits<double>::infinity();
  for (const auto& s : out.samples) {
    running = std::min(running, s.phi_hat);
    out.head_envelope.push_back(running);
  }

  int n = static_cast<int>(out.samples.size());
  int w = std::min(std::max(window, 1), n);
  double gamma = std::numeric_limits<double>::infinity();
  double delta = std::numeric_limits<double>::infinity();
  for (int i = n - w; i < n; ++i) gamma = std::min(gamma, out.samples[i].phi_hat);
  for (int i = 0; i < w; ++i) delta = std::min(delta, out.samples[i].phi_hat);
  out.gamma_hat = gamma;
  out.delta_hat = delta;
  out.lambda_star_hat = out.head_envelope.back();
  return out;
}

double lambda_star(const EnergyPair& pair, const GridSpec& grid, int budget,
                   std::uint64_t seed) {
  return thresholds(pair, grid, 1, budget, seed).lambda_star_hat;
}

}  // namespace varhunt
