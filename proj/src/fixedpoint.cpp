#include "varhunt/fixedpoint.hpp"

#include <cmath>
#include <stdexcept>

#include "varhunt/varprinciple.hpp"

namespace varhunt {

namespace {

// FD gradient for potentials supplied without a closed-form operator.
Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    double h = 1e-6 * std::max(1.0, std::fabs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

EnergyPair ball_pair(const PotentialSpec& spec) {
  EnergyPair pair;
  pair.dim = spec.dim;
  pair.x0 = Vec::Zero(spec.dim);
  pair.phi = [P = spec.P](const Vec& x) { return -P(x); };
  pair.grad_phi = [A = spec.A](const Vec& x) { return Vec(-A(x)); };
  pair.psi = [](const Vec& x) { return x.squaredNorm(); };
  pair.grad_psi = [](const Vec& x) { return Vec(2.0 * x); };
  pair.box_radius = [](double rho) { return std::sqrt(std::max(rho, 0.0)); };
  return pair;
}

}  // namespace

PotentialSpec PotentialSpec::from_potential(int dim,
                                            std::function<double(const Vec&)> P) {
  PotentialSpec spec;
  spec.dim = dim;
  spec.P = P;
  spec.A = [P](const Vec& x) { return fd_grad(P, x); };
  return spec;
}

// Octave k = floor(log2 r): growth piece a = r^2 for even k (and all r < 1),
// plateau a = 4^k for odd k.
namespace {

double piece_value(int k, double r) {
  if (k >= 1 && k % 2 == 1) return std::pow(4.0, k);
  return r * r;
}

double piece_slope(int k, double r) {
  if (k >= 1 && k % 2 == 1) return 0.0;
  return 2.0 * r;
}

struct Corner {
  double c;
  int k_left, k_right;
};

bool find_corner(double r, double w, Corner& out) {
  if (r <= 1.0) return false;
  int k = static_cast<int>(std::floor(std::log2(r)));
  for (int j : {k, k + 1}) {
    if (j < 1) continue;
    double c = std::pow(2.0, j);
    if (std::fabs(r - c) <= w) {
      out = {c, j - 1, j};
      return true;
    }
  }
  return false;
}

void hermite(double t, double p0, double m0, double p1, double m1, double span,
             double& val, double& der) {
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  val = h00 * p0 + h10 * span * m0 + h01 * p1 + h11 * span * m1;
  double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  der = (d00 * p0 + d01 * p1) / span + d10 * m0 + d11 * m1;
}

void plateau_eval(const PlateauProfile& prof, double r, double& val, double& der) {
  double w = prof.smoothing;
  Corner corner;
  if (find_corner(r, w, corner)) {
    double a = corner.c - w, b = corner.c + w;
    double t = (r - a) / (b - a);
    hermite(t, piece_value(corner.k_left, a), piece_slope(corner.k_left, a),
            piece_value(corner.k_right, b), piece_slope(corner.k_right, b),
            b - a, val, der);
    return;
  }
  int k = r >= 1.0 ? static_cast<int>(std::floor(std::log2(r))) : 0;
  val = piece_value(k, r);
  der = piece_slope(k, r);
}

}  // namespace

double PlateauProfile::value(double r) const {
  double v, d;
  plateau_eval(*this, r, v, d);
  return v;
}

double PlateauProfile::derivative(double r) const {
  double v, d;
  plateau_eval(*this, r, v, d);
  return d;
}

PotentialSpec make_radial_potential(int dim, PlateauProfile profile) {
  PotentialSpec spec;
  spec.dim = dim;
  spec.P = [profile](const Vec& x) { return profile.value(x.norm()); };
  spec.A = [profile](const Vec& x) {
    double r = x.norm();
    if (r == 0.0) return Vec(Vec::Zero(x.size()));
    return Vec(profile.derivative(r) / r * x);
  };
  return spec;
}

double fp_phi(const PotentialSpec& spec, double rho, int budget,
              std::uint64_t seed) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  return phi_of_rho(ball_pair(spec), rho, budget, seed).phi_hat;
}

FpReport find_fixed_point(const PotentialSpec& spec, double rho, int budget,
                          std::uint64_t seed) {
  FpReport out;
  out.rho = rho;
  out.phi_hat = fp_phi(spec, rho, budget, seed);
  out.below_half = out.phi_hat < 0.5;
  if (!out.below_half) return out;

  EnergyPair pair = ball_pair(spec);
  SublevelConstraint con{pair.psi, pair.x0, rho * (1.0 - 1e-12)};
  auto G = [&](const Vec& x) { return 0.5 * x.squaredNorm() - spec.P(x); };
  auto dG = [&](const Vec& x) { return Vec(x - spec.A(x)); };
  auto worker = [&](int restart) {
    auto rng = restart_rng(seed ^ 0xf1fdull, restart);
    Vec start = con.restore(pair.propose(rho, restart, rng));
    DescentOptions dopts;
    dopts.grad_tol = 1e-9;
    DescentResult r = projected_descent(G, dG, con, std::move(start), dopts);
    return Candidate{r.value, r.x, r.grad_converged};
  };
  auto cands = run_multistart(std::max(budget, 1), worker);
  Vec x = best_candidate(cands).x;
  NewtonResult nr = newton_solve(dG, x, 60, 1e-12);
  if (nr.converged) x = nr.x;

  out.x = x;
  out.fp_residual = (spec.A(x) - x).norm();
  out.norm_ok = x.squaredNorm() < rho;
  out.found = out.fp_residual <= 1e-6 && out.norm_ok;
  return out;
}

ScanReport thm5_scan(const PotentialSpec& spec, const std::vector<double>& radii,
                     int samples, std::uint64_t seed) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument("radii must be increasing");

  ScanReport out;
  for (double r : radii) {
    SublevelConstraint con{[](const Vec& x) { return x.squaredNorm(); },
                           Vec::Zero(spec.dim), r * r};
    auto negP = [&](const Vec& x) { return -spec.P(x); };
    auto dnegP = [&](const Vec& x) { return Vec(-spec.A(x)); };
    auto worker = [&](int restart) {
      auto rng = restart_rng(seed, restart);
      Vec start(spec.dim);
      if (restart == 0) {
        start.setZero();
        start[0] = r;  // boundary probe
      } else {
        std::uniform_real_distribution<double> unif(-r, r);
        for (int j = 0; j < spec.dim; ++j) start[j] = unif(rng);
      }
      DescentResult res =
          projected_descent(negP, dnegP, con, con.restore(start));
      return Candidate{res.value, res.x, true};
    };
    auto cands = run_multistart(std::max(samples, 1), worker);
    double sup = -best_candidate(cands).value;
    out.rows.push_back({r, sup, sup / (r * r)});
  }

  // straddle test over the tail (last three quarters of the table)
  std::size_t start = out.rows.size() / 4;
  bool below = false, above = false;
  for (std::size_t i = start; i < out.rows.size(); ++i) {
    if (out.rows[i].ratio < 0.5 - out.margin) below = true;
    if (out.rows[i].ratio > 0.5 + out.margin) above = true;
  }
  out.straddles = below && above;
  return out;
}

}  // namespace varhunt
