#include "varhunt/energy_pair.hpp"

#include <cmath>
#include <stdexcept>

namespace varhunt {

namespace {

std::function<Vec(const Vec&)> fd_gradient(std::function<double(const Vec&)> f) {
  return [f = std::move(f)](const Vec& x) {
    Vec g(x.size());
    for (int j = 0; j < x.size(); ++j) {
      double h = 1e-7 * std::max(1.0, std::fabs(x[j]));
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      g[j] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
  };
}

}  // namespace

Vec EnergyPair::propose(double rho, int restart, std::mt19937_64& rng) const {
  if (restart == 0) return x0;
  if (sampler) return sampler(rho, restart, rng);
  double R = box_radius ? box_radius(rho) : std::sqrt(std::max(rho, 1.0));
  std::uniform_real_distribution<double> unif(-R, R);
  Vec x(dim);
  for (int j = 0; j < dim; ++j) x[j] = unif(rng);
  return x;
}

EnergyPair make_toy_pair(const Expr& phi, const Expr& psi, double box_scale) {
  EnergyPair pair;
  pair.dim = 1;
  pair.x0 = Vec::Zero(1);
  pair.phi = [phi](const Vec& x) { return phi.eval(0.0, x[0]); };
  pair.psi = [psi](const Vec& x) { return psi.eval(0.0, x[0]); };
  pair.grad_phi = fd_gradient(pair.phi);
  pair.grad_psi = fd_gradient(pair.psi);
  auto psi_fn = pair.psi;
  if (box_scale > 0.0) {
    pair.box_radius = [box_scale](double rho) {
      return box_scale * std::sqrt(std::max(rho, 1e-12));
    };
  } else {
    // doubling scan; valid for coercive Psi
    pair.box_radius = [psi_fn](double rho) {
      double R = 1.0;
      Vec probe(1);
      for (int it = 0; it < 60; ++it) {
        probe[0] = R;
        double lo = psi_fn(probe);
        probe[0] = -R;
        double hi = psi_fn(probe);
        if (lo > rho && hi > rho) break;
        R *= 2.0;
      }
      return R;
    };
  }
  return pair;
}

EnergyPair make_fem_pair(std::shared_ptr<const EnergyModel> model, FeSpacePtr space) {
  model->validate(*space);
  EnergyPair pair;
  pair.dim = space->dim();
  pair.x0 = Vec::Zero(pair.dim);
  auto wrap = [space](const Vec& c) { return DiscreteFn(space, c); };
  pair.phi = [model, wrap](const Vec& c) { return model->assemble_phi(wrap(c)); };
  pair.psi = [model, wrap](const Vec& c) { return model->assemble_psi(wrap(c)); };
  pair.grad_phi = [model, wrap](const Vec& c) {
    return model->grad_energy(wrap(c), 0.0);
  };
  pair.grad_psi = [model, wrap](const Vec& c) {
    Vec with = model->grad_energy(wrap(c), 1.0);
    Vec without = model->grad_energy(wrap(c), 0.0);
    return Vec(with - without);
  };
  double p = model->p();
  auto psi_fn = pair.psi;
  int dim = pair.dim;
  bool neumann = !model->dirichlet();
  // Psi is p-homogeneous, so a direction d reaches level frac*rho at
  // t = (frac*rho / Psi(d))^{1/p}.
  pair.sampler = [psi_fn, p, dim, neumann](double rho, int restart,
                                           std::mt19937_64& rng) {
    auto scaled = [&](Vec d, double frac) {
      double base = psi_fn(d);
      if (!(base > 0.0)) return Vec(Vec::Zero(dim));
      double t = std::pow(frac * rho / base, 1.0 / p);
      return Vec(t * d);
    };
    auto smooth_dir = [&](int mode) {
      // low-frequency nodal profiles: constants (Neumann) or sine bumps
      Vec d(dim);
      for (int j = 0; j < dim; ++j) {
        double t = neumann ? static_cast<double>(j) / std::max(1, dim - 1)
                           : static_cast<double>(j + 1) / (dim + 1);
        d[j] = mode == 0 ? 1.0 : std::sin(M_PI * mode * t);
      }
      if (mode == 0 && !neumann)
        for (int j = 0; j < dim; ++j)
          d[j] = std::sin(M_PI * (j + 1.0) / (dim + 1));
      return d;
    };
    if (restart >= 1 && restart <= 4) {
      double frac = restart <= 2 ? 0.9 : 0.45;
      double sign = (restart % 2 == 1) ? 1.0 : -1.0;
      return scaled(sign * smooth_dir(0), frac);
    }
    if (restart == 5 || restart == 6)
      return scaled((restart == 5 ? 1.0 : -1.0) * smooth_dir(1), 0.7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    Vec d(dim);
    for (int j = 0; j < dim; ++j) d[j] = gauss(rng);
    return scaled(d, unif(rng));
  };
  pair.box_radius = [](double rho) { return std::sqrt(std::max(rho, 1.0)); };
  pair.fem = FemBacking{std::move(model), std::move(space)};
  return pair;
}

}  // namespace varhunt
