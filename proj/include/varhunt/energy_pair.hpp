#pragma once

#include <memory>
#include <optional>

#include "varhunt/expr.hpp"
#include "varhunt/fem.hpp"
#include "varhunt/optimize.hpp"

namespace varhunt {

// FEM backing of an energy pair; lets downstream code recompute weak-form
// residuals for certified points.
struct FemBacking {
  std::shared_ptr<const EnergyModel> model;
  FeSpacePtr space;

  DiscreteFn wrap(const Vec& coeffs) const { return DiscreteFn(space, coeffs); }
  // residual scale s.t. grad(Phi + mu*Psi) = 0 matches residual(u, scale) = 0
  double residual_scale(double mu) const {
    return model->dirichlet() ? 1.0 / (mu * model->p()) : 1.0 / mu;
  }
};

// Finite-dimensional (Phi, Psi) pair with gradients and an interior point
// x0 = argmin Psi. All evaluators are pure and safe for concurrent calls.
struct EnergyPair {
  int dim = 1;
  std::function<double(const Vec&)> phi, psi;
  std::function<Vec(const Vec&)> grad_phi, grad_psi;
  Vec x0;
  bool coercive = true;
  bool smooth = true;  // false when Psi has kinks (no Newton polish then)

  // Box half-width R(rho) with {Psi <= rho} inside ||x||_inf <= R(rho).
  std::function<double(double)> box_radius;
  // Start-point proposal for one restart. Restart 0 must return x0.
  std::function<Vec(double rho, int restart, std::mt19937_64&)> sampler;

  std::optional<FemBacking> fem;

  double energy(const Vec& x, double mu) const { return phi(x) + mu * psi(x); }
  Vec grad_energy(const Vec& x, double mu) const {
    return grad_phi(x) + mu * grad_psi(x);
  }
  Vec propose(double rho, int restart, std::mt19937_64& rng) const;
};

// 1-D toy pair from expressions in `xi`; gradients by central differences.
EnergyPair make_toy_pair(const Expr& phi, const Expr& psi, double box_scale = 0.0);

// Pair wrapping a FEM energy model. Sampling uses x0-centered rays scaled by
// the p-homogeneity of Psi.
EnergyPair make_fem_pair(std::shared_ptr<const EnergyModel> model, FeSpacePtr space);

}  // namespace varhunt
