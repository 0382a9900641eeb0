#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varhunt/energy_pair.hpp"

namespace varhunt {

struct HuntTolerances {
  double grad_tol = 1e-8;        // 1e-6 is the usual FEM setting
  double interior_tol = 1e-9;    // Psi < rho - interior_tol*max(1, rho)
  double residual_tol = 1e-6;    // FEM weak-form residual
  double distinct_tol = 1e-6;    // relative sup-norm separation of minima
  double nonzero_tol = 1e-9;     // decreasing hunts reject smaller points
  int max_iters = 2000;
};

struct LocalMin {
  Vec x;
  double psi = 0.0;
  double phi = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double grad_sup = 0.0;
  double generating_rho = 0.0;
  bool interior = false;
  bool converged = false;
  double residual = -1.0;  // weak-form residual when FEM-backed, else -1
};

LocalMin minimize_sublevel(const EnergyPair& pair, double mu, double rho,
                           const Vec& start, const HuntTolerances& tol = {});

// Positive-curvature spot check: energy strictly non-decreasing along 2*dim
// seeded random directions with step 1e-4.
bool curvature_spot_check(const EnergyPair& pair, double mu, const LocalMin& m,
                          std::uint64_t seed);

struct LadderSpec {
  double rho0 = 1.0;
  double factor = 4.0;  // rho_{k+1} = factor*rho_k (increasing) or rho_k/factor
  int levels = 8;
};

struct HuntRejection {
  int level = 0;
  double rho = 0.0;
  std::string reason;
  double psi = 0.0;
  double grad_sup = 0.0;
};

struct HuntReport {
  bool increasing = true;
  double mu = 0.0;
  std::vector<double> levels;
  std::vector<LocalMin> accepted;
  std::vector<HuntRejection> rejected;
  bool stagnated = false;  // stopped after S levels without a new acceptance
};

struct HuntOptions {
  HuntTolerances tol;
  int budget = 10;
  int stagnation_levels = 3;
};

HuntReport hunt_increasing(const EnergyPair& pair, double mu,
                           const LadderSpec& ladder, std::uint64_t seed,
                           const HuntOptions& opts = {});
HuntReport hunt_decreasing(const EnergyPair& pair, double mu,
                           const LadderSpec& ladder, std::uint64_t seed,
                           const HuntOptions& opts = {});

struct MountainPassResult {
  std::vector<Vec> path;          // K points, endpoints included
  std::vector<double> elevation;  // energy along the path
  Vec minimax;
  double energy = 0.0;
  double grad_sup = 0.0;
  double residual = -1.0;  // FEM weak-form residual when applicable
  bool success = false;
  bool collapsed = false;  // path max not above the endpoints
};

struct MountainPassOptions {
  int path_points = 33;
  int sweeps = 400;
  double grad_tol = 1e-6;
  bool polish = true;  // Newton polish of the minimax point
};

MountainPassResult mountain_pass(const EnergyPair& pair, double mu, Vec end_a,
                                 Vec end_b, const MountainPassOptions& opts = {});

}  // namespace varhunt
