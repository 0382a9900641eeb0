#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varhunt/expr.hpp"
#include "varhunt/fem.hpp"

namespace varhunt {

// -u'' = alpha f(x, u) + lambda beta g(x, u), zero Dirichlet data on (0, 1).
// f grows like xi^s (s > 1), g like xi^q (0 < q < 1); both are truncated to 0
// for xi < 0 during solves and solutions certify non-negativity afterwards.
struct BranchModel {
  Expr f, g;
  double alpha = 1.0, beta = 1.0;
  double s = 3.0, q = 0.5;
  int elements = 64;

  void validate() const;  // throws std::invalid_argument on bad exponents
};

struct BranchPoint {
  double lambda = 0.0;
  DiscreteFn u;
  double c1proxy = 0.0;
  double ratio = 0.0;     // c1proxy / lambda^{q/(1-q)}
  double energy = 0.0;    // (1/2) int |u'|^2 - alpha int F_f - lambda beta int F_g
  double residual = 0.0;  // sup over free basis of the weak-form defect
  int iters = 0;
  double min_value = 0.0;  // minimum nodal value
  bool converged_to_zero = false;
  bool newton_ok = true;
};

// Energy and weak-form residual recomputed from the stored nodal data; used
// by tests and the verify command to recertify serialized points.
double branch_energy(const BranchModel& model, double lambda, const DiscreteFn& u);
double branch_residual(const BranchModel& model, double lambda, const DiscreteFn& u);

BranchPoint solve_plambda(const BranchModel& model, double lambda,
                          const DiscreteFn* warm_start = nullptr);

struct Branch {
  BranchModel model;
  std::vector<double> lambda_grid;  // decreasing
  std::vector<BranchPoint> points;
  bool branch_lost = false;  // converged to zero mid-continuation
  double lambda_star_lower = 0.0;  // largest grid lambda with a nonzero point

  bool energy_negative = false;
  bool energy_decreasing = false;  // in lambda, over the converged points
  bool ratio_bounded = false;      // tail max/min <= 10
  bool norms_to_zero = false;      // c1proxy decays along the tail
};

Branch continue_branch(const BranchModel& model,
                       const std::vector<double>& lambda_grid, int budget = 1);

std::vector<double> geometric_lambda_grid(double hi, double lo, int points);

struct BifurcationEvidence {
  enum class Answer { Yes, No, Inconclusive } answer = Answer::Inconclusive;
  std::vector<std::pair<double, double>> tail;  // (lambda, c1proxy) pairs
  std::string detail;
};

BifurcationEvidence bifurcation_evidence(const Branch& branch);

}  // namespace varhunt
