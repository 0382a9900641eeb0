#include "varhunt/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "varhunt/optimize.hpp"

namespace varhunt {

void BranchModel::validate() const {
  if (!(s > 1.0)) throw std::invalid_argument("branch model needs s > 1");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("branch model needs 0 < q < 1");
  if (elements < 2) throw std::invalid_argument("mesh too coarse");
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("weights must be nonnegative");
}

namespace {

// All nonlinearity evaluations go through the xi >= 0 truncation, so
// fractional-power expressions are never probed at negative arguments.
struct Assembler {
  const BranchModel& model;
  double lambda;
  FeSpacePtr space;
  Primitive Ff, Fg;
  std::vector<double> qp, qw;

  Assembler(const BranchModel& m, double lam, FeSpacePtr sp)
      : model(m), lambda(lam), space(std::move(sp)), Ff(m.f), Fg(m.g) {
    gauss_rule(space->quad_points, qp, qw);
  }

  double rhs(double x, double xi) const {
    double t = std::max(xi, 0.0);
    return model.alpha * model.f.eval(x, t) +
           lambda * model.beta * model.g.eval(x, t);
  }
  double rhs_prim(double x, double xi) const {
    double t = std::max(xi, 0.0);
    return model.alpha * Ff(x, t) + lambda * model.beta * Fg(x, t);
  }

  int dim() const { return space->dim(); }

  double nodal(const Vec& v, int node) const {
    int n = space->mesh.num_elements();
    if (node == 0 || node == n) return 0.0;
    return v[node - 1];
  }

  double energy(const Vec& v) const {
    const auto& nodes = space->mesh.nodes;
    int n = space->mesh.num_elements();
    double out = 0.0;
    for (int e = 0; e < n; ++e) {
      double h = nodes[e + 1] - nodes[e];
      double vl = nodal(v, e), vr = nodal(v, e + 1);
      out += 0.5 * (vr - vl) * (vr - vl) / h;
      for (std::size_t k = 0; k < qp.size(); ++k) {
        double t = qp[k];
        out -= h * qw[k] *
               rhs_prim(nodes[e] + t * h, (1.0 - t) * vl + t * vr);
      }
    }
    return out;
  }

  // Weak-form defect: gradient of `energy` in the free coefficients.
  Vec grad(const Vec& v) const {
    const auto& nodes = space->mesh.nodes;
    int n = space->mesh.num_elements();
    Vec g = Vec::Zero(dim());
    for (int e = 0; e < n; ++e) {
      double h = nodes[e + 1] - nodes[e];
      double vl = nodal(v, e), vr = nodal(v, e + 1);
      double flux = (vr - vl) / h;
      if (e >= 1) g[e - 1] -= flux;
      if (e + 1 <= n - 1) g[e] += flux;
      for (std::size_t k = 0; k < qp.size(); ++k) {
        double t = qp[k];
        double load = h * qw[k] * rhs(nodes[e] + t * h, (1.0 - t) * vl + t * vr);
        if (e >= 1) g[e - 1] -= load * (1.0 - t);
        if (e + 1 <= n - 1) g[e] -= load * t;
      }
    }
    return g;
  }
};

double predicted_amplitude(const BranchModel& model, double lambda) {
  double base = lambda * std::max(model.beta, 1e-12) / (M_PI * M_PI);
  return std::pow(base, 1.0 / (1.0 - model.q));
}

}  // namespace

double branch_energy(const BranchModel& model, double lambda,
                     const DiscreteFn& u) {
  return Assembler(model, lambda, u.space).energy(u.coeffs);
}

double branch_residual(const BranchModel& model, double lambda,
                       const DiscreteFn& u) {
  return Assembler(model, lambda, u.space)
      .grad(u.coeffs)
      .lpNorm<Eigen::Infinity>();
}

BranchPoint solve_plambda(const BranchModel& model, double lambda,
                          const DiscreteFn* warm_start) {
  model.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

  auto space = std::make_shared<const FeSpace>(
      FeSpace{Mesh1D::uniform(model.elements), Bc::Dirichlet, 4});
  Assembler asmb(model, lambda, space);

  Vec start;
  if (warm_start && warm_start->space &&
      warm_start->coeffs.size() == space->dim()) {
    start = warm_start->coeffs;
  } else {
    double amp = predicted_amplitude(model, lambda);
    start.resize(space->dim());
    for (int i = 0; i < space->dim(); ++i)
      start[i] = amp * std::sin(M_PI * space->mesh.nodes[i + 1]);
  }

  auto E = [&](const Vec& v) { return asmb.energy(v); };
  auto G = [&](const Vec& v) { return asmb.grad(v); };
  SublevelConstraint free_con{[](const Vec&) { return 0.0; },
                              Vec::Zero(space->dim()), 1.0};
  DescentOptions dopts;
  dopts.max_iters = 3000;
  dopts.grad_tol = 1e-9;
  DescentResult dr = projected_descent(E, G, free_con, start, dopts);

  BranchPoint out;
  out.lambda = lambda;
  out.iters = dr.iters;
  Vec v = dr.x;
  NewtonResult nr = newton_solve(G, v, 80, 1e-12);
  if (nr.converged) {
    v = nr.x;
    out.iters += nr.iters;
  } else {
    out.newton_ok = false;
  }

  out.u = DiscreteFn(space, v);
  out.residual = asmb.grad(v).lpNorm<Eigen::Infinity>();
  out.energy = asmb.energy(v);
  NormReport nrm = norms(out.u, 2.0);
  out.c1proxy = nrm.c1proxy;
  out.ratio = out.c1proxy / std::pow(lambda, model.q / (1.0 - model.q));
  auto vals = out.u.nodal_values();
  out.min_value = *std::min_element(vals.begin(), vals.end());
  double floor = std::max(1e-12, 1e-3 * predicted_amplitude(model, lambda));
  out.converged_to_zero = out.u.max_abs_nodal() <= floor;
  return out;
}

std::vector<double> geometric_lambda_grid(double hi, double lo, int points) {
  if (!(hi > lo) || !(lo > 0.0) || points < 2)
    throw std::invalid_argument("bad lambda grid parameters");
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(hi * std::pow(lo / hi, static_cast<double>(i) / (points - 1)));
  return out;
}

Branch continue_branch(const BranchModel& model,
                       const std::vector<double>& lambda_grid, int budget) {
  (void)budget;
  model.validate();
  if (lambda_grid.size() < 8)
    throw std::invalid_argument("lambda grid needs at least 8 points");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] < lambda_grid[i - 1]))
      throw std::invalid_argument("lambda grid must be strictly decreasing");

  Branch br;
  br.model = model;
  br.lambda_grid = lambda_grid;

  const DiscreteFn* warm = nullptr;
  for (double lam : lambda_grid) {
    BranchPoint pt = solve_plambda(model, lam, warm);
    br.points.push_back(std::move(pt));
    if (br.points.back().converged_to_zero) {
      br.branch_lost = true;
      break;
    }
    br.lambda_star_lower = std::max(br.lambda_star_lower, lam);
    warm = &br.points.back().u;
  }

  std::vector<const BranchPoint*> good;
  for (const auto& p : br.points)
    if (!p.converged_to_zero && p.residual <= 1e-8) good.push_back(&p);

  if (!good.empty()) {
    br.energy_negative = std::all_of(good.begin(), good.end(),
                                     [](auto* p) { return p->energy < 0.0; });
    // energy decreasing in lambda: along the decreasing-lambda traversal the
    // values must rise toward 0
    br.energy_decreasing = true;
    for (std::size_t i = 1; i < good.size(); ++i)
      if (!(good[i - 1]->energy < good[i]->energy)) br.energy_decreasing = false;

    std::size_t tail = std::min<std::size_t>(5, good.size());
    double rmin = good[good.size() - tail]->ratio, rmax = rmin;
    for (std::size_t i = good.size() - tail; i < good.size(); ++i) {
      rmin = std::min(rmin, good[i]->ratio);
      rmax = std::max(rmax, good[i]->ratio);
    }
    br.ratio_bounded = rmin > 0.0 && rmax / rmin <= 10.0;

    br.norms_to_zero = good.size() >= 3;
    for (std::size_t i = 1; i < good.size(); ++i)
      if (!(good[i]->c1proxy < good[i - 1]->c1proxy)) br.norms_to_zero = false;
    if (br.norms_to_zero)
      br.norms_to_zero = good.back()->c1proxy < 0.5 * good.front()->c1proxy;
  }
  return br;
}

BifurcationEvidence bifurcation_evidence(const Branch& branch) {
  BifurcationEvidence out;
  std::vector<const BranchPoint*> good;
  for (const auto& p : branch.points)
    if (!p.converged_to_zero) good.push_back(&p);
  if (good.empty()) {
    out.detail = "no nonzero branch points";
    return out;
  }
  std::size_t tail = std::min<std::size_t>(6, good.size());
  for (std::size_t i = good.size() - tail; i < good.size(); ++i)
    out.tail.emplace_back(good[i]->lambda, good[i]->c1proxy);

  bool monotone = true;
  for (std::size_t i = 1; i < out.tail.size(); ++i)
    if (!(out.tail[i].second < out.tail[i - 1].second)) monotone = false;
  double first = out.tail.front().second, last = out.tail.back().second;
  if (out.tail.size() >= 3 && monotone && last < 0.5 * first) {
    out.answer = BifurcationEvidence::Answer::Yes;
    out.detail = "norms decay monotonically with lambda along the tail";
  } else if (!monotone || last >= 0.9 * first) {
    out.answer = BifurcationEvidence::Answer::No;
    out.detail = "tail norms do not trend to zero";
  } else {
    out.detail = "tail too short or decay too slow to classify";
  }
  return out;
}

}  // namespace varhunt
