#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

#include "varhunt/expr.hpp"

namespace varhunt {

using Vec = Eigen::VectorXd;

struct Mesh1D {
  std::vector<double> nodes;  // strictly increasing, nodes.front()=a, back()=b

  static Mesh1D uniform(int elements, double a = 0.0, double b = 1.0);
  int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
};

enum class Bc { Dirichlet, Neumann };

struct FeSpace {
  Mesh1D mesh;
  Bc bc = Bc::Dirichlet;
  int quad_points = 4;  // Gauss points per element

  // Free coefficients: interior nodes for Dirichlet, all nodes for Neumann.
  int dim() const {
    int n = mesh.num_elements();
    return bc == Bc::Dirichlet ? n - 1 : n + 1;
  }
};

using FeSpacePtr = std::shared_ptr<const FeSpace>;

// P1 function given by its free nodal coefficients; Dirichlet boundary
// values are implicitly zero.
struct DiscreteFn {
  FeSpacePtr space;
  Vec coeffs;

  DiscreteFn() = default;
  DiscreteFn(FeSpacePtr s, Vec c) : space(std::move(s)), coeffs(std::move(c)) {}
  static DiscreteFn zero(FeSpacePtr s);

  // Nodal values including boundary nodes.
  std::vector<double> nodal_values() const;
  double max_abs_nodal() const;
};

struct DirichletProblem {
  Expr f;
};

struct NeumannProblem {
  Expr f, g, alpha, beta, lambda_coef;
};

// Energy splitting:
//   Dirichlet: Psi(u) = int |u'|^p,  Phi(u) = -int F(x, u)
//   Neumann:   Psi(u) = (1/p)(int |u'|^p + int lambda(x) |u|^p),
//              Phi(u) = -int (alpha F_f + beta F_g)(x, u)
// With these conventions, critical points of Phi + mu*Psi are discrete weak
// solutions of -( |u'|^{p-2} u' )' = f/(p*mu) (Dirichlet) and, at mu = 1, of
// the Neumann problem with right-hand side alpha f + beta g.
class EnergyModel {
 public:
  EnergyModel(double p, DirichletProblem prob);
  EnergyModel(double p, NeumannProblem prob);

  double p() const { return p_; }
  bool dirichlet() const { return std::holds_alternative<DirichletProblem>(problem_); }
  const DirichletProblem& dirichlet_problem() const { return std::get<DirichletProblem>(problem_); }
  const NeumannProblem& neumann_problem() const { return std::get<NeumannProblem>(problem_); }

  double assemble_psi(const DiscreteFn& u) const;
  double assemble_phi(const DiscreteFn& u) const;
  double energy(const DiscreteFn& u, double mu) const {
    return assemble_phi(u) + mu * assemble_psi(u);
  }
  Vec grad_energy(const DiscreteFn& u, double mu) const;
  // max_i | int |u'|^{p-2} u' phi_i' (+ int lambda |u|^{p-2} u phi_i)
  //         - scale * int rhs(x, u) phi_i |
  double residual(const DiscreteFn& u, double scale) const;

  // Checks the essential-infimum-positive assumption on lambda at the
  // quadrature points (Neumann only).
  void validate(const FeSpace& space) const;

  double rhs_value(double x, double xi) const;
  double rhs_primitive(double x, double xi) const;
  bool rhs_has_distosc() const { return rhs_distosc_; }

 private:
  void check_space(const DiscreteFn& u) const;

  double p_;
  std::variant<DirichletProblem, NeumannProblem> problem_;
  std::shared_ptr<const Primitive> prim_f_, prim_g_;
  bool rhs_distosc_ = false;
};

struct NormReport {
  double lp = 0.0;        // (int |u|^p)^{1/p}
  double grad_lp = 0.0;   // (int |u'|^p)^{1/p}, the zero-trace Sobolev norm
  double w1p = 0.0;       // (int |u'|^p + int |u|^p)^{1/p}
  double c1proxy = 0.0;   // max nodal |u| + max element |slope|
};

NormReport norms(const DiscreteFn& u, double p);

// Gauss-Legendre points/weights on [0, 1].
void gauss_rule(int n, std::vector<double>& pts, std::vector<double>& wts);

// Solve the linear Dirichlet problem -u'' = rhs(x) (p = 2) exactly on the
// mesh; used as an oracle and as a warm-start helper.
DiscreteFn solve_linear_dirichlet(const FeSpacePtr& space, const Expr& rhs);

// CSV serialization: one `node_coordinate,value` row per node (boundary
// nodes included).
std::string discrete_fn_to_csv(const DiscreteFn& u);
DiscreteFn discrete_fn_from_csv(const FeSpacePtr& space, const std::string& csv);

}  // namespace varhunt
