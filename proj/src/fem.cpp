#include "varhunt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varhunt {

namespace {

// |s|^{p-2} s with the p >= 2 convention spow(0, p) = 0.
double spow_val(double s, double p) {
  if (s == 0.0) return 0.0;
  return std::pow(std::fabs(s), p - 2.0) * s;
}

// Integrates integrand(x, u(x)) over one element, splitting at the x-points
// where the linear u crosses a distosc band endpoint or midpoint (the
// integrand has kinks there).
template <class Fn>
double integrate_element(double xl, double xr, double ul, double ur,
                         const std::vector<double>& pts,
                         const std::vector<double>& wts, bool split_bands,
                         Fn&& integrand) {
  std::vector<double> cuts;
  cuts.push_back(xl);
  cuts.push_back(xr);
  if (split_bands && ul != ur) {
    double umin = std::min(ul, ur), umax = std::max(ul, ur);
    for (const DistBand& band : distosc_bands()) {
      if (band.lo > umax) break;
      for (double c : {band.lo, 0.5 * (band.lo + band.hi), band.hi}) {
        if (c > umin && c < umax) {
          double x = xl + (c - ul) / (ur - ul) * (xr - xl);
          if (x > xl && x < xr) cuts.push_back(x);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
  }
  double slope = (ur - ul) / (xr - xl);
  double acc = 0.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    double a = cuts[seg], b = cuts[seg + 1], h = b - a;
    for (std::size_t q = 0; q < pts.size(); ++q) {
      double x = a + pts[q] * h;
      double u = ul + slope * (x - xl);
      acc += wts[q] * h * integrand(x, u);
    }
  }
  return acc;
}

}  // namespace

void gauss_rule(int n, std::vector<double>& pts, std::vector<double>& wts) {
  // Gauss-Legendre on [-1, 1], mapped to [0, 1].
  static const double p2[] = {0.5773502691896257};
  static const double p3[] = {0.0, 0.7745966692414834};
  static const double w3[] = {0.8888888888888888, 0.5555555555555556};
  static const double p4[] = {0.3399810435848563, 0.8611363115940526};
  static const double w4[] = {0.6521451548625461, 0.3478548451374538};
  static const double p5[] = {0.0, 0.5384693101056831, 0.9061798459386640};
  static const double w5[] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};

  std::vector<std::pair<double, double>> ref;
  switch (n) {
    case 1:
      ref = {{0.0, 2.0}};
      break;
    case 2:
      ref = {{-p2[0], 1.0}, {p2[0], 1.0}};
      break;
    case 3:
      ref = {{-p3[1], w3[1]}, {p3[0], w3[0]}, {p3[1], w3[1]}};
      break;
    case 5:
      ref = {{-p5[2], w5[2]}, {-p5[1], w5[1]}, {p5[0], w5[0]}, {p5[1], w5[1]}, {p5[2], w5[2]}};
      break;
    case 4:
    default:
      ref = {{-p4[1], w4[1]}, {-p4[0], w4[0]}, {p4[0], w4[0]}, {p4[1], w4[1]}};
      break;
  }
  pts.clear();
  wts.clear();
  for (auto [x, w] : ref) {
    pts.push_back(0.5 * (x + 1.0));
    wts.push_back(0.5 * w);
  }
}

Mesh1D Mesh1D::uniform(int elements, double a, double b) {
  if (elements < 1 || !(b > a)) throw std::invalid_argument("bad mesh spec");
  Mesh1D m;
  m.nodes.resize(elements + 1);
  for (int i = 0; i <= elements; ++i)
    m.nodes[i] = a + (b - a) * static_cast<double>(i) / elements;
  m.nodes.front() = a;
  m.nodes.back() = b;
  return m;
}

DiscreteFn DiscreteFn::zero(FeSpacePtr s) {
  Vec c = Vec::Zero(s->dim());
  return DiscreteFn(std::move(s), std::move(c));
}

std::vector<double> DiscreteFn::nodal_values() const {
  int n = space->mesh.num_elements();
  std::vector<double> v(n + 1, 0.0);
  if (space->bc == Bc::Dirichlet) {
    for (int i = 1; i < n; ++i) v[i] = coeffs[i - 1];
  } else {
    for (int i = 0; i <= n; ++i) v[i] = coeffs[i];
  }
  return v;
}

double DiscreteFn::max_abs_nodal() const {
  double m = 0.0;
  for (double v : nodal_values()) m = std::max(m, std::fabs(v));
  return m;
}

EnergyModel::EnergyModel(double p, DirichletProblem prob)
    : p_(p), problem_(std::move(prob)) {
  if (p_ < 2.0) throw std::invalid_argument("exponent p must be >= 2");
  const auto& d = std::get<DirichletProblem>(problem_);
  prim_f_ = std::make_shared<Primitive>(d.f);
  rhs_distosc_ = d.f.contains_distosc();
}

EnergyModel::EnergyModel(double p, NeumannProblem prob)
    : p_(p), problem_(std::move(prob)) {
  if (p_ < 2.0) throw std::invalid_argument("exponent p must be >= 2");
  const auto& n = std::get<NeumannProblem>(problem_);
  prim_f_ = std::make_shared<Primitive>(n.f);
  prim_g_ = std::make_shared<Primitive>(n.g);
  rhs_distosc_ = n.f.contains_distosc() || n.g.contains_distosc();
}

void EnergyModel::validate(const FeSpace& space) const {
  if (dirichlet()) {
    if (space.bc != Bc::Dirichlet)
      throw std::invalid_argument("Dirichlet model on non-Dirichlet space");
    return;
  }
  if (space.bc != Bc::Neumann)
    throw std::invalid_argument("Neumann model on non-Neumann space");
  const auto& prob = neumann_problem();
  std::vector<double> pts, wts;
  gauss_rule(space.quad_points, pts, wts);
  for (int e = 0; e < space.mesh.num_elements(); ++e) {
    double xl = space.mesh.nodes[e], xr = space.mesh.nodes[e + 1];
    for (double t : pts) {
      double x = xl + t * (xr - xl);
      if (!(prob.lambda_coef.eval(x, 0.0) > 0.0))
        throw std::invalid_argument("lambda coefficient must be positive");
    }
  }
}

void EnergyModel::check_space(const DiscreteFn& u) const {
  if (!u.space) throw std::invalid_argument("discrete function without space");
  if (u.coeffs.size() != u.space->dim())
    throw std::invalid_argument("coefficient/space size mismatch");
  bool want_dirichlet = dirichlet();
  if ((u.space->bc == Bc::Dirichlet) != want_dirichlet)
    throw std::invalid_argument("boundary condition mismatch");
}

double EnergyModel::rhs_value(double x, double xi) const {
  if (dirichlet()) return dirichlet_problem().f.eval(x, xi);
  const auto& prob = neumann_problem();
  return prob.alpha.eval(x, xi) * prob.f.eval(x, xi) +
         prob.beta.eval(x, xi) * prob.g.eval(x, xi);
}

double EnergyModel::rhs_primitive(double x, double xi) const {
  if (dirichlet()) return (*prim_f_)(x, xi);
  const auto& prob = neumann_problem();
  return prob.alpha.eval(x, xi) * (*prim_f_)(x, xi) +
         prob.beta.eval(x, xi) * (*prim_g_)(x, xi);
}

double EnergyModel::assemble_psi(const DiscreteFn& u) const {
  check_space(u);
  const FeSpace& sp = *u.space;
  auto nodal = u.nodal_values();
  double grad_term = 0.0;
  for (int e = 0; e < sp.mesh.num_elements(); ++e) {
    double h = sp.mesh.nodes[e + 1] - sp.mesh.nodes[e];
    double s = (nodal[e + 1] - nodal[e]) / h;
    grad_term += h * std::pow(std::fabs(s), p_);
  }
  if (dirichlet()) return grad_term;

  const auto& prob = neumann_problem();
  std::vector<double> pts, wts;
  gauss_rule(sp.quad_points, pts, wts);
  double mass_term = 0.0;
  for (int e = 0; e < sp.mesh.num_elements(); ++e) {
    mass_term += integrate_element(
        sp.mesh.nodes[e], sp.mesh.nodes[e + 1], nodal[e], nodal[e + 1], pts,
        wts, false, [&](double x, double uu) {
          return prob.lambda_coef.eval(x, uu) * std::pow(std::fabs(uu), p_);
        });
  }
  return (grad_term + mass_term) / p_;
}

double EnergyModel::assemble_phi(const DiscreteFn& u) const {
  check_space(u);
  const FeSpace& sp = *u.space;
  auto nodal = u.nodal_values();
  std::vector<double> pts, wts;
  gauss_rule(sp.quad_points, pts, wts);
  double acc = 0.0;
  for (int e = 0; e < sp.mesh.num_elements(); ++e) {
    acc += integrate_element(
        sp.mesh.nodes[e], sp.mesh.nodes[e + 1], nodal[e], nodal[e + 1], pts,
        wts, rhs_distosc_,
        [&](double x, double uu) { return rhs_primitive(x, uu); });
  }
  return -acc;
}

Vec EnergyModel::grad_energy(const DiscreteFn& u, double mu) const {
  check_space(u);
  const FeSpace& sp = *u.space;
  auto nodal = u.nodal_values();
  int n = sp.mesh.num_elements();
  std::vector<double> pts, wts;
  gauss_rule(sp.quad_points, pts, wts);

  std::vector<double> g(n + 1, 0.0);  // full nodal gradient
  for (int e = 0; e < n; ++e) {
    double xl = sp.mesh.nodes[e], xr = sp.mesh.nodes[e + 1], h = xr - xl;
    double s = (nodal[e + 1] - nodal[e]) / h;
    double a = spow_val(s, p_);

    // gradient of the |u'|^p part
    double scale = dirichlet() ? mu * p_ : mu;  // Neumann Psi carries 1/p
    g[e] += -scale * a;
    g[e + 1] += scale * a;

    // potential part: -int rhs(x, u) phi_i
    double left = integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                    rhs_distosc_, [&](double x, double uu) {
                                      double t = (x - xl) / h;
                                      return rhs_value(x, uu) * (1.0 - t);
                                    });
    double right = integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                     rhs_distosc_, [&](double x, double uu) {
                                       double t = (x - xl) / h;
                                       return rhs_value(x, uu) * t;
                                     });
    g[e] -= left;
    g[e + 1] -= right;

    if (!dirichlet()) {
      const auto& prob = neumann_problem();
      auto mass = [&](double x, double uu, double phi) {
        return prob.lambda_coef.eval(x, uu) * spow_val(uu, p_) * phi;
      };
      g[e] += mu * integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                     false, [&](double x, double uu) {
                                       return mass(x, uu, 1.0 - (x - xl) / h);
                                     });
      g[e + 1] += mu * integrate_element(xl, xr, nodal[e], nodal[e + 1], pts,
                                         wts, false, [&](double x, double uu) {
                                           return mass(x, uu, (x - xl) / h);
                                         });
    }
  }

  Vec out(u.space->dim());
  if (dirichlet()) {
    for (int i = 1; i < n; ++i) out[i - 1] = g[i];
  } else {
    for (int i = 0; i <= n; ++i) out[i] = g[i];
  }
  return out;
}

double EnergyModel::residual(const DiscreteFn& u, double scale) const {
  check_space(u);
  const FeSpace& sp = *u.space;
  auto nodal = u.nodal_values();
  int n = sp.mesh.num_elements();
  std::vector<double> pts, wts;
  gauss_rule(sp.quad_points, pts, wts);

  std::vector<double> r(n + 1, 0.0);
  for (int e = 0; e < n; ++e) {
    double xl = sp.mesh.nodes[e], xr = sp.mesh.nodes[e + 1], h = xr - xl;
    double s = (nodal[e + 1] - nodal[e]) / h;
    double a = spow_val(s, p_);
    r[e] += -a;
    r[e + 1] += a;

    double left = integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                    rhs_distosc_, [&](double x, double uu) {
                                      double t = (x - xl) / h;
                                      return rhs_value(x, uu) * (1.0 - t);
                                    });
    double right = integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                     rhs_distosc_, [&](double x, double uu) {
                                       double t = (x - xl) / h;
                                       return rhs_value(x, uu) * t;
                                     });
    r[e] -= scale * left;
    r[e + 1] -= scale * right;

    if (!dirichlet()) {
      const auto& prob = neumann_problem();
      auto mass = [&](double x, double uu, double phi) {
        return prob.lambda_coef.eval(x, uu) * spow_val(uu, p_) * phi;
      };
      r[e] += integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                false, [&](double x, double uu) {
                                  return mass(x, uu, 1.0 - (x - xl) / h);
                                });
      r[e + 1] += integrate_element(xl, xr, nodal[e], nodal[e + 1], pts, wts,
                                    false, [&](double x, double uu) {
                                      return mass(x, uu, (x - xl) / h);
                                    });
    }
  }

  double out = 0.0;
  int lo = dirichlet() ? 1 : 0;
  int hi = dirichlet() ? n - 1 : n;
  for (int i = lo; i <= hi; ++i) out = std::max(out, std::fabs(r[i]));
  return out;
}

NormReport norms(const DiscreteFn& u, double p) {
  const FeSpace& sp = *u.space;
  auto nodal = u.nodal_values();
  std::vector<double> pts, wts;
  gauss_rule(sp.quad_points, pts, wts);
  NormReport out;
  double lp_int = 0.0, grad_int = 0.0, max_slope = 0.0;
  for (int e = 0; e < sp.mesh.num_elements(); ++e) {
    double h = sp.mesh.nodes[e + 1] - sp.mesh.nodes[e];
    double s = (nodal[e + 1] - nodal[e]) / h;
    grad_int += h * std::pow(std::fabs(s), p);
    max_slope = std::max(max_slope, std::fabs(s));
    lp_int += integrate_element(
        sp.mesh.nodes[e], sp.mesh.nodes[e + 1], nodal[e], nodal[e + 1], pts,
        wts, false,
        [&](double, double uu) { return std::pow(std::fabs(uu), p); });
  }
  out.lp = std::pow(lp_int, 1.0 / p);
  out.grad_lp = std::pow(grad_int, 1.0 / p);
  out.w1p = std::pow(lp_int + grad_int, 1.0 / p);
  out.c1proxy = u.max_abs_nodal() + max_slope;
  return out;
}

DiscreteFn solve_linear_dirichlet(const FeSpacePtr& space, const Expr& rhs) {
  if (space->bc != Bc::Dirichlet)
    throw std::invalid_argument("linear solve expects a Dirichlet space");
  int n = space->mesh.num_elements();
  int m = n - 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  Vec b = Vec::Zero(m);
  std::vector<double> pts, wts;
  gauss_rule(space->quad_points, pts, wts);
  for (int e = 0; e < n; ++e) {
    double xl = space->mesh.nodes[e], xr = space->mesh.nodes[e + 1], h = xr - xl;
    int li = e - 1, ri = e;  // free indices of the two element nodes
    double k = 1.0 / h;
    if (li >= 0) K(li, li) += k;
    if (ri < m) K(ri, ri) += k;
    if (li >= 0 && ri < m) {
      K(li, ri) -= k;
      K(ri, li) -= k;
    }
    for (std::size_t q = 0; q < pts.size(); ++q) {
      double x = xl + pts[q] * h;
      double t = pts[q];
      double v = rhs.eval(x, 0.0);
      if (li >= 0) b[li] += wts[q] * h * v * (1.0 - t);
      if (ri < m) b[ri] += wts[q] * h * v * t;
    }
  }
  Vec c = K.ldlt().solve(b);
  return DiscreteFn(space, c);
}

std::string discrete_fn_to_csv(const DiscreteFn& u) {
  std::ostringstream os;
  auto nodal = u.nodal_values();
  char buf[80];
  for (std::size_t i = 0; i < nodal.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.space->mesh.nodes[i], nodal[i]);
    os << buf;
  }
  return os.str();
}

DiscreteFn discrete_fn_from_csv(const FeSpacePtr& space, const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("malformed discrete-function CSV row");
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  int n = space->mesh.num_elements();
  if (static_cast<int>(values.size()) != n + 1)
    throw std::invalid_argument("discrete-function CSV row count mismatch");
  Vec c(space->dim());
  if (space->bc == Bc::Dirichlet) {
    for (int i = 1; i < n; ++i) c[i - 1] = values[i];
  } else {
    for (int i = 0; i <= n; ++i) c[i] = values[i];
  }
  return DiscreteFn(space, c);
}

}  // namespace varhunt
