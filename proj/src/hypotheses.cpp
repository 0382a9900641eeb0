#include "varhunt/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varhunt {

namespace {

constexpr double kBlowup = 1e6;  // numeric surrogate for +infinity

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> out;
  double decades = std::log10(hi / lo);
  int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)));
  for (int i = 0; i <= n; ++i)
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  return out;
}

std::vector<double> x_mesh(const Expr& e, int points, double lo = 0.0,
                           double hi = 1.0) {
  // nonlinearities independent of x need a single sample point
  bool depends_x = e.print().find('x') != std::string::npos &&
                   [&] {
                     // cheap probe: compare two x values at a few xi
                     for (double xi : {0.3, 1.7, -2.5}) {
                       try {
                         if (e.eval(lo, xi) != e.eval(0.5 * (lo + hi), xi))
                           return true;
                       } catch (const EvalDomainError&) {
                         return true;
                       }
                     }
                     return false;
                   }();
  if (!depends_x) return {0.5 * (lo + hi)};
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(lo + (hi - lo) * (i + 0.5) / points);
  return out;
}

}  // namespace

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Holds:
      return "holds";
    case VerdictStatus::HoldsNumerically:
      return "holds (numerically)";
    case VerdictStatus::Fails:
      return "fails";
    case VerdictStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::optional<int> poly_degree_in_xi(const Expr& e) {
  std::function<std::optional<int>(const ExprPtr&)> deg =
      [&](const ExprPtr& n) -> std::optional<int> {
    if (!n) return std::nullopt;
    if (n->kind == NodeKind::VarXi) return 1;
    Expr sub(n);
    if (!sub.depends_on_xi()) return 0;
    switch (n->kind) {
      case NodeKind::Add:
      case NodeKind::Sub: {
        auto da = deg(n->a), db = deg(n->b);
        if (da && db) return std::max(*da, *db);
        return std::nullopt;
      }
      case NodeKind::Mul: {
        auto da = deg(n->a), db = deg(n->b);
        if (da && db) return *da + *db;
        return std::nullopt;
      }
      case NodeKind::Div: {
        if (Expr(n->b).depends_on_xi()) return std::nullopt;
        return deg(n->a);
      }
      case NodeKind::Neg:
        return deg(n->a);
      case NodeKind::Pow: {
        if (!n->b || n->b->kind != NodeKind::Constant) return std::nullopt;
        double k = n->b->value;
        if (k < 0.0 || k != std::floor(k)) return std::nullopt;
        auto da = deg(n->a);
        if (da) return *da * static_cast<int>(k);
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  };
  return deg(e.root());
}

Verdict check_growth(const Expr& f, double a, double q, int n,
                     const SampleGrid& grid) {
  if (!(a > 0.0) || !(q > 0.0))
    throw std::invalid_argument("growth constants a, q must be positive");
  Verdict out;
  auto degree = poly_degree_in_xi(f);
  out.method = degree ? "symbolic" : "sampled";
  if (n >= 3)
    out.metrics.push_back(
        {"subcritical", q < (static_cast<double>(n) + 2) / (n - 2) ? 1.0 : 0.0});
  else
    out.metrics.push_back({"subcritical", 1.0});  // vacuous for n <= 2

  auto xs = x_mesh(f, grid.x_points);
  double hi = degree && *degree > q ? 1e12 : grid.xi_max;
  for (double xi_abs : log_grid(grid.xi_min, hi, grid.points_per_decade / 8)) {
    for (double sign : {1.0, -1.0}) {
      double xi = sign * xi_abs;
      for (double x : xs) {
        double lhs;
        try {
          lhs = std::fabs(f.eval(x, xi));
        } catch (const EvalDomainError&) {
          continue;
        }
        double rhs = a * (1.0 + std::pow(std::fabs(xi), q));
        if (lhs > rhs * (1.0 + 1e-12)) {
          out.status = VerdictStatus::Fails;
          out.witnesses.push_back({x, xi, lhs, rhs, "|f| exceeds a(1+|xi|^q)"});
          out.detail = "growth bound violated";
          return out;
        }
      }
    }
  }
  if (degree) {
    if (static_cast<double>(*degree) <= q) {
      out.status = VerdictStatus::Holds;
      out.detail = "polynomial degree " + std::to_string(*degree) +
                   " within growth exponent";
    } else {
      // degree rule says the bound must eventually break even though the
      // sampled range did not reach the crossover
      out.status = VerdictStatus::Inconclusive;
      out.detail = "degree exceeds q but no sampled witness in range";
    }
  } else {
    out.status = VerdictStatus::HoldsNumerically;
    out.detail = "no violation on sampled grid";
  }
  return out;
}

Verdict check_ar(const Expr& f, double c, double r, const SampleGrid& grid) {
  if (!(c > 2.0)) throw std::invalid_argument("AR constant c must exceed 2");
  if (r < 0.0) throw std::invalid_argument("AR radius r must be nonnegative");
  Verdict out;
  out.method = poly_degree_in_xi(f) ? "symbolic" : "sampled";
  Primitive F(f);
  auto xs = x_mesh(f, grid.x_points);
  double lo = std::max(r, 1e-3);
  for (double xi_abs : log_grid(lo, grid.xi_max, grid.points_per_decade / 8)) {
    for (double sign : {1.0, -1.0}) {
      double xi = sign * xi_abs;
      for (double x : xs) {
        double Fv, fv;
        try {
          Fv = F(x, xi);
          fv = f.eval(x, xi);
        } catch (const EvalDomainError&) {
          continue;
        }
        double lhs = c * Fv;
        double rhs = xi * fv;
        if (!(lhs > 0.0)) {
          out.status = VerdictStatus::Fails;
          out.witnesses.push_back({x, xi, lhs, 0.0, "c*F not positive"});
          out.detail = "positivity of c*F violated";
          return out;
        }
        if (lhs > rhs + 1e-9 * (1.0 + std::fabs(rhs))) {
          out.status = VerdictStatus::Fails;
          out.witnesses.push_back({x, xi, lhs, rhs, "c*F exceeds xi*f"});
          out.detail = "superlinearity inequality violated";
          return out;
        }
      }
    }
  }
  out.status = VerdictStatus::HoldsNumerically;
  out.detail = "0 < c*F <= xi*f on sampled grid";
  return out;
}

Verdict check_limit_zero(const Expr& f, const SampleGrid& grid) {
  Verdict out;
  out.method = "sampled";
  auto xs = x_mesh(f, grid.x_points);
  std::vector<double> decade_sup;
  double worst_x = 0.0, worst_xi = 0.0, worst_ratio = 0.0;
  for (int d = 1; d <= 8; ++d) {
    double sup = 0.0;
    for (double xi_abs : log_grid(std::pow(10.0, -d), std::pow(10.0, -d + 1), 16)) {
      for (double sign : {1.0, -1.0}) {
        double xi = sign * xi_abs;
        for (double x : xs) {
          double ratio;
          try {
            ratio = std::fabs(f.eval(x, xi) / xi);
          } catch (const EvalDomainError&) {
            continue;
          }
          if (ratio > sup) sup = ratio;
          if (d == 8 && ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_x = x;
            worst_xi = xi;
          }
        }
      }
    }
    decade_sup.push_back(sup);
  }
  out.metrics.push_back({"last_decade_sup", decade_sup.back()});
  if (decade_sup.back() <= 1e-4) {
    out.status = VerdictStatus::HoldsNumerically;
    out.detail = "f/xi decays below 1e-4 toward 0";
    return out;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < decade_sup.size(); ++i)
    if (decade_sup[i] > decade_sup[i - 1] * 1.1) monotone = false;
  if (monotone && decade_sup.back() >= 0.5 * decade_sup.front()) {
    out.status = VerdictStatus::Fails;
    out.witnesses.push_back(
        {worst_x, worst_xi, worst_ratio, 1e-4, "f/xi does not vanish"});
    out.detail = "ratio f/xi stays away from 0";
  } else {
    out.status = VerdictStatus::Inconclusive;
    out.detail = "non-monotone or slowly decaying ratio trend";
  }
  return out;
}

namespace {

Verdict ratio_bounded_check(const Expr& e, double expo, Interval range,
                            int decades, const char* what) {
  // limsup_{xi->0+} sup_x |e| / xi^expo < +infinity
  Verdict out;
  out.method = "sampled";
  auto xs = x_mesh(e, 64, range.lo, range.hi);
  std::vector<double> decade_sup;
  for (int d = 0; d < decades; ++d) {
    double sup = 0.0;
    for (double xi : log_grid(std::pow(10.0, -d - 1), std::pow(10.0, -d), 8)) {
      for (double x : xs) {
        try {
          sup = std::max(sup,
                         std::fabs(e.eval(x, xi)) / std::pow(xi, expo));
        } catch (const EvalDomainError&) {
        }
      }
    }
    decade_sup.push_back(sup);
  }
  double tail = *std::max_element(decade_sup.end() - std::min<std::size_t>(4, decade_sup.size()),
                                  decade_sup.end());
  out.metrics.push_back({"tail_sup", tail});
  if (tail <= kBlowup) {
    out.status = VerdictStatus::HoldsNumerically;
    out.detail = std::string(what) + " ratio bounded on sampled tail";
  } else {
    out.status = VerdictStatus::Fails;
    out.witnesses.push_back({0.0, 0.0, tail, kBlowup, "ratio blow-up"});
    out.detail = std::string(what) + " ratio exceeds blow-up threshold";
  }
  return out;
}

}  // namespace

Thm7Verdict check_thm7(const Expr& f, const Expr& g, double s, double q,
                       Interval D, Interval B, int decades) {
  if (!(s > 1.0)) throw std::invalid_argument("condition (i) needs s > 1");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("condition (ii) needs 0 < q < 1");
  Thm7Verdict out;
  out.cond_i = ratio_bounded_check(f, s, {0.0, 1.0}, decades, "f/xi^s");
  out.cond_ii = ratio_bounded_check(g, q, {0.0, 1.0}, decades, "g/xi^q");

  // (iii): limsup of inf_B F_g/xi^2 = +infinity and liminf of inf_D F_g/xi^2
  // bounded below
  Primitive Fg(g);
  auto xsB = x_mesh(g, 64, B.lo, B.hi);
  auto xsD = x_mesh(g, 64, D.lo, D.hi);
  double running_sup = -std::numeric_limits<double>::infinity();
  double running_inf = std::numeric_limits<double>::infinity();
  for (int d = 0; d < decades; ++d) {
    for (double xi : log_grid(std::pow(10.0, -d - 1), std::pow(10.0, -d), 8)) {
      double infB = std::numeric_limits<double>::infinity();
      double infD = std::numeric_limits<double>::infinity();
      try {
        for (double x : xsB) infB = std::min(infB, Fg(x, xi));
        for (double x : xsD) infD = std::min(infD, Fg(x, xi));
      } catch (const EvalDomainError&) {
        continue;
      }
      running_sup = std::max(running_sup, infB / (xi * xi));
      running_inf = std::min(running_inf, infD / (xi * xi));
    }
  }
  out.cond_iii.method = "sampled";
  out.cond_iii.metrics = {{"running_sup", running_sup},
                          {"running_inf", running_inf}};
  if (running_sup > kBlowup && running_inf > -kBlowup) {
    out.cond_iii.status = VerdictStatus::HoldsNumerically;
    out.cond_iii.detail = "blow-up observed over B, liminf bounded over D";
  } else {
    out.cond_iii.status = VerdictStatus::Fails;
    out.cond_iii.witnesses.push_back(
        {0.0, 0.0, running_sup, kBlowup,
         running_sup <= kBlowup ? "no blow-up of inf_B F_g/xi^2"
                                : "inf_D F_g/xi^2 unbounded below"});
    out.cond_iii.detail = "condition (iii) not supported by the scan";
  }

  // positivity extra: liminf inf_x g/(xi |log xi|^2) > -infinity
  auto xsO = x_mesh(g, 64, 0.0, 1.0);
  double pos_inf = std::numeric_limits<double>::infinity();
  for (int d = 0; d < decades; ++d) {
    for (double xi : log_grid(std::pow(10.0, -d - 1), std::pow(10.0, -d), 8)) {
      double infO = std::numeric_limits<double>::infinity();
      try {
        for (double x : xsO) infO = std::min(infO, g.eval(x, xi));
      } catch (const EvalDomainError&) {
        continue;
      }
      double l = std::log(xi);
      pos_inf = std::min(pos_inf, infO / (xi * l * l));
    }
  }
  out.positivity.method = "sampled";
  out.positivity.metrics = {{"running_inf", pos_inf}};
  if (pos_inf > -kBlowup) {
    out.positivity.status = VerdictStatus::HoldsNumerically;
    out.positivity.detail = "g/(xi |log xi|^2) bounded below";
  } else {
    out.positivity.status = VerdictStatus::Fails;
    out.positivity.witnesses.push_back({0.0, 0.0, pos_inf, -kBlowup, ""});
    out.positivity.detail = "g/(xi |log xi|^2) unbounded below";
  }
  return out;
}

SequencePair sequences_from_exprs(const Expr& a_gen, const Expr& b_gen,
                                  int horizon, bool to_zero) {
  SequencePair out;
  out.to_zero = to_zero;
  for (int k = 1; k <= horizon; ++k) {
    double kk = static_cast<double>(k);
    out.a.push_back(a_gen.eval(0.0, kk));
    out.b.push_back(b_gen.eval(0.0, kk));
  }
  return out;
}

OscVerdict check_osc(const Expr& f, const SequencePair& seqs, double p,
                     int horizon) {
  OscVerdict out;
  Primitive F(f);
  int K = std::min<int>(horizon, static_cast<int>(seqs.a.size()));

  out.seq_valid.method = "sampled";
  out.seq_valid.status = VerdictStatus::Holds;
  for (int k = 0; k < K; ++k) {
    if (!(seqs.a[k] > 0.0 && seqs.a[k] < seqs.b[k])) {
      out.seq_valid.status = VerdictStatus::Fails;
      out.seq_valid.witnesses.push_back(
          {0.0, seqs.a[k], seqs.a[k], seqs.b[k], "a_k < b_k violated"});
      break;
    }
  }

  out.ratio_zero.method = "sampled";
  if (K >= 2) {
    double first = seqs.a.front() / seqs.b.front();
    double last = seqs.a[K - 1] / seqs.b[K - 1];
    out.ratio_zero.metrics = {{"first_ratio", first}, {"last_ratio", last}};
    bool decreasing = true;
    for (int k = 1; k < K; ++k)
      if (seqs.a[k] / seqs.b[k] > seqs.a[k - 1] / seqs.b[k - 1] * (1.0 + 1e-12))
        decreasing = false;
    if (decreasing && last < 0.5)
      out.ratio_zero.status = VerdictStatus::HoldsNumerically;
    else if (!decreasing || last >= first * (1.0 - 1e-12))
      out.ratio_zero.status = VerdictStatus::Fails;
    else
      out.ratio_zero.status = VerdictStatus::Inconclusive;
  }

  out.sup_cond.method = "sampled";
  out.sup_cond.status = VerdictStatus::HoldsNumerically;
  const int dense = 512;
  for (int k = 0; k < K && out.sup_cond.status != VerdictStatus::Fails; ++k) {
    double a = seqs.a[k], b = seqs.b[k];
    double Fa = F(0.0, a), Fma = F(0.0, -a);
    for (int i = 1; i <= dense; ++i) {
      double xi = a + (b - a) * i / dense;
      double v = F(0.0, xi) - Fa;  // int_a^xi f
      if (v > 1e-9 * (1.0 + std::fabs(Fa))) {
        out.sup_cond.status = VerdictStatus::Fails;
        out.sup_cond.witnesses.push_back(
            {0.0, xi, v, 0.0, "int_{a_k}^{xi} f positive"});
        break;
      }
      double xim = -a - (b - a) * i / dense;
      double vm = F(0.0, xim) - Fma;  // int_{-a}^{xi} f, xi < -a
      if (vm > 1e-9 * (1.0 + std::fabs(Fma))) {
        out.sup_cond.status = VerdictStatus::Fails;
        out.sup_cond.witnesses.push_back(
            {0.0, xim, vm, 0.0, "int_{-a_k}^{xi} f positive"});
        break;
      }
    }
  }

  // growth: limsup F(xi)/|xi|^p = +infinity at the relevant end
  out.growth.method = "sampled";
  double running = -std::numeric_limits<double>::infinity();
  std::vector<double> probes;
  if (seqs.to_zero)
    probes = log_grid(1e-15, 1.0, 16);
  else
    probes = log_grid(1.0, 1e15, 16);
  if (f.contains_distosc() && !seqs.to_zero) {
    for (const DistBand& band : distosc_bands()) {
      if (band.hi > 1e15) break;
      probes.push_back(0.5 * (band.lo + band.hi));
      probes.push_back(band.hi);
    }
  }
  for (double xi : probes) {
    for (double sign : {1.0, -1.0}) {
      double v = F(0.0, sign * xi) / std::pow(xi, p);
      running = std::max(running, v);
    }
  }
  out.growth.metrics = {{"running_sup", running}};
  if (running > kBlowup) {
    out.growth.status = VerdictStatus::HoldsNumerically;
    out.growth.detail = "F/|xi|^p blow-up observed";
  } else {
    out.growth.status = VerdictStatus::Fails;
    out.growth.witnesses.push_back({0.0, 0.0, running, kBlowup, ""});
    out.growth.detail = "no blow-up of F/|xi|^p on the probe set";
  }
  return out;
}

GSideVerdict check_g_side(const Expr& g, double p, bool to_zero) {
  GSideVerdict out;
  Primitive G(g);
  out.sup_cond.method = "sampled";
  out.sup_cond.status = VerdictStatus::HoldsNumerically;
  for (double xi_abs : log_grid(1e-8, 1e6, 32)) {
    for (double sign : {1.0, -1.0}) {
      double xi = sign * xi_abs;
      double v = G(0.0, xi);
      if (v > 1e-9 * (1.0 + std::fabs(xi))) {
        out.sup_cond.status = VerdictStatus::Fails;
        out.sup_cond.witnesses.push_back({0.0, xi, v, 0.0, "primitive positive"});
        out.sup_cond.detail = "sup int_0^xi g > 0";
        break;
      }
    }
    if (out.sup_cond.status == VerdictStatus::Fails) break;
  }

  out.liminf_cond.method = "sampled";
  double inf = std::numeric_limits<double>::infinity();
  auto tail = to_zero ? log_grid(1e-12, 1e-2, 16) : log_grid(1e2, 1e12, 16);
  for (double xi_abs : tail) {
    for (double sign : {1.0, -1.0}) {
      double v = G(0.0, sign * xi_abs) / std::pow(xi_abs, p);
      inf = std::min(inf, v);
    }
  }
  out.liminf_cond.metrics = {{"running_inf", inf}};
  if (inf > -kBlowup) {
    out.liminf_cond.status = VerdictStatus::HoldsNumerically;
    out.liminf_cond.detail = "primitive ratio bounded below";
  } else {
    out.liminf_cond.status = VerdictStatus::Fails;
    out.liminf_cond.witnesses.push_back({0.0, 0.0, inf, -kBlowup, ""});
    out.liminf_cond.detail = "primitive ratio unbounded below";
  }
  return out;
}

SequencePair suggest_sequences(const Expr& f, double p, bool to_zero,
                               int horizon, std::string* diagnostic) {
  (void)p;
  SequencePair out;
  out.to_zero = to_zero;
  Primitive F(f);

  std::vector<double> grid = to_zero ? log_grid(1e-12, 1.0, 64)
                                     : log_grid(1e-2, 1e15, 64);
  if (f.contains_distosc() && !to_zero) {
    for (const DistBand& band : distosc_bands()) {
      if (band.hi > 1e15) break;
      for (double c : {band.lo, 0.5 * (band.lo + band.hi), band.hi})
        grid.push_back(c);
    }
    std::sort(grid.begin(), grid.end());
  }
  if (to_zero) std::reverse(grid.begin(), grid.end());  // walk toward 0

  std::vector<double> Fs(grid.size());
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Fs[i] = F(0.0, grid[i]);
    fmin = std::min(fmin, Fs[i]);
    fmax = std::max(fmax, Fs[i]);
  }

  if (fmax - fmin <= 1e-12 * (1.0 + std::fabs(fmax))) {
    // F constant: every interval qualifies; per-decade defaults
    for (int d = 0; d < horizon; ++d) {
      double scale = to_zero ? std::pow(10.0, -d - 1) : std::pow(10.0, d);
      out.a.push_back(2.0 * scale);
      out.b.push_back(8.0 * scale);
    }
    if (to_zero) {
      std::reverse(out.a.begin(), out.a.end());
      std::reverse(out.b.begin(), out.b.end());
    }
    if (diagnostic) *diagnostic = "flat primitive: per-decade defaults emitted";
    return out;
  }

  // dead zones anchored at running maxima of F along the walk
  struct Zone {
    double a, b;
  };
  std::vector<Zone> zones;
  std::size_t i = 0;
  while (i + 1 < grid.size()) {
    if (Fs[i + 1] <= Fs[i]) {
      double anchor = grid[i], level = Fs[i];
      std::size_t j = i + 1;
      while (j < grid.size() &&
             Fs[j] <= level + 1e-12 * (1.0 + std::fabs(level)))
        ++j;
      double end = grid[j - 1];
      double lo = std::min(anchor, end), hi = std::max(anchor, end);
      if (hi > lo * 1.2) zones.push_back({lo, hi});
      i = j;
    } else {
      ++i;
    }
  }

  if (zones.empty()) {
    if (diagnostic) *diagnostic = "no dead zones found: primitive increasing";
    return out;
  }

  // widest zone (by span ratio) per decade of the zone start
  std::sort(zones.begin(), zones.end(),
            [](const Zone& l, const Zone& r) { return l.a < r.a; });
  std::vector<Zone> picked;
  for (const Zone& z : zones) {
    int dec = static_cast<int>(std::floor(std::log10(z.a)));
    bool replaced = false;
    for (Zone& q : picked) {
      if (static_cast<int>(std::floor(std::log10(q.a))) == dec) {
        if (z.b / z.a > q.b / q.a) q = z;
        replaced = true;
        break;
      }
    }
    if (!replaced) picked.push_back(z);
  }
  for (const Zone& z : picked) {
    if (static_cast<int>(out.a.size()) >= horizon) break;
    out.a.push_back(z.a);
    out.b.push_back(z.b);
  }
  return out;
}

}  // namespace varhunt
