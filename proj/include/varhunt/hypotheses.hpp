#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varhunt/expr.hpp"

namespace varhunt {

enum class VerdictStatus { Holds, HoldsNumerically, Fails, Inconclusive };

std::string to_string(VerdictStatus s);

struct Witness {
  double x = 0.0;
  double xi = 0.0;
  double lhs = 0.0;  // violating quantity
  double rhs = 0.0;  // bound it violates
  std::string note;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::string method;  // "symbolic" or "sampled"
  std::vector<Witness> witnesses;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;

  bool ok() const {
    return status == VerdictStatus::Holds ||
           status == VerdictStatus::HoldsNumerically;
  }
};

struct SampleGrid {
  double xi_min = 1e-3, xi_max = 1e6;
  int points_per_decade = 512;
  int x_points = 64;  // mesh on [0, 1] for x-dependent nonlinearities
};

// Polynomial degree in xi when the expression is a polynomial with xi-free
// coefficients.
std::optional<int> poly_degree_in_xi(const Expr& e);

// |f(x, xi)| <= a (1 + |xi|^q); the subcriticality bound q < (n+2)/(n-2)
// applies only for n >= 3 and is reported in `metrics`.
Verdict check_growth(const Expr& f, double a, double q, int n,
                     const SampleGrid& grid = {});

// 0 < c F(x, xi) <= xi f(x, xi) for |xi| >= r, with c > 2.
Verdict check_ar(const Expr& f, double c, double r, const SampleGrid& grid = {});

// f(x, xi)/xi -> 0 uniformly in x as xi -> 0.
Verdict check_limit_zero(const Expr& f, const SampleGrid& grid = {});

struct Interval {
  double lo = 0.0, hi = 1.0;
};

struct Thm7Verdict {
  Verdict cond_i, cond_ii, cond_iii, positivity;
};

Thm7Verdict check_thm7(const Expr& f, const Expr& g, double s, double q,
                       Interval D, Interval B, int decades = 16);

struct SequencePair {
  std::vector<double> a, b;  // a[k] < b[k]
  bool to_zero = false;      // b -> 0 instead of b -> infinity
};

SequencePair sequences_from_exprs(const Expr& a_gen, const Expr& b_gen,
                                  int horizon, bool to_zero);

struct OscVerdict {
  Verdict seq_valid;   // a_k < b_k for all generated k
  Verdict ratio_zero;  // a_k / b_k -> 0 trend
  Verdict sup_cond;    // both sup-integral conditions
  Verdict growth;      // limsup F / |xi|^p = +infinity
};

OscVerdict check_osc(const Expr& f, const SequencePair& seqs, double p,
                     int horizon);

// sup_xi int_0^xi g <= 0 and liminf of the primitive ratio bounded below.
struct GSideVerdict {
  Verdict sup_cond;
  Verdict liminf_cond;
};
GSideVerdict check_g_side(const Expr& g, double p, bool to_zero);

// Scans F for maximal dead zones (intervals where int_a^xi f <= 0 throughout)
// and emits candidate (a_k, b_k) sequences.
SequencePair suggest_sequences(const Expr& f, double p, bool to_zero,
                               int horizon, std::string* diagnostic = nullptr);

}  // namespace varhunt
