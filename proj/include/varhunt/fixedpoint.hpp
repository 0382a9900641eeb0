#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "varhunt/optimize.hpp"

namespace varhunt {

// Potential operator A = P' on R^m.
struct PotentialSpec {
  int dim = 1;
  std::function<double(const Vec&)> P;
  std::function<Vec(const Vec&)> A;

  static PotentialSpec from_potential(int dim,
                                      std::function<double(const Vec&)> P);
};

// Smoothed radial plateau profile: a(r) = r^2 on the growth octaves and
// constant on the plateau octaves, with C^1 corner blends of half-width w.
struct PlateauProfile {
  double smoothing = 0.01;
  double value(double r) const;
  double derivative(double r) const;
};

PotentialSpec make_radial_potential(int dim, PlateauProfile profile);

// Ball quotient phi(rho) = inf_{||x||^2 < rho}
//   (sup_{||y||^2 <= rho} P(y) - P(x)) / (rho - ||x||^2).
double fp_phi(const PotentialSpec& spec, double rho, int budget,
              std::uint64_t seed);

struct FpReport {
  double rho = 0.0;
  double phi_hat = 0.0;
  bool below_half = false;
  bool found = false;
  Vec x;
  double fp_residual = -1.0;  // ||A(x) - x||
  bool norm_ok = false;       // ||x||^2 < rho
};

FpReport find_fixed_point(const PotentialSpec& spec, double rho, int budget,
                          std::uint64_t seed);

struct ScanRow {
  double r = 0.0;
  double sup_estimate = 0.0;
  double ratio = 0.0;  // sup_estimate / r^2
};

struct ScanReport {
  std::vector<ScanRow> rows;
  bool straddles = false;  // tail ratios fall below 1/2 - margin and above
                           // 1/2 + margin
  double margin = 0.02;
};

ScanReport thm5_scan(const PotentialSpec& spec, const std::vector<double>& radii,
                     int samples, std::uint64_t seed = 2);

}  // namespace varhunt
