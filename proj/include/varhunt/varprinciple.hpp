#pragma once

#include <cstdint>
#include <vector>

#include "varhunt/energy_pair.hpp"

namespace varhunt {

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

std::vector<double> geometric_grid(const GridSpec& spec);

struct PhiCurvePoint {
  double rho = 0.0;
  double phi_hat = 0.0;   // quotient estimate
  double m_hat = 0.0;     // estimated inf of Phi over {Psi <= rho}
  Vec certificate_x;      // quotient arg-min found
  Vec certificate_infx;   // Phi arg-min found
  int restarts = 0;
  bool converged = true;  // false when some descent hit its iteration cap
};

// inf of Phi over {Psi <= rho} by multistart projected descent.
std::pair<double, Vec> inf_phi_on_sublevel(const EnergyPair& pair, double rho,
                                           int budget, std::uint64_t seed);

// The quotient (Phi(x) - m_hat) / (rho - Psi(x)), clamped at 0; used both to
// compute phi_hat and to re-verify certificates.
double quotient_at(const EnergyPair& pair, const Vec& x, double rho,
                   double m_hat);

PhiCurvePoint phi_of_rho(const EnergyPair& pair, double rho, int budget,
                         std::uint64_t seed);

struct ThresholdReport {
  GridSpec grid;
  int window = 3;
  std::vector<PhiCurvePoint> samples;
  std::vector<double> head_envelope;  // running min of phi_hat from the head
  double gamma_hat = 0.0;   // min of phi_hat over the last `window` points
  double delta_hat = 0.0;   // min of phi_hat over the first `window` points
  double lambda_star_hat = 0.0;  // min of phi_hat over the whole grid
};

ThresholdReport thresholds(const EnergyPair& pair, const GridSpec& grid,
                           int window, int budget, std::uint64_t seed);

double lambda_star(const EnergyPair& pair, const GridSpec& grid, int budget,
                   std::uint64_t seed);

}  // namespace varhunt
