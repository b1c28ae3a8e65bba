#pragma once

#include <vector>

#include "becq/types.hpp"

namespace becq {

// Rates in s^-1, two-body constants in cm^3 s^-1, three-body in cm^6 s^-1,
// density in cm^-3.
struct AtomLossParams {
  double Gamma_l = 0.1;
  double K_b = 1.194e-13;
  double K_ab = 0.780e-13;
  double L_a = 5.8e-30;
  double density = 1e12;
  double Na0 = 5e4;
  double Nb0 = 5e4;

  void validate() const;
  double n_a0() const { return density * Na0 / (Na0 + Nb0); }
  double n_b0() const { return density * Nb0 / (Na0 + Nb0); }
};

struct PopulationSeries {
  std::vector<double> t;
  std::vector<double> Na;
  std::vector<double> Nb;
};

// Densities follow the populations at fixed volume: n_x(t) = n_x(0) N_x(t)/N_x(0).
PopulationSeries integrate_loss_odes(const AtomLossParams& p, double t_end, int samples);

// Infinite lifetimes (vanishing rates) are reported as +infinity.
struct LifetimeReport {
  double tau_background = 0.0;
  double tau_two_body = 0.0;
  double tau_three_body = 0.0;
  double rate_a = 0.0;  // initial per-atom loss rate of state a
  double rate_b = 0.0;  // initial per-atom loss rate of state b
};

LifetimeReport lifetime_report(const AtomLossParams& p);

}  // namespace becq
