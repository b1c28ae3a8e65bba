#pragma once

#include <vector>

#include "becq/algorithms.hpp"
#include "becq/basis.hpp"
#include "becq/lindblad.hpp"

namespace becq {

// Product Fock space of M sites (site 0 slowest), matching BecRegister.
SparseMatrix spin_product_operator(const std::vector<int>& site_N, const std::vector<SpinFactor>& factors);

// Collective dephasing: jump S^axis_n on every site at rate Gamma, H = 0.
// Observables "S<a><n>/N" for a in {x,y,z} and 1-based site n.
LindbladModel build_dephasing_model(const std::vector<int>& site_N, Axis axis, double Gamma);
LindbladModel build_dephasing_model(int M, int N, Axis axis, double Gamma);

// Particle loss: each site spans all (n_a, n_b) with n_a + n_b <= N_max;
// jumps a_n and b_n at rate Gamma_l. Same observable names as above,
// normalized by N_max.
LindbladModel build_loss_model(int M, int N_max, double Gamma_l);
SparseMatrix loss_spin_product(int M, int N_max, const std::vector<SpinFactor>& factors);
// Places per-site states of N_max bosons into the loss-model space.
DensityMatrix loss_initial_state(int M, int N_max, const std::vector<SpinState>& sites);

// Lambda scheme on modes (a, b, c) with N bosons. Observables "Sz/N",
// "Sx/N" and "nc".
LindbladModel build_lambda_model(int N, double g, double Delta, double Gamma_s);
MultiModeBasis lambda_basis(int N);
DensityMatrix lambda_initial_state(int N);  // all bosons in a

// Two three-level BECs (a, b, c) coupled through one cavity mode p.
// Mode order: a1 b1 c1 a2 b2 c2 p.
struct CavityModel {
  int N = 1;
  double omega0 = 20.0;  // b-c splitting in the frame where the laser is static
  double omega = 10.0;   // cavity mode frequency in the same frame
  double G = 1.0;
  double Gamma_c = 1.0;
  int n_ph_max = 2;
  int n_exc_max = 2;  // cap on n_c1 + n_c2
  // The (omega0/2) a^dag a part of (omega0/2) F^z commutes with everything;
  // by default it is removed (a frame co-rotating with mode a).
  bool keep_spectator_term = false;

  double detuning() const { return omega0 - omega; }
  void validate() const;
};

namespace cavity_mode {
inline constexpr int a1 = 0, b1 = 1, c1 = 2, a2 = 3, b2 = 4, c2 = 5, p = 6;
}

MultiModeBasis cavity_basis(const CavityModel& params);
// Observables: "Sx1/N", "Sy1/N", "Sz1/N", "Sz2/N", "npho", "FF"
// (= (F+_1 + F+_2)(F-_1 + F-_2) with F- = b^dag c) and "nc".
LindbladModel build_cavity_model(const CavityModel& params, double g_laser);
// Conserved label (n_a1, n_a2) per basis state, for sector-restricted integration.
std::vector<int> cavity_sectors(const CavityModel& params);
DensityMatrix cavity_initial_state(const CavityModel& params, const SpinState& s1, const SpinState& s2);

// Realized S^z_1 S^z_2 coefficient of the bus after eliminating c and p:
// -G^2 g^2 / (2 omega0^2 omega).
double cavity_zz_coupling(const CavityModel& params, double g_laser);
// Effective far-detuned Hamiltonian on the two-BEC product Fock space:
// -(G^2 g^2/(omega0^2 omega)) (n_b1 + n_b2)^2 (single-site linear shifts omitted).
CMatrix cavity_effective_hamiltonian(const CavityModel& params, double g_laser);

// Reduced density matrix of BEC 1 over its (a1, b1, c1) occupations, with
// rows ordered by the three-mode basis of N bosons.
CMatrix cavity_reduce_bec1(const CavityModel& params, const CMatrix& rho);

}  // namespace becq
