#pragma once

#include <vector>

#include "becq/spin_core.hpp"

namespace becq {

inline constexpr Index kRegisterCapacity = 10'000'000;

// Joint pure state of M sites. Row-major site order: site 0 is the slowest
// index, so amplitude index = sum_n k_n * stride_n with stride_{M-1} = 1.
class BecRegister {
 public:
  BecRegister(std::vector<int> site_N, CVector amps);

  int sites() const { return static_cast<int>(site_N_.size()); }
  const std::vector<int>& site_N() const { return site_N_; }
  int site_dim(int site) const { return site_N_.at(site) + 1; }
  Index dim() const { return amps_.size(); }
  Index stride(int site) const;
  const CVector& amps() const { return amps_; }
  CVector& mutable_amps() { return amps_; }

  std::vector<int> occupation(Index idx) const;
  Index index_of(const std::vector<int>& ks) const;
  BasisTag basis() const;

  void check_site(int site) const;

 private:
  std::vector<int> site_N_;
  CVector amps_;
};

Index register_dim(const std::vector<int>& site_N);

struct DensityMatrix {
  CMatrix entries;
  BasisTag basis;

  Index dim() const { return entries.rows(); }
  // Throws NumericalIntegrityError when trace, Hermiticity or positivity fail.
  void validate(double tol = 1e-10, double neg_tol = 1e-8) const;
};

DensityMatrix pure_density(const CVector& psi, BasisTag basis);

struct EntropyResult {
  double E = 0.0;
  double E_max = 0.0;
};

BecRegister tensor(const std::vector<SpinState>& states);

BecRegister apply_zz(const BecRegister& reg, int site_i, int site_j, double omega_t);

// Applies a single-site matrix U (dim N_site+1) to one site of the register.
void apply_site_matrix(CVector& amps, const std::vector<int>& site_N, int site, const CMatrix& U);

enum class Expansion { OverSite2, OverSite1 };

BecRegister entangled_state_analytic(int N1, int N2, double omega_t, Expansion e = Expansion::OverSite2);

DensityMatrix partial_trace(const BecRegister& reg, int keep_site);

EntropyResult entropy(const DensityMatrix& rho);

// Singular values squared of the (site, rest) reshaping; oracle for partial_trace.
RVector schmidt_weights(const BecRegister& reg, int site);

double fidelity(const BecRegister& a, const BecRegister& b);

// Two-branch cat decomposition of the zz evolution at omega_t = pi/4, valid
// for every N. Site-1 branches are parity projections of the coherent state
// |i^N/sqrt2, 1/sqrt2>>, which reduce to |1/sqrt2, +-1/sqrt2>> for N % 4 == 0.
BecRegister cat_display_state(int N);
// Same display with the site-1 branches written as |1/sqrt2, +-1/sqrt2>>
// for every N, i.e. without the i^N factor.
BecRegister cat_display_state_uncorrected(int N);
double cat_decomposition_check(int N);

double number_fluctuation_error(int N, int dN);

}  // namespace becq
