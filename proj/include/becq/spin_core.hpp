#pragma once

#include <array>
#include <string>

#include "becq/types.hpp"

namespace becq {

enum class Axis { I, X, Y, Z };

char axis_char(Axis a);
Axis axis_from_char(char c);

// Describes the enumeration an operator or density matrix acts on.
struct BasisTag {
  std::string label;
  Index dim = 0;

  bool operator==(const BasisTag&) const = default;
};

BasisTag fock_tag(int N);

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(SparseMatrix entries, BasisTag basis, bool hermitian = false);

  Index dim() const { return entries_.rows(); }
  const SparseMatrix& entries() const { return entries_; }
  const BasisTag& basis() const { return basis_; }
  bool hermitian() const { return hermitian_; }
  CMatrix dense() const { return CMatrix(entries_); }

 private:
  SparseMatrix entries_;
  BasisTag basis_;
  bool hermitian_ = false;
};

double hermiticity_defect(const SparseMatrix& m);
double hermiticity_defect(const CMatrix& m);

// alpha = e^{i chi} cos(theta/2), beta = e^{i chi} sin(theta/2) e^{i phi}.
// The amplitudes are stored; the angles are derived in canonical ranges.
class CoherentParams {
 public:
  static CoherentParams from_amplitudes(Complex alpha, Complex beta, int N);
  static CoherentParams from_angles(double theta, double phi, int N, double chi = 0.0);

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  int N() const { return N_; }
  double theta() const;
  double phi() const;
  double chi() const;

 private:
  CoherentParams(Complex a, Complex b, int N) : alpha_(a), beta_(b), N_(N) {}
  Complex alpha_;
  Complex beta_;
  int N_;
};

struct SpinState {
  int N = 0;
  CVector amps;

  double norm() const { return amps.norm(); }
};

SpinState make_fock(int k, int N);
SpinState make_coherent(const CoherentParams& p);
// Wraps a raw amplitude vector; normalizes and rejects zero vectors.
SpinState make_state(CVector amps);

Complex overlap_numeric(const SpinState& s1, const SpinState& s2);
Complex overlap_analytic(const CoherentParams& p1, const CoherentParams& p2);
double fidelity(const SpinState& s1, const SpinState& s2);

OperatorMatrix spin_operator(Axis axis, int N);

// exp(-i t H) for Hermitian H through its eigendecomposition.
CMatrix expm_hermitian(const CMatrix& H, double t);

SpinState rotate(const SpinState& s, const Eigen::Vector3d& n, double angle);

struct Moments {
  Eigen::Vector3d mean;
  double var_z = 0.0;
};

Moments moments(const SpinState& s);
double variance(const SpinState& s, Axis axis);
Complex expectation(const SpinState& s, const SparseMatrix& op);

struct EffectiveCouplingParams {
  double g = 0.0;
  double G = 0.0;
  double Delta = 0.0;
  double deltaE = 0.0;
};

struct EffectiveCouplings {
  double omega1 = 0.0;
  double omega1_hf = 0.0;
  double omega2 = 0.0;
  bool weak_detuning_warning = false;  // |Delta| < 5 g
};

EffectiveCouplings effective_couplings(const EffectiveCouplingParams& p);

// log of the binomial coefficient C(n, k).
double log_binomial(int n, int k);

}  // namespace becq
