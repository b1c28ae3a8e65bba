#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "becq/basis.hpp"
#include "becq/multi_bec.hpp"
#include "becq/rk.hpp"

namespace becq {

struct Jump {
  OperatorMatrix op;
  double rate = 0.0;
  std::string name;
};

struct Observable {
  std::string name;
  SparseMatrix op;  // reported as Re Tr(op rho) * scale
  double scale = 1.0;
};

// d rho/dt = -i[H, rho] + sum_j rate_j (L rho L^dag - {L^dag L, rho}/2).
// This equals the -(rate/2)[L^dag L rho - 2 L rho L^dag + rho L^dag L] form.
struct LindbladModel {
  OperatorMatrix hamiltonian;
  std::vector<Jump> jumps;
  std::vector<Observable> observables;

  Index dim() const { return hamiltonian.dim(); }
  const BasisTag& basis() const { return hamiltonian.basis(); }
  void validate() const;
  const Observable& observable(const std::string& name) const;
};

inline constexpr Index kDensityCapacity = 2500;

// Block propagators keyed by their generator. A generator equal to the complex
// conjugate of a stored one reuses the conjugated propagator, which covers the
// time-reversed run of a model with real matrix elements.
class PropagatorCache {
 public:
  const CMatrix* find(const CMatrix& gen, bool& conjugated) const;
  const CMatrix& insert(CMatrix gen, CMatrix prop);

 private:
  static std::size_t hash(const CMatrix& m, bool conj);
  std::multimap<std::size_t, std::pair<CMatrix, CMatrix>> entries_;
};

struct IntegrateOptions {
  double tol = 1e-8;
  RkMethod method = RkMethod::dop853;
  double t0 = 0.0;
  Index capacity = kDensityCapacity;
  Index eig_check_max_dim = 256;
  int eig_checks = 16;        // spread evenly over the samples
  bool allow_fast_path = true;
  // Optional conserved label per basis state. When every Hamiltonian and jump
  // entry connects states with equal labels, density-matrix blocks between
  // label sectors evolve independently, and only the blocks reached by the
  // trace and the observables are integrated. The final state then holds
  // those blocks only.
  std::vector<int> sectors;
  // With sectors: propagate each block by the exact exponential of its
  // Liouvillian over one sample interval instead of adaptive Runge-Kutta.
  // Requires a time-independent model; tol is then unused.
  bool exact_blocks = false;
  std::shared_ptr<PropagatorCache> cache;  // optional, shared between runs
};

struct SampleDiagnostics {
  double trace_dev = 0.0;
  double herm_defect = 0.0;
  double min_eig = 0.0;  // NaN when not computed
};

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // values[obs][sample]
  std::vector<SampleDiagnostics> diagnostics;
  bool failed = false;
  bool fast_path = false;
  bool partial_state = false;  // final_state holds only the integrated sector blocks
  RkStats stats;
  DensityMatrix final_state;

  const std::vector<double>& series(const std::string& name) const;
  double max_trace_dev() const;
  double max_herm_defect() const;
  double min_eigenvalue() const;  // over computed samples, +inf if none
};

// Sample grid: `samples` points evenly spaced over [t0, t0 + t_end].
EvolutionRecord integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t_end, int samples,
                                 double tol);
EvolutionRecord integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t_end, int samples,
                                 const IntegrateOptions& opt);

// Same dynamics written as an explicit superoperator on vec(rho) (column
// stacking); used as an oracle for small dimensions.
CMatrix liouvillian(const LindbladModel& model);

void write_csv(std::ostream& os, const EvolutionRecord& rec);

// Returns the model with every Hamiltonian entry negated (time reversal of the
// coherent part; dissipation unchanged).
LindbladModel reversed_hamiltonian(const LindbladModel& model);

}  // namespace becq
