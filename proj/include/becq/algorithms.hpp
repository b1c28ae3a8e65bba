#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "becq/multi_bec.hpp"

namespace becq {

struct SpinFactor {
  int site = 0;  // 0-based
  Axis axis = Axis::I;

  bool operator==(const SpinFactor&) const = default;
};

// coeff * prod_n S_n^{axis_n}; identity factors may be omitted.
struct SpinProductTerm {
  double coeff = 0.0;
  std::vector<SpinFactor> factors;

  // Number of non-identity factors.
  int order() const;
  void validate(int site_count) const;
};

struct GateStep {
  std::vector<SpinProductTerm> hamiltonian;
  double time = 0.0;
};

using Schedule = std::vector<GateStep>;

enum class OracleId { const00, const11, bal01, bal10 };

struct DeutschOracle {
  OracleId id = OracleId::const00;
  int N = 1;
};

enum class Classification { constant, balanced };

struct DeutschResult {
  Classification classification = Classification::constant;
  double readout = 0.0;
};

std::string oracle_name(OracleId id);
OracleId oracle_from_name(const std::string& name);

// sigma_n -> N S_n, sigma_n sigma_m -> S_n S_m, constants -> N^2 * const,
// times t -> t/N.
Schedule map_qubit_schedule(const Schedule& qubit_steps, int N);

BecRegister run_schedule(const BecRegister& reg, const Schedule& steps);

std::vector<SpinProductTerm> deutsch_hamiltonian(const DeutschOracle& o);
// Evolution time of the oracle Hamiltonian, pi/(2N).
double deutsch_time(int N);
DeutschResult run_deutsch(const DeutschOracle& o);

// Entangling time quoted for teleportation, Omega t = 1/sqrt(2N).
double teleportation_entangling_time(int N);

// Line-oriented schedule text:
//   # comment
//   sites <N_1> <N_2> ...            (optional)
//   init <site> <re a> <im a> <re b> <im b>   (optional coherent-state start)
//   term <coeff> <site>:<axis> ... [term <coeff> ...] ; <time>
// Sites in the text are 1-based, axes are one of i x y z.
struct ScheduleFile {
  std::vector<int> site_N;
  std::vector<std::pair<int, std::pair<Complex, Complex>>> inits;
  Schedule steps;
};

ScheduleFile parse_schedule(std::istream& in);
std::string format_schedule(const Schedule& steps);

}  // namespace becq
