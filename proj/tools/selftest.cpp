#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "becq/algorithms.hpp"
#include "becq/experiments.hpp"
#include "becq/physical_rates.hpp"

namespace becq::cli {

namespace {

struct Check {
  const char* name;
  double tol;
  std::function<double()> defect;  // compared against tol
};

double spin_algebra() {
  double worst = 0.0;
  for (int N = 1; N <= 12; ++N) {
    CMatrix x = spin_operator(Axis::X, N).dense(), y = spin_operator(Axis::Y, N).dense(),
            z = spin_operator(Axis::Z, N).dense();
    const Complex two_i(0.0, 2.0);
    worst = std::max(worst, (x * y - y * x - two_i * z).cwiseAbs().maxCoeff());
    worst = std::max(worst, (y * z - z * y - two_i * x).cwiseAbs().maxCoeff());
    worst = std::max(worst, (z * x - x * z - two_i * y).cwiseAbs().maxCoeff());
    CMatrix cas = x * x + y * y + z * z - double(N) * (N + 2) * CMatrix::Identity(N + 1, N + 1);
    worst = std::max(worst, cas.cwiseAbs().maxCoeff());
  }
  return worst;
}

double overlaps() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 30);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int N = n(rng);
    auto p1 = CoherentParams::from_angles(kPi * u(rng), 2 * kPi * u(rng), N, 2 * kPi * u(rng));
    auto p2 = CoherentParams::from_angles(kPi * u(rng), 2 * kPi * u(rng), N, 2 * kPi * u(rng));
    worst = std::max(worst, std::abs(overlap_analytic(p1, p2) -
                                     overlap_numeric(make_coherent(p1), make_coherent(p2))));
  }
  return worst;
}

double entangler() {
  double worst = 0.0;
  const double r = 1.0 / std::sqrt(2.0);
  for (auto [n1, n2] : {std::pair{1, 1}, {2, 2}, {3, 5}, {6, 6}}) {
    BecRegister start = tensor({make_coherent(CoherentParams::from_amplitudes(r, r, n1)),
                                make_coherent(CoherentParams::from_amplitudes(r, r, n2))});
    for (double wt : {0.1, 0.37, kPi / 4})
      worst = std::max(worst, 1.0 - fidelity(apply_zz(start, 0, 1, wt), entangled_state_analytic(n1, n2, wt)));
  }
  return worst;
}

double schmidt() {
  const double r = 1.0 / std::sqrt(2.0);
  SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, 5));
  BecRegister reg = apply_zz(tensor({x, x}), 0, 1, 0.3);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(partial_trace(reg, 0).entries);
  RVector a = es.eigenvalues(), b = schmidt_weights(reg, 0);
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return (a - b).cwiseAbs().maxCoeff();
}

double deutsch() {
  double worst = 0.0;
  for (int N : {1, 2, 5})
    for (OracleId id : {OracleId::const00, OracleId::const11, OracleId::bal01, OracleId::bal10}) {
      DeutschResult r = run_deutsch({id, N});
      const bool constant = id == OracleId::const00 || id == OracleId::const11;
      if ((r.classification == Classification::constant) != constant) return 1.0;
      worst = std::max(worst, 1.0 - std::abs(r.readout));
    }
  return worst;
}

double dephasing_rate() {
  const double Gamma = 0.1;
  LindbladModel m = build_dephasing_model(1, 2, Axis::Z, Gamma);
  const double r = 1.0 / std::sqrt(2.0);
  SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, 2));
  EvolutionRecord rec = integrate_master(m, pure_density(x.amps, m.basis()), 20.0, 101, 1e-10);
  return std::abs(fit_decay(rec, "Sx1/N").rate / (2 * Gamma) - 1.0);
}

double liouvillian_oracle() {
  LindbladModel m = build_lambda_model(1, 1.0, 3.0, 0.5);
  DensityMatrix rho0 = lambda_initial_state(1);
  const double t = 4.0;
  EvolutionRecord rec = integrate_master(m, rho0, t, 2, 1e-10);
  CMatrix L = liouvillian(m);
  Eigen::Map<const CVector> v0(rho0.entries.data(), rho0.entries.size());
  CVector v = (L * t).exp() * v0;
  Eigen::Map<const CMatrix> rho(v.data(), rho0.dim(), rho0.dim());
  return (rho - rec.final_state.entries).cwiseAbs().maxCoeff();
}

double cptp_run() {
  EvolutionRecord r = run_fig4a(2, 0.01, 1.0, 3.0, 31);
  if (r.failed) return 1.0;
  return std::max(r.max_trace_dev(), std::max(r.max_herm_defect(), -std::min(0.0, r.min_eigenvalue())));
}

double schedule_round_trip() {
  Schedule s{{{{0.5, {{0, Axis::Z}, {1, Axis::Z}}}, {-1.25, {{1, Axis::X}}}}, 0.3}, {{{2.0, {{0, Axis::Y}}}}, 1.5}};
  std::istringstream in(format_schedule(s));
  Schedule back = parse_schedule(in).steps;
  if (back.size() != s.size()) return 1.0;
  double worst = 0.0;
  for (size_t k = 0; k < s.size(); ++k) {
    if (back[k].hamiltonian.size() != s[k].hamiltonian.size()) return 1.0;
    worst = std::max(worst, std::abs(back[k].time - s[k].time));
    for (size_t j = 0; j < s[k].hamiltonian.size(); ++j) {
      if (back[k].hamiltonian[j].factors != s[k].hamiltonian[j].factors) return 1.0;
      worst = std::max(worst, std::abs(back[k].hamiltonian[j].coeff - s[k].hamiltonian[j].coeff));
    }
  }
  return worst;
}

double loss_populations() {
  PopulationSeries s = integrate_loss_odes(AtomLossParams{}, 20.0, 41);
  for (size_t i = 1; i < s.t.size(); ++i)
    if (s.Na[i] > s.Na[i - 1] || s.Nb[i] > s.Nb[i - 1]) return 1.0;
  return std::abs(lifetime_report(AtomLossParams{}).tau_background - 10.0);
}

}  // namespace

bool run_selftest(std::ostream& report) {
  const std::vector<Check> checks{
      {"spin algebra and Casimir", 1e-10, spin_algebra},
      {"coherent-state overlap formula", 1e-9, overlaps},
      {"zz entangler against analytic state", 1e-10, entangler},
      {"partial trace against Schmidt weights", 1e-12, schmidt},
      {"Deutsch classification", 1e-9, deutsch},
      {"collective dephasing rate", 1e-2, dephasing_rate},
      {"master equation against Liouvillian exponential", 1e-7, liouvillian_oracle},
      {"trace, Hermiticity and positivity", 1e-7, cptp_run},
      {"schedule text round trip", 0.0, schedule_round_trip},
      {"loss populations and background lifetime", 1e-12, loss_populations},
  };
  bool all = true;
  for (const auto& c : checks) {
    double d = 0.0;
    bool ok = false;
    try {
      d = c.defect();
      ok = d <= c.tol;
    } catch (const std::exception& e) {
      report << "selftest " << c.name << ": FAIL (" << e.what() << ")\n";
      all = false;
      continue;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", d);
    report << "selftest " << c.name << ": " << (ok ? "PASS" : "FAIL") << " (defect " << buf << ")\n";
    all = all && ok;
  }
  return all;
}

}  // namespace becq::cli
