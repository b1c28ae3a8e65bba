#pragma once

#include <optional>
#include <string>
#include <vector>

#include "becq/models.hpp"

namespace becq {

struct FitOptions {
  std::optional<double> t_min;
  std::optional<double> t_max;
  int min_peaks = 3;
};

struct DecayFit {
  double rate = 0.0;
  bool ok = false;         // false when the signal does not decay
  bool used_peaks = false;  // envelope fit vs |signal| fit
  int points = 0;
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& s, const FitOptions& opt = {});
DecayFit fit_decay(const EvolutionRecord& rec, const std::string& observable, const FitOptions& opt = {});
double fit_decay_rate(const EvolutionRecord& rec, const std::string& observable);

// Least-squares slope of y against x through the origin.
double fit_origin_slope(const std::vector<double>& x, const std::vector<double>& y);

// caption: H = Omega2 S^x_1 S^x_2, S^z dephasing, sites start at S^z = N,
//          signal <S^z_1>/N.
// paper-body: H = Omega2 S^z_1 S^z_2, S^x dephasing, sites start at S^x = N,
//          signal <S^x_1>/N. The two are related by a fixed rotation.
enum class AxisConvention { caption, paper_body };

AxisConvention convention_from_name(const std::string& name);
std::string convention_name(AxisConvention c);

struct TwoSiteSetup {
  LindbladModel model;
  DensityMatrix rho0;
  std::string signal;  // name of the polarization-axis observable of site 1
};

TwoSiteSetup two_site_gate_setup(int N, double Gamma, double Omega2, AxisConvention conv);

// Observables include "signal" (polarization axis of site 1, over N).
EvolutionRecord run_fig4a(int N, double Gamma, double Omega2, double t_end, int samples,
                          AxisConvention conv = AxisConvention::caption, double tol = 1e-9);

struct Fig4bPoint {
  int N = 0;
  double t = 0.0;
  double error = 0.0;
  double max_trace_dev = 0.0;
  double max_herm_defect = 0.0;
};

// Evolve for t under H, then for t under -H (dephasing on throughout);
// error = 1 - signal.
std::vector<Fig4bPoint> run_fig4b(int N, double Gamma, double Omega2, const std::vector<double>& gate_times,
                                  AxisConvention conv = AxisConvention::caption, double tol = 1e-9);

// Lambda-scheme rates.
double lambda_predicted_rate(int N, double g, double Delta, double Gamma_s);
EvolutionRecord run_fig4c(int N, double g, double Delta, double Gamma_s, double t_end, int samples, double tol = 1e-9);
// Envelope decay of <S^z>/N fitted over [2, 6] / predicted rate.
DecayFit fit_fig4c(const EvolutionRecord& rec, double predicted_rate);

struct Fig4dOptions {
  double g_laser = 1.0;
  double tol = 1e-8;
  int samples = 101;          // per segment
  bool exact_blocks = true;   // exact per-sector propagators; false selects adaptive RK
  bool check_convergence = true;
  double convergence_tol = 1e-4;
};

struct Fig4dResult {
  int N = 0;
  double gate_time = 0.0;
  double error = 0.0;           // 1 - <S^x_1>/N after forward + reverse
  double gamma2_fit = 0.0;      // slope of Gamma_c <p^dag p> against <F F>
  double gamma2_predicted = 0.0;  // G^2 Gamma_c / Delta^2
  double convergence_delta = 0.0;  // max change when the photon cutoff is raised by one
  bool converged = true;
  Index dim = 0;
  EvolutionRecord forward;
  EvolutionRecord reverse;
};

// Gate time pi/(4 N |J|) with J the realized S^z_1 S^z_2 coupling.
double cavity_gate_time(const CavityModel& params, double g_laser);
Fig4dResult run_fig4d(const CavityModel& params, const Fig4dOptions& opt = {});

}  // namespace becq
