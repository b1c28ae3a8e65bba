#include "becq/experiments.hpp"

#include <cmath>

namespace becq {

namespace {

// Least-squares line y = c + m x; returns m.
double line_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& s, const FitOptions& opt) {
  if (t.size() != s.size()) throw ArgumentError("time and signal lengths differ");
  std::vector<double> tw, aw;
  for (size_t i = 0; i < t.size(); ++i) {
    if (opt.t_min && t[i] < *opt.t_min) continue;
    if (opt.t_max && t[i] > *opt.t_max) continue;
    tw.push_back(t[i]);
    aw.push_back(std::abs(s[i]));
  }
  if (tw.size() < 10) throw ArgumentError("decay fit needs at least 10 samples in the window");
  std::vector<double> px, py;
  for (size_t i = 1; i + 1 < aw.size(); ++i) {
    if (!(aw[i] > aw[i - 1] && aw[i] >= aw[i + 1])) continue;
    double am = aw[i - 1], a0 = aw[i], ap = aw[i + 1];
    double curv = am - 2 * a0 + ap;
    double delta = curv == 0.0 ? 0.0 : 0.5 * (am - ap) / curv;
    double h = 0.5 * (tw[i + 1] - tw[i - 1]);
    double peak = a0 - 0.25 * (am - ap) * delta;
    if (peak > 0) {
      px.push_back(tw[i] + delta * h);
      py.push_back(std::log(peak));
    }
  }
  DecayFit f;
  if (static_cast<int>(px.size()) >= opt.min_peaks) {
    f.used_peaks = true;
  } else {
    px.clear();
    py.clear();
    for (size_t i = 0; i < aw.size(); ++i)
      if (aw[i] > 1e-300) {
        px.push_back(tw[i]);
        py.push_back(std::log(aw[i]));
      }
  }
  f.points = static_cast<int>(px.size());
  if (px.size() < 2) return f;
  double m = line_slope(px, py);
  if (m < 0.0) {
    f.rate = -m;
    f.ok = true;
  }
  return f;
}

DecayFit fit_decay(const EvolutionRecord& rec, const std::string& observable, const FitOptions& opt) {
  return fit_decay(rec.times, rec.series(observable), opt);
}

double fit_decay_rate(const EvolutionRecord& rec, const std::string& observable) {
  return fit_decay(rec, observable).rate;
}

double fit_origin_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw ArgumentError("slope fit needs matching nonempty series");
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return sxx == 0.0 ? 0.0 : sxy / sxx;
}

AxisConvention convention_from_name(const std::string& name) {
  if (name == "caption") return AxisConvention::caption;
  if (name == "paper-body") return AxisConvention::paper_body;
  throw ArgumentError("axis convention must be 'caption' or 'paper-body'");
}

std::string convention_name(AxisConvention c) { return c == AxisConvention::caption ? "caption" : "paper-body"; }

TwoSiteSetup two_site_gate_setup(int N, double Gamma, double Omega2, AxisConvention conv) {
  const bool cap = conv == AxisConvention::caption;
  const std::vector<int> sites{N, N};
  TwoSiteSetup s{build_dephasing_model(sites, cap ? Axis::Z : Axis::X, Gamma), {}, cap ? "Sz1/N" : "Sx1/N"};
  const Axis g = cap ? Axis::X : Axis::Z;
  s.model.hamiltonian =
      OperatorMatrix(SparseMatrix(Omega2 * spin_product_operator(sites, {{0, g}, {1, g}})), s.model.basis(), true);
  const double r = 1.0 / std::sqrt(2.0);
  SpinState pol = cap ? make_fock(N, N) : make_coherent(CoherentParams::from_amplitudes(r, r, N));
  BecRegister reg = tensor({pol, pol});
  s.rho0 = pure_density(reg.amps(), s.model.basis());
  Observable sig = s.model.observable(s.signal);
  sig.name = "signal";
  s.model.observables.insert(s.model.observables.begin(), sig);
  return s;
}

EvolutionRecord run_fig4a(int N, double Gamma, double Omega2, double t_end, int samples, AxisConvention conv,
                          double tol) {
  TwoSiteSetup s = two_site_gate_setup(N, Gamma, Omega2, conv);
  return integrate_master(s.model, s.rho0, t_end, samples, tol);
}

std::vector<Fig4bPoint> run_fig4b(int N, double Gamma, double Omega2, const std::vector<double>& gate_times,
                                  AxisConvention conv, double tol) {
  TwoSiteSetup s = two_site_gate_setup(N, Gamma, Omega2, conv);
  LindbladModel back = reversed_hamiltonian(s.model);
  std::vector<Fig4bPoint> out;
  for (double t : gate_times) {
    if (!(t >= 0.0)) throw ArgumentError("gate times must be non-negative");
    IntegrateOptions o;
    o.tol = tol;
    EvolutionRecord fwd = integrate_master(s.model, s.rho0, t, 2, o);
    o.t0 = t;
    EvolutionRecord rev = integrate_master(back, fwd.final_state, t, 2, o);
    Fig4bPoint p{N, t, 1.0 - rev.series("signal").back(), 0.0, 0.0};
    p.max_trace_dev = std::max(fwd.max_trace_dev(), rev.max_trace_dev());
    p.max_herm_defect = std::max(fwd.max_herm_defect(), rev.max_herm_defect());
    out.push_back(p);
  }
  return out;
}

double lambda_predicted_rate(int N, double g, double Delta, double Gamma_s) {
  if (Delta == 0.0) throw ArgumentError("detuning must be nonzero");
  return g * g * Gamma_s * (N + 1) / (Delta * Delta);
}

EvolutionRecord run_fig4c(int N, double g, double Delta, double Gamma_s, double t_end, int samples, double tol) {
  return integrate_master(build_lambda_model(N, g, Delta, Gamma_s), lambda_initial_state(N), t_end, samples, tol);
}

DecayFit fit_fig4c(const EvolutionRecord& rec, double predicted_rate) {
  FitOptions o;
  o.t_min = 2.0 / predicted_rate;
  o.t_max = 6.0 / predicted_rate;
  return fit_decay(rec, "Sz/N", o);
}

double cavity_gate_time(const CavityModel& params, double g_laser) {
  double J = std::abs(cavity_zz_coupling(params, g_laser));
  if (J == 0.0) throw ArgumentError("bus coupling vanishes; no gate time");
  return kPi / (4.0 * params.N * J);
}

namespace {

struct CavityRun {
  EvolutionRecord fwd, rev;
  Index dim = 0;
};

CavityRun cavity_protocol(const CavityModel& params, const Fig4dOptions& opt, double tg) {
  LindbladModel m = build_cavity_model(params, opt.g_laser);
  const double r = 1.0 / std::sqrt(2.0);
  SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, params.N));
  IntegrateOptions o;
  o.tol = opt.tol;
  o.sectors = cavity_sectors(params);
  o.exact_blocks = opt.exact_blocks;
  o.cache = std::make_shared<PropagatorCache>();
  CavityRun run;
  run.dim = m.dim();
  run.fwd = integrate_master(m, cavity_initial_state(params, x, x), tg, opt.samples, o);
  o.t0 = tg;
  run.rev = integrate_master(reversed_hamiltonian(m), run.fwd.final_state, tg, opt.samples, o);
  return run;
}

double max_record_diff(const EvolutionRecord& a, const EvolutionRecord& b) {
  double d = 0.0;
  for (size_t o = 0; o < a.names.size(); ++o) {
    const auto& sa = a.values[o];
    const auto& sb = b.series(a.names[o]);
    for (size_t i = 0; i < sa.size(); ++i) d = std::max(d, std::abs(sa[i] - sb[i]));
  }
  return d;
}

}  // namespace

Fig4dResult run_fig4d(const CavityModel& params, const Fig4dOptions& opt) {
  params.validate();
  Fig4dResult res;
  res.N = params.N;
  res.gate_time = cavity_gate_time(params, opt.g_laser);
  CavityRun run = cavity_protocol(params, opt, res.gate_time);
  res.dim = run.dim;
  res.error = 1.0 - run.rev.series("Sx1/N").back();
  std::vector<double> x = run.fwd.series("FF"), y = run.fwd.series("npho");
  for (double& v : y) v *= params.Gamma_c;
  res.gamma2_fit = fit_origin_slope(x, y);
  const double D = params.detuning();
  res.gamma2_predicted = params.G * params.G * params.Gamma_c / (D * D);
  if (opt.check_convergence) {
    CavityModel bigger = params;
    ++bigger.n_ph_max;
    CavityRun ref = cavity_protocol(bigger, opt, res.gate_time);
    res.convergence_delta = std::max(max_record_diff(run.fwd, ref.fwd), max_record_diff(run.rev, ref.rev));
    res.converged = res.convergence_delta < opt.convergence_tol;
    if (!res.converged)
      throw NumericalIntegrityError("photon cutoff not converged: raising it changes observables by " +
                                    std::to_string(res.convergence_delta));
  }
  res.forward = std::move(run.fwd);
  res.reverse = std::move(run.rev);
  return res;
}

}  // namespace becq
