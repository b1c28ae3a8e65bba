#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "becq/algorithms.hpp"
#include "becq/experiments.hpp"
#include "becq/physical_rates.hpp"
#include "selftest.hpp"

namespace becq::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Params {
 public:
  explicit Params(const RunConfig& cfg) : cfg_(cfg) {}

  bool has(const std::string& key) const { return cfg_.params.count(key) > 0; }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = cfg_.params.at(key);
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError("'" + key + "' expects a number, got '" + s + "'");
  }

  int integer(const std::string& key, int fallback, int lo = 1) const {
    if (!has(key)) return fallback;
    const std::string& s = cfg_.params.at(key);
    int v = 0;
    try {
      size_t used = 0;
      v = std::stoi(s, &used);
      if (used != s.size()) throw ArgumentError("");
    } catch (const std::exception&) {
      throw ArgumentError("'" + key + "' expects an integer, got '" + s + "'");
    }
    if (v < lo) throw ArgumentError("'" + key + "' must be at least " + std::to_string(lo));
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? cfg_.params.at(key) : fallback;
  }

  // Single N, or the range 1..N-max.
  std::vector<int> n_range(int default_max) const {
    if (has("N") && has("N-max")) throw ArgumentError("give either N or N-max, not both");
    if (has("N")) return {integer("N", 1)};
    std::vector<int> ns;
    for (int n = 1; n <= integer("N-max", default_max); ++n) ns.push_back(n);
    return ns;
  }

 private:
  const RunConfig& cfg_;
};

struct Output {
  std::ofstream file;
  std::ostream* os = nullptr;

  explicit Output(const std::string& path) {
    if (path == "-") {
      os = &std::cout;
      return;
    }
    file.open(path, std::ios::binary);
    if (!file) throw ArgumentError("cannot open output file '" + path + "'");
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

void check_line(std::ostream& s, const std::string& name, bool ok) {
  s << "check " << name << ": " << (ok ? "PASS" : "FAIL") << "\n";
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << "\n";
}

double series_trace_dev(const EvolutionRecord& r, size_t i) { return r.diagnostics[i].trace_dev; }

int cmd_fig2a(const Params& p, std::ostream& out, std::ostream& sum) {
  const int N = p.integer("N", 20);
  const double omega = p.real("omega", 1.0);
  const double t_end = p.real("t-end", kPi / 4.0 / omega);
  const int samples = p.integer("samples", 101, 2);
  const double r = 1.0 / std::sqrt(2.0);
  SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, N));
  BecRegister start = tensor({x, x});
  csv_row(out, {"t", "omega_t", "E", "E_over_Emax"});
  std::vector<double> Es;
  double emax = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = t_end * i / (samples - 1);
    EntropyResult e = entropy(partial_trace(apply_zz(start, 0, 1, omega * t), 0));
    Es.push_back(e.E);
    emax = e.E_max;
    csv_row(out, {num(t), num(omega * t), num(e.E), num(e.E / e.E_max)});
  }
  bool monotone = true;
  for (size_t i = 1; i < Es.size(); ++i) monotone = monotone && Es[i] >= Es[i - 1] - 1e-9;
  sum << "N: " << N << "\nE_max: " << brief(emax) << "\nE(t_end): " << brief(Es.back())
      << "\nE(t_end)/E_max: " << brief(Es.back() / emax) << "\n";
  check_line(sum, "entropy non-decreasing over the window", monotone);
  return kExitOk;
}

int cmd_fig2b(const Params& p, std::ostream& out, std::ostream& sum) {
  const int n_max = p.integer("N-max", 50);
  csv_row(out, {"N", "E_at_pi_over_4N"});
  double e1 = 0.0, worst = 0.0;
  const double r = 1.0 / std::sqrt(2.0);
  for (int N = 1; N <= n_max; ++N) {
    SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, N));
    double E = entropy(partial_trace(apply_zz(tensor({x, x}), 0, 1, kPi / (4.0 * N)), 0)).E;
    if (N == 1) e1 = E;
    worst = std::max(worst, std::abs(E - e1));
    csv_row(out, {std::to_string(N), num(E)});
  }
  sum << "E(1): " << brief(e1) << "\nmax |E(N) - E(1)|: " << brief(worst) << "\n";
  check_line(sum, "flatness |E(N) - E(1)| <= 0.15 bits", worst <= 0.15);
  return kExitOk;
}

int cmd_fig4a(const Params& p, std::ostream& out, std::ostream& sum) {
  const double gamma = p.real("gamma", 0.01), omega = p.real("omega", 1.0);
  const double t_end = p.real("t-end", 10.0), tol = p.real("tol", 1e-9);
  const int samples = p.integer("samples", 201, 2);
  AxisConvention conv = convention_from_name(p.text("axis", "caption"));
  csv_row(out, {"N", "t", "signal", "trace_dev", "herm_defect"});
  bool cptp = true;
  for (int N : p.n_range(4)) {
    EvolutionRecord r = run_fig4a(N, gamma, omega, t_end, samples, conv, tol);
    const auto& s = r.series("signal");
    for (size_t i = 0; i < r.times.size(); ++i)
      csv_row(out, {std::to_string(N), num(r.times[i]), num(s[i]), num(series_trace_dev(r, i)),
                    num(r.diagnostics[i].herm_defect)});
    cptp = cptp && !r.failed;
    sum << "N " << N << ": signal(t_end) = " << brief(s.back()) << ", max trace dev " << brief(r.max_trace_dev())
        << "\n";
  }
  sum << "axis convention: " << convention_name(conv) << "\n";
  check_line(sum, "CPTP diagnostics within thresholds", cptp);
  return kExitOk;
}

int cmd_fig4b(const Params& p, std::ostream& out, std::ostream& sum) {
  const double gamma = p.real("gamma", 0.01), omega = p.real("omega", 1.0), tol = p.real("tol", 1e-9);
  AxisConvention conv = convention_from_name(p.text("axis", "caption"));
  const char* labels[] = {"pi/4N", "1/(2sqrtN)", "pi/4"};
  csv_row(out, {"N", "time_label", "omega_t", "error", "trace_dev", "herm_defect"});
  std::vector<std::vector<double>> err(3);
  bool cptp = true;
  for (int N : p.n_range(8)) {
    std::vector<double> wt{kPi / (4.0 * N), 1.0 / (2.0 * std::sqrt(double(N))), kPi / 4.0};
    std::vector<double> ts;
    for (double w : wt) ts.push_back(w / omega);
    auto pts = run_fig4b(N, gamma, omega, ts, conv, tol);
    for (size_t k = 0; k < pts.size(); ++k) {
      csv_row(out, {std::to_string(N), labels[k], num(wt[k]), num(pts[k].error), num(pts[k].max_trace_dev),
                    num(pts[k].max_herm_defect)});
      err[k].push_back(pts[k].error);
      cptp = cptp && pts[k].max_trace_dev <= 1e-7 && pts[k].max_herm_defect <= 1e-8;
    }
  }
  auto strictly = [](const std::vector<double>& v, bool increasing) {
    for (size_t i = 1; i < v.size(); ++i)
      if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    return true;
  };
  for (int k = 0; k < 3; ++k) {
    sum << "error at " << labels[k] << ":";
    for (double e : err[k]) sum << " " << brief(e);
    sum << "\n";
  }
  check_line(sum, "error at pi/4N strictly decreasing in N", strictly(err[0], false));
  check_line(sum, "error at pi/4 strictly increasing in N", strictly(err[2], true));
  check_line(sum, "CPTP diagnostics within thresholds", cptp);
  return kExitOk;
}

int cmd_fig4c(const Params& p, std::ostream& out, std::ostream& sum) {
  const double g = p.real("g", 1.0), delta = p.real("delta", 10.0), gamma = p.real("gamma", 0.1);
  const double tol = p.real("tol", 1e-9);
  const int samples = p.integer("samples", 1201, 10);
  csv_row(out, {"N", "t", "Sz/N", "Sx/N", "nc", "trace_dev"});
  bool all_ok = true, cptp = true;
  for (int N : p.n_range(6)) {
    const double pred = lambda_predicted_rate(N, g, delta, gamma);
    const double t_end = p.real("t-end", 6.0 / pred);
    EvolutionRecord r = run_fig4c(N, g, delta, gamma, t_end, samples, tol);
    const auto &sz = r.series("Sz/N"), &sx = r.series("Sx/N"), &nc = r.series("nc");
    for (size_t i = 0; i < r.times.size(); ++i)
      csv_row(out, {std::to_string(N), num(r.times[i]), num(sz[i]), num(sx[i]), num(nc[i]), num(series_trace_dev(r, i))});
    cptp = cptp && !r.failed;
    DecayFit f = fit_fig4c(r, pred);
    const bool ok = f.ok && std::abs(f.rate / pred - 1.0) <= 0.25;
    all_ok = all_ok && ok;
    sum << "N " << N << ": fitted " << brief(f.rate) << ", predicted g^2 Gamma_s (N+1)/Delta^2 = " << brief(pred)
        << ", ratio " << brief(f.rate / pred) << "\n";
  }
  check_line(sum, "fitted envelope decay within 25% of prediction", all_ok);
  check_line(sum, "CPTP diagnostics within thresholds", cptp);
  return kExitOk;
}

int cmd_fig4d(const Params& p, std::ostream& out, std::ostream& sum) {
  CavityModel base;
  const double delta = p.real("delta", 10.0);
  base.omega = delta;
  base.omega0 = 2.0 * delta;
  base.G = p.real("G", 1.0);
  base.Gamma_c = p.real("gamma", 1.0);
  Fig4dOptions o;
  o.g_laser = p.real("g", 1.0);
  o.tol = p.real("tol", 1e-8);
  o.samples = p.integer("samples", 101, 2);
  std::vector<std::string> head{"N", "segment", "t"};
  bool header = false, cptp = true, fit_ok = true;
  std::vector<double> errors;
  for (int N : p.n_range(4)) {
    CavityModel m = base;
    m.N = N;
    Fig4dResult r = run_fig4d(m, o);
    if (!header) {
      for (const auto& n : r.forward.names) head.push_back(n);
      head.push_back("trace_dev");
      csv_row(out, head);
      header = true;
    }
    for (const auto* seg : {&r.forward, &r.reverse})
      for (size_t i = 0; i < seg->times.size(); ++i) {
        std::vector<std::string> row{std::to_string(N), seg == &r.forward ? "forward" : "reverse", num(seg->times[i])};
        for (const auto& v : seg->values) row.push_back(num(v[i]));
        row.push_back(num(series_trace_dev(*seg, i)));
        csv_row(out, row);
      }
    cptp = cptp && !r.forward.failed && !r.reverse.failed;
    fit_ok = fit_ok && std::abs(r.gamma2_fit / r.gamma2_predicted - 1.0) <= 0.5;
    errors.push_back(r.error);
    sum << "N " << N << ": gate time " << brief(r.gate_time) << ", error " << brief(r.error) << ", Gamma2 fit "
        << brief(r.gamma2_fit) << " (predicted " << brief(r.gamma2_predicted) << "), cutoff delta "
        << brief(r.convergence_delta) << ", dim " << r.dim << "\n";
  }
  bool decreasing = true;
  for (size_t i = 1; i < errors.size(); ++i) decreasing = decreasing && errors[i] < errors[i - 1];
  check_line(sum, "gate error decreasing in N", decreasing);
  check_line(sum, "Gamma2 fit within 50% of G^2 Gamma_c / Delta^2", fit_ok);
  check_line(sum, "CPTP diagnostics within thresholds", cptp);
  return kExitOk;
}

int cmd_deutsch(const Params& p, std::ostream& out, std::ostream& sum) {
  const int N = p.integer("N", 10);
  csv_row(out, {"oracle", "N", "readout", "classification", "expected", "correct"});
  bool all = true;
  double margin = 1.0;
  for (OracleId id : {OracleId::const00, OracleId::const11, OracleId::bal01, OracleId::bal10}) {
    DeutschResult r = run_deutsch({id, N});
    const bool constant = id == OracleId::const00 || id == OracleId::const11;
    const auto name = [](bool c) { return std::string(c ? "constant" : "balanced"); };
    const bool ok = (r.classification == Classification::constant) == constant;
    all = all && ok;
    margin = std::min(margin, std::abs(r.readout));
    csv_row(out, {oracle_name(id), std::to_string(N), num(r.readout),
                  name(r.classification == Classification::constant), name(constant), ok ? "yes" : "no"});
  }
  sum << "N: " << N << "\nminimum |readout|: " << brief(margin) << "\n";
  check_line(sum, "all oracles classified", all);
  return kExitOk;
}

int cmd_rates(const Params& p, std::ostream& out, std::ostream& sum) {
  AtomLossParams a;
  a.Gamma_l = p.real("gamma", a.Gamma_l);
  const double t_end = p.real("t-end", 20.0);
  const int samples = p.integer("samples", 201, 2);
  PopulationSeries s = integrate_loss_odes(a, t_end, samples);
  csv_row(out, {"t_s", "Na", "Nb"});
  bool monotone = true;
  for (size_t i = 0; i < s.t.size(); ++i) {
    csv_row(out, {num(s.t[i]), num(s.Na[i]), num(s.Nb[i])});
    if (i) monotone = monotone && s.Na[i] <= s.Na[i - 1] && s.Nb[i] <= s.Nb[i - 1];
  }
  LifetimeReport r = lifetime_report(a);
  sum << "density (cm^-3): " << brief(a.density) << "\ntau_background (s): " << brief(r.tau_background)
      << "\ntau_two_body (s): " << brief(r.tau_two_body) << "\ntau_three_body (s): " << brief(r.tau_three_body)
      << "\n";
  check_line(sum, "populations non-increasing", monotone);
  return kExitOk;
}

int cmd_schedule(const Params& p, std::ostream& out, std::ostream& sum) {
  if (!p.has("in")) throw ArgumentError("schedule needs an input file (--in)");
  std::ifstream in(p.text("in", ""));
  if (!in) throw ArgumentError("cannot open schedule file '" + p.text("in", "") + "'");
  ScheduleFile f = parse_schedule(in);
  if (f.site_N.empty()) f.site_N.assign(2, p.integer("N", 1));
  else if (p.has("N")) throw ArgumentError("the schedule file already fixes the site sizes");
  std::vector<SpinState> sites;
  const double r = 1.0 / std::sqrt(2.0);
  for (int n : f.site_N) sites.push_back(make_coherent(CoherentParams::from_amplitudes(r, r, n)));
  for (const auto& [site, ab] : f.inits) {
    if (site < 0 || site >= static_cast<int>(sites.size())) throw ArgumentError("init refers to a missing site");
    sites[site] = make_coherent(CoherentParams::from_amplitudes(ab.first, ab.second, f.site_N[site]));
  }
  BecRegister reg = tensor(sites);
  csv_row(out, {"step", "t", "site", "Sx/N", "Sy/N", "Sz/N"});
  double t = 0.0;
  auto emit = [&](int step) {
    for (int s = 0; s < reg.sites(); ++s) {
      DensityMatrix rho = partial_trace(reg, s);
      const int n = f.site_N[s];
      std::vector<std::string> row{std::to_string(step), num(t), std::to_string(s + 1)};
      for (Axis a : {Axis::X, Axis::Y, Axis::Z})
        row.push_back(num((rho.entries * spin_operator(a, n).dense()).trace().real() / n));
      csv_row(out, row);
    }
  };
  emit(0);
  for (size_t k = 0; k < f.steps.size(); ++k) {
    reg = run_schedule(reg, {f.steps[k]});
    t += f.steps[k].time;
    emit(static_cast<int>(k + 1));
  }
  sum << "sites: " << reg.sites() << "\nsteps: " << f.steps.size() << "\ntotal time: " << brief(t) << "\n";
  if (reg.sites() == 2) sum << "entropy of site 1 (bits): " << brief(entropy(partial_trace(reg, 0)).E) << "\n";
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"fig2a", "fig2b", "fig4a", "fig4b", "fig4c",
                                              "fig4d", "deutsch", "rates", "schedule", "selftest"};
  return names;
}

const std::vector<std::string>& command_keys(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"fig2a", {"out", "N", "omega", "t-end", "samples"}},
      {"fig2b", {"out", "N-max"}},
      {"fig4a", {"out", "N", "N-max", "gamma", "omega", "t-end", "samples", "tol", "axis"}},
      {"fig4b", {"out", "N", "N-max", "gamma", "omega", "tol", "axis"}},
      {"fig4c", {"out", "N", "N-max", "g", "delta", "gamma", "t-end", "samples", "tol"}},
      {"fig4d", {"out", "N", "N-max", "g", "G", "delta", "gamma", "samples", "tol"}},
      {"deutsch", {"out", "N"}},
      {"rates", {"out", "gamma", "t-end", "samples"}},
      {"schedule", {"out", "in", "N"}},
      {"selftest", {}},
  };
  auto it = keys.find(command);
  if (it == keys.end()) throw ArgumentError("unknown command '" + command + "'");
  return it->second;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError(path + ":" + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ArgumentError(path + ":" + std::to_string(no) + ": empty key or value");
    if (!out.emplace(key, value).second) throw ArgumentError(path + ":" + std::to_string(no) + ": duplicate key " + key);
  }
  return out;
}

int run_command(const RunConfig& cfg, std::ostream& summary) {
  const auto& allowed = command_keys(cfg.command);
  for (const auto& [k, v] : cfg.params)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ArgumentError("key '" + k + "' is not accepted by " + cfg.command);
  Params p(cfg);
  if (cfg.command == "selftest") return run_selftest(summary) ? kExitOk : kExitNumerical;

  std::ostringstream csv;
  int code = kExitOk;
  summary << "command: " << cfg.command << "\n";
  if (cfg.command == "fig2a") code = cmd_fig2a(p, csv, summary);
  else if (cfg.command == "fig2b") code = cmd_fig2b(p, csv, summary);
  else if (cfg.command == "fig4a") code = cmd_fig4a(p, csv, summary);
  else if (cfg.command == "fig4b") code = cmd_fig4b(p, csv, summary);
  else if (cfg.command == "fig4c") code = cmd_fig4c(p, csv, summary);
  else if (cfg.command == "fig4d") code = cmd_fig4d(p, csv, summary);
  else if (cfg.command == "deutsch") code = cmd_deutsch(p, csv, summary);
  else if (cfg.command == "rates") code = cmd_rates(p, csv, summary);
  else if (cfg.command == "schedule") code = cmd_schedule(p, csv, summary);

  const std::string path = p.text("out", cfg.command + ".csv");
  Output out(path);
  *out << csv.str();
  if (path != "-") summary << "csv: " << path << "\n";
  return code;
}

}  // namespace becq::cli
