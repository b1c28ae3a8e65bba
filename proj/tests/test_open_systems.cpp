#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "becq/experiments.hpp"

using namespace becq;

namespace {

SpinState x_state(int N) { return make_coherent(CoherentParams::from_angles(kPi / 2, 0.0, N)); }
SpinState tilted(int N, double theta, double phi) { return make_coherent(CoherentParams::from_angles(theta, phi, N)); }

DensityMatrix product_density(const std::vector<SpinState>& sites) {
  BecRegister reg = tensor(sites);
  return pure_density(reg.amps(), reg.basis());
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

void check_cptp(const EvolutionRecord& rec) {
  CHECK(rec.max_trace_dev() <= 1e-7);
  CHECK(rec.max_herm_defect() <= 1e-8);
  CHECK(rec.min_eigenvalue() >= -1e-7);
}

// Adds an observable to a copy of the model and returns its fitted rate.
double correlator_rate(LindbladModel m, const DensityMatrix& rho0, const SparseMatrix& op, double t_end) {
  m.observables.push_back({"corr", op, 1.0});
  EvolutionRecord rec = integrate_master(m, rho0, t_end, 201, 1e-10);
  check_cptp(rec);
  DecayFit f = fit_decay(rec, "corr");
  REQUIRE(f.ok);
  return f.rate;
}

}  // namespace

TEST_CASE("zero-rate model matches unitary rotation") {
  const int N = 6;
  const double Omega = 0.7, t = 2.3;
  SparseMatrix H = Omega * spin_operator(Axis::Z, N).entries();
  LindbladModel m{OperatorMatrix(H, fock_tag(N), true), {}, {}};
  m.observables.push_back({"Sx/N", spin_operator(Axis::X, N).entries(), 1.0 / N});
  SpinState s0 = tilted(N, 1.1, 0.4);
  IntegrateOptions opt;
  opt.tol = 1e-11;
  opt.allow_fast_path = false;
  EvolutionRecord rec = integrate_master(m, pure_density(s0.amps, fock_tag(N)), t, 11, opt);
  SpinState s1 = rotate(s0, Eigen::Vector3d(0, 0, 1), Omega * t);
  Complex f = s1.amps.dot(rec.final_state.entries * s1.amps);
  CHECK(std::abs(f.real() - 1.0) < 1e-8);
  check_cptp(rec);
}

TEST_CASE("pure dephasing keeps the diagonal and damps coherences") {
  const int N = 4;
  const double Gamma = 0.2, t = 1.5;
  LindbladModel m = build_dephasing_model(1, N, Axis::Z, Gamma);
  DensityMatrix rho0 = pure_density(tilted(N, 1.0, 0.3).amps, fock_tag(N));
  EvolutionRecord rec = integrate_master(m, rho0, t, 5, 1e-11);
  CHECK(rec.fast_path);
  const CMatrix& r = rec.final_state.entries;
  for (int j = 0; j <= N; ++j)
    for (int k = 0; k <= N; ++k) {
      double ds = 2.0 * (j - k);
      Complex expect = rho0.entries(j, k) * std::exp(-0.5 * Gamma * ds * ds * t);
      CHECK(std::abs(r(j, k) - expect) < 1e-10);
    }
}

TEST_CASE("Runge-Kutta path agrees with the dephasing fast path") {
  LindbladModel m = build_dephasing_model(2, 2, Axis::Z, 0.1);
  DensityMatrix rho0 = product_density({tilted(2, 0.9, 0.2), tilted(2, 2.0, 1.0)});
  IntegrateOptions opt;
  opt.tol = 1e-11;
  EvolutionRecord fast = integrate_master(m, rho0, 3.0, 7, opt);
  opt.allow_fast_path = false;
  EvolutionRecord rk = integrate_master(m, rho0, 3.0, 7, opt);
  CHECK(fast.fast_path);
  CHECK_FALSE(rk.fast_path);
  CHECK((fast.final_state.entries - rk.final_state.entries).norm() < 1e-8);
}

TEST_CASE("dephasing of a single site decays at twice the rate") {
  LindbladModel m = build_dephasing_model(1, 3, Axis::Z, 0.05);
  DensityMatrix rho0 = pure_density(x_state(3).amps, fock_tag(3));
  EvolutionRecord rec = integrate_master(m, rho0, 40.0, 201, 1e-10);
  CHECK(std::abs(fit_decay_rate(rec, "Sx1/N") - 0.1) < 1e-3);
}

TEST_CASE("dephasing rate is independent of N") {
  const double Gamma = 0.05;
  for (int N = 1; N <= 6; ++N) {
    LindbladModel m = build_dephasing_model(1, N, Axis::Z, Gamma);
    EvolutionRecord rec = integrate_master(m, pure_density(x_state(N).amps, fock_tag(N)), 40.0, 201, 1e-10);
    INFO("N = " << N);
    CHECK(std::abs(fit_decay_rate(rec, "Sx1/N") - 2 * Gamma) < 0.01 * 2 * Gamma);
  }
}

TEST_CASE("dephasing correlators decay at 2 Gamma K") {
  const double Gamma = 0.05;
  struct Case {
    Axis channel;
    std::vector<SpinFactor> factors;
    int K;
  };
  // K counts the factors that do not commute with the channel.
  const std::vector<Case> cases = {
      {Axis::Z, {{0, Axis::X}, {1, Axis::X}}, 2},
      {Axis::Z, {{0, Axis::X}, {1, Axis::Z}}, 1},
      {Axis::Z, {{0, Axis::Y}, {1, Axis::X}}, 2},
      {Axis::X, {{0, Axis::Z}, {1, Axis::X}}, 1},
      {Axis::X, {{0, Axis::Y}, {1, Axis::Z}}, 2},
  };
  for (const auto& c : cases)
    for (int N = 1; N <= 4; ++N) {
      LindbladModel m = build_dephasing_model(2, N, c.channel, Gamma);
      DensityMatrix rho0 = product_density({tilted(N, 1.0, 0.6), tilted(N, 2.1, 0.9)});
      double rate = correlator_rate(m, rho0, spin_product_operator({N, N}, c.factors), 30.0);
      INFO("channel " << axis_char(c.channel) << " K = " << c.K << " N = " << N);
      CHECK(std::abs(rate - 2 * Gamma * c.K) < 0.01 * 2 * Gamma * c.K);
    }
}

TEST_CASE("loss correlators decay at Gamma_l K") {
  const double Gamma_l = 0.1;
  const std::vector<std::vector<SpinFactor>> factor_sets = {
      {{0, Axis::Z}},
      {{0, Axis::X}},
      {{0, Axis::Z}, {1, Axis::X}},
      {{0, Axis::Y}, {1, Axis::Z}},
  };
  for (const auto& fs : factor_sets)
    for (int N = 1; N <= 3; ++N) {
      const int M = fs.size() == 1 ? 1 : 2;
      LindbladModel m = build_loss_model(M, N, Gamma_l);
      std::vector<SpinState> sites = {tilted(N, 1.0, 0.6)};
      if (M == 2) sites.push_back(tilted(N, 2.1, 0.9));
      DensityMatrix rho0 = loss_initial_state(M, N, sites);
      double rate = correlator_rate(m, rho0, loss_spin_product(M, N, fs), 20.0);
      const double K = static_cast<double>(fs.size());
      INFO("K = " << K << " N = " << N);
      CHECK(std::abs(rate - Gamma_l * K) < 0.01 * Gamma_l * K);
    }
}

TEST_CASE("zero-rate dephasing and loss models are unitary") {
  LindbladModel d = build_dephasing_model(2, 2, Axis::Z, 0.0);
  LindbladModel l = build_loss_model(1, 2, 0.0);
  EvolutionRecord rd = integrate_master(d, product_density({x_state(2), x_state(2)}), 5.0, 11, 1e-10);
  EvolutionRecord rl = integrate_master(l, loss_initial_state(1, 2, {x_state(2)}), 5.0, 11, 1e-10);
  for (double v : rd.series("Sx1/N")) CHECK(std::abs(v - 1.0) < 1e-10);
  for (double v : rl.series("Sx1/N")) CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("superoperator evolution is linear") {
  TwoSiteSetup s = two_site_gate_setup(2, 0.05, 1.0, AxisConvention::caption);
  DensityMatrix r1 = s.rho0;
  DensityMatrix r2 = product_density({tilted(2, 0.7, 1.2), tilted(2, 2.5, 0.1)});
  DensityMatrix mix{0.5 * (r1.entries + r2.entries), r1.basis};
  IntegrateOptions opt;
  opt.tol = 1e-11;
  auto final_of = [&](const DensityMatrix& r) { return integrate_master(s.model, r, 2.0, 3, opt).final_state.entries; };
  CMatrix lhs = final_of(mix);
  CMatrix rhs = 0.5 * (final_of(r1) + final_of(r2));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("integration agrees with the explicit superoperator exponential") {
  TwoSiteSetup s = two_site_gate_setup(1, 0.01, 1.0, AxisConvention::caption);
  CMatrix L = liouvillian(s.model);
  EvolutionRecord rec = integrate_master(s.model, s.rho0, 5.0, 6, 1e-11);
  const Index d = s.rho0.dim();
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    CMatrix Lt = L * rec.times[i];
    CVector v = Lt.exp() * vec(s.rho0.entries);
    CMatrix rho = Eigen::Map<CMatrix>(v.data(), d, d);
    const Observable& o = s.model.observable(s.signal);
    double expect = (CMatrix(o.op) * rho).trace().real() * o.scale;
    CHECK(std::abs(rec.series(s.signal)[i] - expect) < 1e-8);
  }
}

TEST_CASE("two-site gate envelope matches the superoperator spectrum") {
  const double Gamma = 0.01, Omega2 = 1.0;
  TwoSiteSetup s = two_site_gate_setup(1, Gamma, Omega2, AxisConvention::caption);
  Eigen::ComplexEigenSolver<CMatrix> es(liouvillian(s.model));
  // Slowest damping among the modes oscillating at the gate frequency 2 Omega2.
  double oracle = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    Complex lam = es.eigenvalues()(i);
    if (std::abs(std::abs(lam.imag()) - 2 * Omega2) < 0.05) oracle = std::min(oracle, -lam.real());
  }
  REQUIRE(std::isfinite(oracle));
  CHECK(std::abs(oracle - 2 * Gamma) < 1e-3 * Gamma);
  EvolutionRecord rec = run_fig4a(1, Gamma, Omega2, 100.0, 2001);
  DecayFit f = fit_decay(rec, "signal");
  CHECK(f.used_peaks);
  CHECK(std::abs(f.rate - oracle) < 0.02 * oracle);
}

TEST_CASE("closed two-site gate revives") {
  for (int N = 1; N <= 5; ++N)
    for (AxisConvention conv : {AxisConvention::caption, AxisConvention::paper_body}) {
      EvolutionRecord rec = run_fig4a(N, 0.0, 1.0, kPi, 5, conv, 1e-11);
      const auto& sig = rec.series("signal");
      INFO("N = " << N << " " << convention_name(conv));
      CHECK(std::abs(sig[2] - (N % 2 == 0 ? 1.0 : -1.0)) < 1e-8);
      CHECK(std::abs(sig[4] - 1.0) < 1e-8);
    }
}

TEST_CASE("axis conventions give the same signal") {
  EvolutionRecord a = run_fig4a(3, 0.01, 1.0, 3.0, 31, AxisConvention::caption);
  EvolutionRecord b = run_fig4a(3, 0.01, 1.0, 3.0, 31, AxisConvention::paper_body);
  for (std::size_t i = 0; i < a.times.size(); ++i) CHECK(std::abs(a.series("signal")[i] - b.series("signal")[i]) < 1e-7);
}

TEST_CASE("gate signal degrades with N") {
  std::vector<double> at_half;
  for (int N = 1; N <= 6; ++N) {
    EvolutionRecord rec = run_fig4a(N, 0.01, 1.0, kPi / 2, 3);
    check_cptp(rec);
    at_half.push_back(std::abs(rec.series("signal")[2]));
  }
  // Decreasing within each parity class; odd N revive to the opposite pole at
  // pi/2 and sit slightly above the preceding even N.
  for (std::size_t i = 2; i < at_half.size(); ++i) CHECK(at_half[i] < at_half[i - 2]);
  for (std::size_t i = 1; i < 4; ++i) CHECK(at_half[i] < at_half[i - 1]);
  CHECK(at_half[5] < 0.7 * at_half[0]);
  double q1 = std::abs(run_fig4a(1, 0.01, 1.0, kPi / 4, 3).series("signal")[2]);
  double q4 = std::abs(run_fig4a(4, 0.01, 1.0, kPi / 4, 3).series("signal")[2]);
  CHECK(q4 < q1);
}

TEST_CASE("gate reversal without dephasing is exact") {
  std::vector<double> times = {kPi / 4, 0.3, 1.0};
  for (int N = 1; N <= 4; ++N)
    for (const auto& p : run_fig4b(N, 0.0, 1.0, times, AxisConvention::caption, 1e-12)) CHECK(std::abs(p.error) < 1e-9);
}

TEST_CASE("short-gate reversal error falls with N and the crossover time is worse") {
  // Error ratio error(1/(2 sqrt N)) / error(pi/4N) from the caption parameters.
  const double frozen_ratio[] = {0.3498, 0.7485, 1.3394, 2.1377, 3.1605, 4.4244, 5.9451, 7.7379};
  std::vector<double> short_err;
  for (int N = 1; N <= 8; ++N) {
    double ts = kPi / (4 * N), tc = 1.0 / (2 * std::sqrt(static_cast<double>(N)));
    auto pts = run_fig4b(N, 0.01, 1.0, {ts, tc});
    short_err.push_back(pts[0].error);
    INFO("N = " << N);
    CHECK(pts[0].max_trace_dev <= 1e-7);
    double ratio = pts[1].error / pts[0].error;
    CHECK(std::abs(ratio - frozen_ratio[N - 1]) < 1e-3 * frozen_ratio[N - 1]);
    if (N >= 4) CHECK(ratio >= 2.0);
  }
  for (std::size_t i = 1; i < short_err.size(); ++i) CHECK(short_err[i] < short_err[i - 1]);
}

TEST_CASE("decay fit on synthetic series") {
  std::vector<double> t, e, c, flat;
  for (int i = 0; i <= 400; ++i) {
    double x = 0.05 * i;
    t.push_back(x);
    e.push_back(std::exp(-0.3 * x));
    c.push_back(std::cos(5 * x) * std::exp(-0.2 * x));
    flat.push_back(1.0);
  }
  DecayFit fe = fit_decay(t, e);
  CHECK(fe.ok);
  CHECK(std::abs(fe.rate - 0.3) < 1e-6);
  DecayFit fc = fit_decay(t, c);
  CHECK(fc.used_peaks);
  CHECK(std::abs(fc.rate - 0.2) < 0.004);
  DecayFit ff = fit_decay(t, flat);
  CHECK_FALSE(ff.ok);
  CHECK(ff.rate == 0.0);
  CHECK_THROWS_AS(fit_decay(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)), ArgumentError);
}

TEST_CASE("record CSV layout") {
  LindbladModel m = build_dephasing_model(1, 2, Axis::Z, 0.5);
  EvolutionRecord rec = integrate_master(m, pure_density(x_state(2).amps, fock_tag(2)), 1.0, 3, 1e-10);
  std::ostringstream os;
  write_csv(os, rec);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  CHECK(header == "t,Sx1/N,Sy1/N,Sz1/N,trace_dev,herm_defect");
  int rows = 0;
  while (std::getline(is, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 5);
  }
  CHECK(rows == 3);
  CHECK(os.str().find("0.36787944117144") != std::string::npos);  // e^{-1} printed with 17 digits
}

TEST_CASE("engine rejects bad input") {
  LindbladModel m = build_dephasing_model(1, 2, Axis::Z, 0.1);
  DensityMatrix rho0 = pure_density(x_state(2).amps, fock_tag(2));
  CHECK_THROWS_AS(integrate_master(m, pure_density(x_state(3).amps, fock_tag(3)), 1.0, 3, 1e-8), ArgumentError);
  CHECK_THROWS_AS(integrate_master(m, rho0, 1.0, 1, 1e-8), ArgumentError);
  CHECK_THROWS_AS(integrate_master(m, rho0, -1.0, 3, 1e-8), ArgumentError);
  CHECK_THROWS_AS(integrate_master(m, rho0, 1.0, 3, 0.0), ArgumentError);
  IntegrateOptions small;
  small.capacity = 2;
  CHECK_THROWS_AS(integrate_master(m, rho0, 1.0, 3, small), CapacityError);
  CHECK_THROWS_AS(build_dephasing_model(1, 2, Axis::Z, -0.1), ArgumentError);
  CHECK_THROWS_AS(build_dephasing_model(3, 20, Axis::Z, 0.1), CapacityError);
  CHECK_THROWS_AS(build_loss_model(2, 10, 0.1), CapacityError);
  LindbladModel bad = m;
  bad.hamiltonian = OperatorMatrix(spin_operator(Axis::X, 2).entries() * Complex(0, 1), fock_tag(2));
  CHECK_THROWS_AS(integrate_master(bad, rho0, 1.0, 3, 1e-8), ArgumentError);
  IntegrateOptions wrong;
  wrong.sectors = {0, 1};
  CHECK_THROWS_AS(integrate_master(m, rho0, 1.0, 3, wrong), ArgumentError);
}

TEST_CASE("sector restriction requires conserved labels") {
  TwoSiteSetup s = two_site_gate_setup(1, 0.01, 1.0, AxisConvention::caption);
  IntegrateOptions opt;
  opt.sectors = {0, 0, 1, 1};  // site-1 label, broken by the S^x S^x coupling
  CHECK_THROWS_AS(integrate_master(s.model, s.rho0, 1.0, 3, opt), ArgumentError);
}
