#include "becq/physical_rates.hpp"

#include <cmath>
#include <limits>

#include "becq/rk.hpp"

namespace becq {

void AtomLossParams::validate() const {
  for (double v : {Gamma_l, K_b, K_ab, L_a, Na0, Nb0})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("loss parameters must be finite and non-negative");
  if (!(density > 0.0)) throw ArgumentError("density must be positive");
  if (!(Na0 + Nb0 > 0.0)) throw ArgumentError("need a nonzero initial population");
}

namespace {

double inverse_or_inf(double rate) { return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity(); }

struct LossRhs {
  AtomLossParams p;

  void operator()(double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
    double na = p.Na0 > 0 ? p.n_a0() * y(0) / p.Na0 : 0.0;
    double nb = p.Nb0 > 0 ? p.n_b0() * y(1) / p.Nb0 : 0.0;
    dy.resize(2);
    dy(0) = -y(0) * (p.Gamma_l + p.K_ab * nb + p.L_a * na * na);
    dy(1) = -y(1) * (p.Gamma_l + p.K_ab * na + p.K_b * nb);
  }
};

}  // namespace

PopulationSeries integrate_loss_odes(const AtomLossParams& p, double t_end, int samples) {
  p.validate();
  if (samples < 2) throw ArgumentError("need at least two samples");
  if (!(t_end >= 0.0)) throw ArgumentError("t_end must be non-negative");
  RkOptions ro;
  ro.method = RkMethod::dop853;
  ro.rtol = 1e-11;
  ro.atol = 1e-12 * std::max(1.0, p.Na0 + p.Nb0);
  AdaptiveRk<Eigen::VectorXd, LossRhs> rk(LossRhs{p}, ro);
  Eigen::VectorXd y(2);
  y << p.Na0, p.Nb0;
  PopulationSeries s;
  double t = 0.0;
  for (int i = 0; i < samples; ++i) {
    double target = t_end * i / (samples - 1);
    rk.advance(t, y, target);
    if (y(0) < 0.0 || y(1) < 0.0) throw IntegrationError("negative population", s.t.empty() ? 0.0 : s.t.back());
    s.t.push_back(t);
    s.Na.push_back(y(0));
    s.Nb.push_back(y(1));
  }
  return s;
}

LifetimeReport lifetime_report(const AtomLossParams& p) {
  p.validate();
  const double na = p.n_a0(), nb = p.n_b0();
  LifetimeReport r;
  r.tau_background = inverse_or_inf(p.Gamma_l);
  r.tau_two_body = inverse_or_inf(p.K_b * nb + p.K_ab * na);
  r.tau_three_body = inverse_or_inf(p.L_a * na * na);
  r.rate_a = p.Gamma_l + p.K_ab * nb + p.L_a * na * na;
  r.rate_b = p.Gamma_l + p.K_ab * na + p.K_b * nb;
  return r;
}

}  // namespace becq
