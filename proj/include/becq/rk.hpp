#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "becq/rk_tableau.hpp"
#include "becq/types.hpp"

namespace becq {

enum class RkMethod { dp5, dop853 };

struct RkOptions {
  RkMethod method = RkMethod::dop853;
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct RkStats {
  long rhs_evals = 0;
  long accepted = 0;
  long rejected = 0;
};

// Adaptive embedded Runge-Kutta stepper for Eigen dense states (vectors or
// matrices). Rhs is callable as rhs(t, y, dydt). Steps are clipped so that
// every advance() call lands exactly on its target time.
template <class State, class Rhs>
class AdaptiveRk {
 public:
  AdaptiveRk(Rhs rhs, RkOptions opt) : rhs_(std::move(rhs)), opt_(opt) {
    stages_ = opt_.method == RkMethod::dop853 ? tableau::dop853::kStages : tableau::dp5::kStages;
    K_.resize(stages_ + 1);
  }

  const RkStats& stats() const { return stats_; }
  double last_step() const { return h_; }

  void advance(double& t, State& y, double t_target) {
    if (t_target < t) throw ArgumentError("integrator cannot step backwards");
    if (t_target == t) return;
    if (!have_f_) {
      eval(t, y, K_[0]);
      have_f_ = true;
    }
    if (!(h_ > 0.0)) h_ = initial_step(y, t_target - t);
    while (t < t_target) {
      if (stats_.accepted + stats_.rejected >= opt_.max_steps)
        throw IntegrationError("step budget exhausted", t);
      const double remaining = t_target - t;
      double h = std::min({h_, remaining, opt_.h_max});
      const bool clipped = h < h_;
      for (;;) {
        double err = attempt(t, y, h);
        if (!std::isfinite(err)) err = 1e10;
        if (err <= 1.0) {
          double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, exponent()));
          const bool last = h >= remaining;
          t = last ? t_target : t + h;
          y.swap(ynew_);
          std::swap(K_[0], K_[stages_]);
          ++stats_.accepted;
          double proposal = h * std::max(1.0, factor);
          h_ = clipped ? std::max(h_, proposal) : h * factor;
          break;
        }
        ++stats_.rejected;
        h *= std::max(kMinFactor, kSafety * std::pow(err, exponent()));
        if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow", t);
        h_ = h;
      }
    }
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 10.0;

  double exponent() const { return opt_.method == RkMethod::dop853 ? -1.0 / 8.0 : -1.0 / 5.0; }

  void eval(double t, const State& y, State& out) {
    rhs_(t, y, out);
    ++stats_.rhs_evals;
  }

  auto scale(const State& a, const State& b) const {
    return (opt_.atol + opt_.rtol * a.array().abs().max(b.array().abs())).eval();
  }

  double initial_step(const State& y, double span) {
    auto sc = (opt_.atol + opt_.rtol * y.array().abs()).eval();
    double d0 = std::sqrt((y.array().abs() / sc).square().mean());
    double d1 = std::sqrt((K_[0].array().abs() / sc).square().mean());
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min({h, span, opt_.h_max});
  }

  // Computes ynew_ and K_[stages_] = f(t+h, ynew_); returns the scaled error.
  double attempt(double t, const State& y, double h) {
    using namespace tableau;
    const bool hi = opt_.method == RkMethod::dop853;
    for (int i = 1; i < stages_; ++i) {
      tmp_ = y;
      for (int j = 0; j < i; ++j) {
        double a = hi ? dop853::A[i][j] : dp5::A[i][j];
        if (a != 0.0) tmp_ += (h * a) * K_[j];
      }
      eval(t + (hi ? dop853::C[i] : dp5::C[i]) * h, tmp_, K_[i]);
    }
    ynew_ = y;
    for (int j = 0; j < stages_; ++j) {
      double b = hi ? dop853::B[j] : dp5::B[j];
      if (b != 0.0) ynew_ += (h * b) * K_[j];
    }
    eval(t + h, ynew_, K_[stages_]);
    auto sc = scale(y, ynew_);
    const double n = static_cast<double>(y.size());
    if (!hi) {
      tmp_.setZero(y.rows(), y.cols());
      for (int j = 0; j <= stages_; ++j)
        if (dp5::E[j] != 0.0) tmp_ += (h * dp5::E[j]) * K_[j];
      return std::sqrt((tmp_.array().abs() / sc).square().sum() / n);
    }
    tmp_.setZero(y.rows(), y.cols());
    err3_.setZero(y.rows(), y.cols());
    for (int j = 0; j <= stages_; ++j) {
      if (dop853::E5[j] != 0.0) tmp_ += dop853::E5[j] * K_[j];
      if (dop853::E3[j] != 0.0) err3_ += dop853::E3[j] * K_[j];
    }
    double e5 = (tmp_.array().abs() / sc).square().sum();
    double e3 = (err3_.array().abs() / sc).square().sum();
    if (e5 == 0.0 && e3 == 0.0) return 0.0;
    return std::abs(h) * e5 / std::sqrt((e5 + 0.01 * e3) * n);
  }

  Rhs rhs_;
  RkOptions opt_;
  RkStats stats_;
  int stages_ = 0;
  std::vector<State> K_;
  State tmp_, ynew_, err3_;
  double h_ = 0.0;
  bool have_f_ = false;
};

}  // namespace becq
