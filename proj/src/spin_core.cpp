#include "becq/spin_core.hpp"

#include <cmath>

namespace becq {

char axis_char(Axis a) {
  switch (a) {
    case Axis::I: return 'i';
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

Axis axis_from_char(char c) {
  switch (c) {
    case 'i': case 'I': return Axis::I;
    case 'x': case 'X': return Axis::X;
    case 'y': case 'Y': return Axis::Y;
    case 'z': case 'Z': return Axis::Z;
    default: throw ArgumentError(std::string("unknown axis '") + c + "'");
  }
}

BasisTag fock_tag(int N) { return {"fock:" + std::to_string(N), N + 1}; }

double hermiticity_defect(const SparseMatrix& m) {
  SparseMatrix d = m - SparseMatrix(m.adjoint());
  double worst = 0.0;
  for (Index r = 0; r < d.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(d, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix::OperatorMatrix(SparseMatrix entries, BasisTag basis, bool hermitian)
    : entries_(std::move(entries)), basis_(std::move(basis)), hermitian_(hermitian) {
  if (entries_.rows() != entries_.cols()) throw ArgumentError("operator must be square");
  if (basis_.dim != entries_.rows()) throw ArgumentError("basis tag dimension does not match operator");
  if (hermitian_ && hermiticity_defect(entries_) > 1e-12)
    throw NumericalIntegrityError("operator flagged Hermitian fails the Hermiticity check");
}

namespace {

double wrap_2pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

}  // namespace

CoherentParams CoherentParams::from_amplitudes(Complex alpha, Complex beta, int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  double n = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("coherent amplitudes must not both vanish");
  return CoherentParams(alpha / n, beta / n, N);
}

CoherentParams CoherentParams::from_angles(double theta, double phi, int N, double chi) {
  Complex g = std::polar(1.0, chi);
  return from_amplitudes(g * std::cos(theta / 2), g * std::sin(theta / 2) * std::polar(1.0, phi), N);
}

double CoherentParams::theta() const { return 2.0 * std::atan2(std::abs(beta_), std::abs(alpha_)); }

double CoherentParams::phi() const {
  if (std::abs(beta_) == 0.0 || std::abs(alpha_) == 0.0) return 0.0;
  return wrap_2pi(std::arg(beta_) - std::arg(alpha_));
}

double CoherentParams::chi() const {
  if (std::abs(alpha_) > 0.0) return std::arg(alpha_);
  return std::arg(beta_) - phi();
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

SpinState make_fock(int k, int N) {
  if (N < 0 || k < 0 || k > N) throw ArgumentError("Fock index out of range");
  SpinState s{N, CVector::Zero(N + 1)};
  s.amps(k) = 1.0;
  return s;
}

SpinState make_coherent(const CoherentParams& p) {
  const int N = p.N();
  const Complex a = p.alpha(), b = p.beta();
  SpinState s{N, CVector::Zero(N + 1)};
  if (std::abs(a) == 0.0) {
    s.amps(0) = std::pow(b, N);
  } else if (std::abs(b) == 0.0) {
    s.amps(N) = std::pow(a, N);
  } else {
    const double la = std::log(std::abs(a)), lb = std::log(std::abs(b));
    const double pa = std::arg(a), pb = std::arg(b);
    for (int k = 0; k <= N; ++k) {
      double mag = std::exp(0.5 * log_binomial(N, k) + k * la + (N - k) * lb);
      s.amps(k) = std::polar(mag, k * pa + (N - k) * pb);
    }
  }
  s.amps /= s.amps.norm();
  return s;
}

SpinState make_state(CVector amps) {
  if (amps.size() < 2) throw ArgumentError("state needs at least two amplitudes");
  double n = amps.norm();
  if (!(n > 0.0)) throw ArgumentError("zero state vector");
  return {static_cast<int>(amps.size() - 1), amps / n};
}

Complex overlap_numeric(const SpinState& s1, const SpinState& s2) {
  if (s1.N != s2.N) throw ArgumentError("overlap of states with different particle numbers");
  return s1.amps.dot(s2.amps);
}

Complex overlap_analytic(const CoherentParams& p1, const CoherentParams& p2) {
  if (p1.N() != p2.N()) throw ArgumentError("overlap of states with different particle numbers");
  const int N = p1.N();
  const double t = p1.theta(), tp = p2.theta();
  const double d = p1.phi() - p2.phi();
  Complex base = std::cos((t - tp) / 2) * std::cos(d / 2) + kI * std::cos((t + tp) / 2) * std::sin(d / 2);
  Complex phase = std::polar(1.0, -N * d / 2 + N * (p2.chi() - p1.chi()));
  return phase * std::pow(base, N);
}

double fidelity(const SpinState& s1, const SpinState& s2) { return std::abs(overlap_numeric(s1, s2)); }

OperatorMatrix spin_operator(Axis axis, int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  std::vector<Triplet> t;
  for (int k = 0; k <= N; ++k) {
    if (axis == Axis::Z) t.emplace_back(k, k, 2.0 * k - N);
    if (axis == Axis::I) t.emplace_back(k, k, 1.0);
    if (k == N) continue;
    // a^dag b |k> = sqrt((k+1)(N-k)) |k+1>
    double up = std::sqrt((k + 1.0) * (N - k));
    if (axis == Axis::X) {
      t.emplace_back(k + 1, k, up);
      t.emplace_back(k, k + 1, up);
    } else if (axis == Axis::Y) {
      t.emplace_back(k + 1, k, -kI * up);
      t.emplace_back(k, k + 1, kI * up);
    }
  }
  SparseMatrix m(N + 1, N + 1);
  m.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(std::move(m), fock_tag(N), true);
}

CMatrix expm_hermitian(const CMatrix& H, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success) throw NumericalIntegrityError("eigendecomposition failed");
  CVector ph = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

SpinState rotate(const SpinState& s, const Eigen::Vector3d& n, double angle) {
  if (std::abs(n.norm() - 1.0) > 1e-9) throw ArgumentError("rotation axis must be a unit vector");
  CMatrix gen = n.x() * spin_operator(Axis::X, s.N).dense() + n.y() * spin_operator(Axis::Y, s.N).dense() +
                n.z() * spin_operator(Axis::Z, s.N).dense();
  return {s.N, expm_hermitian(gen, angle) * s.amps};
}

Complex expectation(const SpinState& s, const SparseMatrix& op) { return s.amps.dot(op * s.amps); }

Moments moments(const SpinState& s) {
  Moments m;
  m.mean.x() = expectation(s, spin_operator(Axis::X, s.N).entries()).real();
  m.mean.y() = expectation(s, spin_operator(Axis::Y, s.N).entries()).real();
  m.mean.z() = expectation(s, spin_operator(Axis::Z, s.N).entries()).real();
  m.var_z = variance(s, Axis::Z);
  return m;
}

double variance(const SpinState& s, Axis axis) {
  const SparseMatrix S = spin_operator(axis, s.N).entries();
  CVector v = S * s.amps;
  double mean = s.amps.dot(v).real();
  return v.squaredNorm() - mean * mean;
}

EffectiveCouplings effective_couplings(const EffectiveCouplingParams& p) {
  if (p.Delta == 0.0) throw ArgumentError("detuning must be nonzero");
  EffectiveCouplings c;
  const double D = p.Delta;
  c.omega1 = p.g * p.g / D;
  c.omega1_hf = p.g * p.g * p.deltaE / (D * D);
  c.omega2 = -p.G * p.G * p.g * p.g / (4.0 * D * D * D);
  c.weak_detuning_warning = std::abs(D) < 5.0 * std::abs(p.g);
  return c;
}

}  // namespace becq
