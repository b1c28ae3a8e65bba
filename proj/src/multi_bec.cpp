#include "becq/multi_bec.hpp"

#include <cmath>

namespace becq {

using RowBlock = Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Index register_dim(const std::vector<int>& site_N) {
  if (site_N.empty()) throw ArgumentError("register needs at least one site");
  double d = 1.0;
  for (int n : site_N) {
    if (n < 1) throw ArgumentError("per-site particle count must be at least 1");
    d *= n + 1.0;
  }
  if (d > static_cast<double>(kRegisterCapacity))
    throw CapacityError("register dimension " + std::to_string(d) + " exceeds capacity");
  return static_cast<Index>(d);
}

BecRegister::BecRegister(std::vector<int> site_N, CVector amps) : site_N_(std::move(site_N)), amps_(std::move(amps)) {
  if (register_dim(site_N_) != amps_.size()) throw ArgumentError("amplitude vector length does not match sites");
  double n = amps_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("register state must be a nonzero finite vector");
  amps_ /= n;
}

Index BecRegister::stride(int site) const {
  check_site(site);
  Index s = 1;
  for (int n = sites() - 1; n > site; --n) s *= site_N_[n] + 1;
  return s;
}

void BecRegister::check_site(int site) const {
  if (site < 0 || site >= sites()) throw ArgumentError("site index " + std::to_string(site) + " out of range");
}

std::vector<int> BecRegister::occupation(Index idx) const {
  std::vector<int> ks(sites());
  for (int n = sites() - 1; n >= 0; --n) {
    ks[n] = static_cast<int>(idx % (site_N_[n] + 1));
    idx /= site_N_[n] + 1;
  }
  return ks;
}

Index BecRegister::index_of(const std::vector<int>& ks) const {
  if (static_cast<int>(ks.size()) != sites()) throw ArgumentError("occupation length mismatch");
  Index idx = 0;
  for (int n = 0; n < sites(); ++n) {
    if (ks[n] < 0 || ks[n] > site_N_[n]) throw ArgumentError("occupation out of range");
    idx = idx * (site_N_[n] + 1) + ks[n];
  }
  return idx;
}

BasisTag BecRegister::basis() const {
  std::string label = "register:";
  for (size_t i = 0; i < site_N_.size(); ++i) label += (i ? "x" : "") + std::to_string(site_N_[i]);
  return {label, dim()};
}

void DensityMatrix::validate(double tol, double neg_tol) const {
  if (basis.dim != dim()) throw NumericalIntegrityError("density matrix basis mismatch");
  if (std::abs(entries.trace() - 1.0) > tol) throw NumericalIntegrityError("density matrix trace differs from 1");
  if (hermiticity_defect(entries) > tol) throw NumericalIntegrityError("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -neg_tol) throw NumericalIntegrityError("density matrix has a negative eigenvalue");
}

DensityMatrix pure_density(const CVector& psi, BasisTag basis) {
  CVector v = psi / psi.norm();
  return {v * v.adjoint(), std::move(basis)};
}

BecRegister tensor(const std::vector<SpinState>& states) {
  if (states.empty()) throw ArgumentError("tensor of an empty list");
  std::vector<int> Ns;
  for (const auto& s : states) Ns.push_back(s.N);
  register_dim(Ns);
  CVector v = states[0].amps;
  for (size_t i = 1; i < states.size(); ++i) {
    const CVector& w = states[i].amps;
    CVector out(v.size() * w.size());
    for (Index a = 0; a < v.size(); ++a) out.segment(a * w.size(), w.size()) = v(a) * w;
    v = std::move(out);
  }
  return BecRegister(std::move(Ns), std::move(v));
}

BecRegister apply_zz(const BecRegister& reg, int site_i, int site_j, double omega_t) {
  reg.check_site(site_i);
  reg.check_site(site_j);
  if (site_i == site_j) throw ArgumentError("zz gate needs two distinct sites");
  const Index si = reg.stride(site_i), sj = reg.stride(site_j);
  const int di = reg.site_dim(site_i), dj = reg.site_dim(site_j);
  const int Ni = reg.site_N()[site_i], Nj = reg.site_N()[site_j];
  CVector out = reg.amps();
  for (Index idx = 0; idx < out.size(); ++idx) {
    int ki = static_cast<int>((idx / si) % di), kj = static_cast<int>((idx / sj) % dj);
    out(idx) *= std::polar(1.0, -omega_t * (2.0 * ki - Ni) * (2.0 * kj - Nj));
  }
  return BecRegister(reg.site_N(), std::move(out));
}

void apply_site_matrix(CVector& amps, const std::vector<int>& site_N, int site, const CMatrix& U) {
  const int d = site_N.at(site) + 1;
  if (U.rows() != d || U.cols() != d) throw ArgumentError("site matrix dimension mismatch");
  Index right = 1, left = 1;
  for (size_t n = site + 1; n < site_N.size(); ++n) right *= site_N[n] + 1;
  for (int n = 0; n < site; ++n) left *= site_N[n] + 1;
  CMatrix tmp(d, right);
  for (Index l = 0; l < left; ++l) {
    RowBlock blk(amps.data() + l * d * right, d, right);
    tmp.noalias() = U * blk;
    blk = tmp;
  }
}

BecRegister entangled_state_analytic(int N1, int N2, double omega_t, Expansion e) {
  if (N1 < 1 || N2 < 1) throw ArgumentError("particle counts must be at least 1");
  const double r = 1.0 / std::sqrt(2.0);
  CVector amps = CVector::Zero(static_cast<Index>(N1 + 1) * (N2 + 1));
  if (e == Expansion::OverSite2) {
    for (int k2 = 0; k2 <= N2; ++k2) {
      double w = std::exp(0.5 * (log_binomial(N2, k2) - N2 * std::log(2.0)));
      double ang = (N2 - 2.0 * k2) * omega_t;
      SpinState s1 = make_coherent(CoherentParams::from_amplitudes(std::polar(r, ang), std::polar(r, -ang), N1));
      for (int k1 = 0; k1 <= N1; ++k1) amps(k1 * (N2 + 1) + k2) = w * s1.amps(k1);
    }
  } else {
    for (int k1 = 0; k1 <= N1; ++k1) {
      double w = std::exp(0.5 * (log_binomial(N1, k1) - N1 * std::log(2.0)));
      double ang = (N1 - 2.0 * k1) * omega_t;
      SpinState s2 = make_coherent(CoherentParams::from_amplitudes(std::polar(r, ang), std::polar(r, -ang), N2));
      amps.segment(k1 * (N2 + 1), N2 + 1) = w * s2.amps;
    }
  }
  return BecRegister({N1, N2}, std::move(amps));
}

DensityMatrix partial_trace(const BecRegister& reg, int keep_site) {
  reg.check_site(keep_site);
  const int d = reg.site_dim(keep_site);
  const Index right = reg.stride(keep_site);
  const Index left = reg.dim() / (d * right);
  CVector psi = reg.amps();
  CMatrix rho = CMatrix::Zero(d, d);
  for (Index l = 0; l < left; ++l) {
    RowBlock blk(psi.data() + l * d * right, d, right);
    rho.noalias() += blk * blk.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {std::move(rho), fock_tag(reg.site_N()[keep_site])};
}

EntropyResult entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalIntegrityError("eigendecomposition failed");
  const RVector& lam = es.eigenvalues();
  if (lam.minCoeff() < -1e-8) throw NumericalIntegrityError("density matrix has a negative eigenvalue");
  EntropyResult r;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > 1e-12) r.E -= lam(i) * std::log2(lam(i));
  r.E_max = std::log2(static_cast<double>(rho.dim()));
  return r;
}

RVector schmidt_weights(const BecRegister& reg, int site) {
  if (reg.sites() != 2) throw ArgumentError("Schmidt weights need a two-site register");
  reg.check_site(site);
  const int d1 = reg.site_dim(0), d2 = reg.site_dim(1);
  CMatrix m = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      reg.amps().data(), d1, d2);
  Eigen::JacobiSVD<CMatrix> svd(m);
  RVector s = svd.singularValues().array().square();
  RVector out = RVector::Zero(reg.site_dim(site));
  out.head(std::min<Index>(s.size(), out.size())) = s.head(std::min<Index>(s.size(), out.size()));
  return out;
}

double fidelity(const BecRegister& a, const BecRegister& b) {
  if (a.site_N() != b.site_N()) throw ArgumentError("fidelity of registers with different shapes");
  return std::abs(a.amps().dot(b.amps()));
}

namespace {

BecRegister two_branch_cat(int N, Complex site1_alpha) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex u = std::polar(1.0, kPi * N / 4.0);
  CVector plus = make_coherent(CoherentParams::from_amplitudes(site1_alpha * r, r, N)).amps;
  CVector minus = make_coherent(CoherentParams::from_amplitudes(-site1_alpha * r, r, N)).amps;
  CVector q2a = make_coherent(CoherentParams::from_amplitudes(u * r, std::conj(u) * r, N)).amps;
  CVector q2b = make_coherent(CoherentParams::from_amplitudes(-u * r, std::conj(u) * r, N)).amps;
  CVector catA = 0.5 * (plus + minus), catB = 0.5 * (plus - minus);
  CVector amps(static_cast<Index>(N + 1) * (N + 1));
  for (int k1 = 0; k1 <= N; ++k1) amps.segment(k1 * (N + 1), N + 1) = catA(k1) * q2a + catB(k1) * q2b;
  return BecRegister({N, N}, std::move(amps));
}

}  // namespace

BecRegister cat_display_state(int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  return two_branch_cat(N, std::polar(1.0, kPi * N / 2.0));
}

BecRegister cat_display_state_uncorrected(int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  // |1/sqrt2, -1/sqrt2>> = (-1)^N |-1/sqrt2, 1/sqrt2>>; written out literally.
  const double r = 1.0 / std::sqrt(2.0);
  const Complex u = std::polar(1.0, kPi * N / 4.0);
  CVector px = make_coherent(CoherentParams::from_amplitudes(r, r, N)).amps;
  CVector mx = make_coherent(CoherentParams::from_amplitudes(r, -r, N)).amps;
  CVector q2a = make_coherent(CoherentParams::from_amplitudes(u * r, std::conj(u) * r, N)).amps;
  CVector q2b = make_coherent(CoherentParams::from_amplitudes(-u * r, std::conj(u) * r, N)).amps;
  CVector catA = 0.5 * (px + mx), catB = 0.5 * (px - mx);
  CVector amps(static_cast<Index>(N + 1) * (N + 1));
  for (int k1 = 0; k1 <= N; ++k1) amps.segment(k1 * (N + 1), N + 1) = catA(k1) * q2a + catB(k1) * q2b;
  return BecRegister({N, N}, std::move(amps));
}

double cat_decomposition_check(int N) {
  const double r = 1.0 / std::sqrt(2.0);
  SpinState x = make_coherent(CoherentParams::from_amplitudes(r, r, N));
  BecRegister exact = apply_zz(tensor({x, x}), 0, 1, kPi / 4.0);
  return fidelity(cat_display_state(N), exact);
}

double number_fluctuation_error(int N, int dN) {
  if (N < 1 || std::abs(dN) >= N) throw ArgumentError("need N >= 1 and |dN| < N");
  const int N2 = N + dN;
  BecRegister reg = entangled_state_analytic(N, N2, kPi / (4.0 * N));
  // Site-1 branch attached to k2 = 0: amplitudes at stride N2+1.
  Complex v0 = reg.amps()(0), v1 = reg.amps()(N2 + 1);
  double psi = 0.5 * std::arg(v1 / v0);
  return (psi - kPi / 4.0) / (kPi / 4.0);
}

}  // namespace becq
