#include "becq/models.hpp"

#include <cmath>
#include <map>

namespace becq {

namespace {

std::vector<Index> site_dims(const std::vector<int>& site_N) {
  std::vector<Index> d;
  for (int n : site_N) d.push_back(n + 1);
  return d;
}

OperatorMatrix herm(SparseMatrix m, const BasisTag& tag) { return OperatorMatrix(std::move(m), tag, true); }

OperatorMatrix plain(SparseMatrix m, const BasisTag& tag) { return OperatorMatrix(std::move(m), tag, false); }

std::string site_name(Axis a, int site) { return std::string("S") + axis_char(a) + std::to_string(site + 1) + "/N"; }

struct LossSite {
  MultiModeBasis basis;
  SparseMatrix a, b, Sx, Sy, Sz;
};

LossSite loss_site(int N_max) {
  LossSite s{MultiModeBasis::filtered({N_max, N_max}, [N_max](const auto& o) { return o[0] + o[1] <= N_max; },
                                      "loss-site:" + std::to_string(N_max)),
             {}, {}, {}, {}, {}};
  s.a = ladder_product(s.basis, {annihilate(0)});
  s.b = ladder_product(s.basis, {annihilate(1)});
  SparseMatrix ab = ladder_product(s.basis, {create(0), annihilate(1)});
  SparseMatrix ba = ladder_product(s.basis, {create(1), annihilate(0)});
  s.Sx = ab + ba;
  s.Sy = SparseMatrix(Complex(0, -1) * ab) + SparseMatrix(Complex(0, 1) * ba);
  s.Sz = ladder_product(s.basis, {create(0), annihilate(0)}) - ladder_product(s.basis, {create(1), annihilate(1)});
  return s;
}

const SparseMatrix& loss_axis(const LossSite& s, Axis a) {
  switch (a) {
    case Axis::X: return s.Sx;
    case Axis::Y: return s.Sy;
    case Axis::Z: return s.Sz;
    default: throw ArgumentError("identity has no site operator here");
  }
}

void check_factors(const std::vector<SpinFactor>& factors, int M) {
  SpinProductTerm t{1.0, factors};
  t.validate(M);
}

}  // namespace

SparseMatrix spin_product_operator(const std::vector<int>& site_N, const std::vector<SpinFactor>& factors) {
  check_factors(factors, static_cast<int>(site_N.size()));
  auto dims = site_dims(site_N);
  SparseMatrix out = sparse_identity(register_dim(site_N));
  for (const auto& f : factors) {
    if (f.axis == Axis::I) continue;
    out = SparseMatrix(out * embed_site_operator(spin_operator(f.axis, site_N[f.site]).entries(), f.site, dims));
  }
  return out;
}

LindbladModel build_dephasing_model(const std::vector<int>& site_N, Axis axis, double Gamma) {
  if (axis != Axis::X && axis != Axis::Z) throw ArgumentError("dephasing axis must be x or z");
  if (!(Gamma >= 0.0)) throw ArgumentError("dephasing rate must be non-negative");
  const Index dim = register_dim(site_N);
  if (dim > kDensityCapacity) throw CapacityError("dephasing model dimension exceeds capacity");
  BasisTag tag{BecRegister(site_N, CVector::Ones(dim)).basis()};
  LindbladModel m{herm(SparseMatrix(dim, dim), tag), {}, {}};
  const int M = static_cast<int>(site_N.size());
  for (int n = 0; n < M; ++n)
    m.jumps.push_back({herm(spin_product_operator(site_N, {{n, axis}}), tag), Gamma,
                       std::string("S") + axis_char(axis) + std::to_string(n + 1)});
  for (int n = 0; n < M; ++n)
    for (Axis a : {Axis::X, Axis::Y, Axis::Z})
      m.observables.push_back({site_name(a, n), spin_product_operator(site_N, {{n, a}}), 1.0 / site_N[n]});
  return m;
}

LindbladModel build_dephasing_model(int M, int N, Axis axis, double Gamma) {
  if (M < 1) throw ArgumentError("need at least one site");
  return build_dephasing_model(std::vector<int>(M, N), axis, Gamma);
}

SparseMatrix loss_spin_product(int M, int N_max, const std::vector<SpinFactor>& factors) {
  check_factors(factors, M);
  LossSite s = loss_site(N_max);
  std::vector<Index> dims(M, s.basis.size());
  double total = std::pow(static_cast<double>(s.basis.size()), M);
  if (total > kDensityCapacity) throw CapacityError("loss model dimension exceeds capacity");
  SparseMatrix out = sparse_identity(static_cast<Index>(total));
  for (const auto& f : factors) {
    if (f.axis == Axis::I) continue;
    out = SparseMatrix(out * embed_site_operator(loss_axis(s, f.axis), f.site, dims));
  }
  return out;
}

LindbladModel build_loss_model(int M, int N_max, double Gamma_l) {
  if (M < 1 || N_max < 1) throw ArgumentError("need M >= 1 and N_max >= 1");
  if (!(Gamma_l >= 0.0)) throw ArgumentError("loss rate must be non-negative");
  LossSite s = loss_site(N_max);
  double total = std::pow(static_cast<double>(s.basis.size()), M);
  if (total > kDensityCapacity) throw CapacityError("loss model dimension exceeds capacity");
  const Index dim = static_cast<Index>(total);
  std::vector<Index> dims(M, s.basis.size());
  BasisTag tag{"loss:" + std::to_string(M) + "x" + std::to_string(N_max), dim};
  LindbladModel m{herm(SparseMatrix(dim, dim), tag), {}, {}};
  for (int n = 0; n < M; ++n) {
    m.jumps.push_back({plain(embed_site_operator(s.a, n, dims), tag), Gamma_l, "a" + std::to_string(n + 1)});
    m.jumps.push_back({plain(embed_site_operator(s.b, n, dims), tag), Gamma_l, "b" + std::to_string(n + 1)});
  }
  for (int n = 0; n < M; ++n)
    for (Axis a : {Axis::X, Axis::Y, Axis::Z})
      m.observables.push_back({site_name(a, n), embed_site_operator(loss_axis(s, a), n, dims), 1.0 / N_max});
  return m;
}

DensityMatrix loss_initial_state(int M, int N_max, const std::vector<SpinState>& sites) {
  if (static_cast<int>(sites.size()) != M) throw ArgumentError("need one state per site");
  LossSite s = loss_site(N_max);
  CVector psi = CVector::Ones(1);
  for (const auto& st : sites) {
    if (st.N != N_max) throw ArgumentError("site state must hold N_max bosons");
    CVector v = CVector::Zero(s.basis.size());
    for (int k = 0; k <= N_max; ++k) v(*s.basis.index_of({k, N_max - k})) = st.amps(k);
    CVector out(psi.size() * v.size());
    for (Index i = 0; i < psi.size(); ++i) out.segment(i * v.size(), v.size()) = psi(i) * v;
    psi = std::move(out);
  }
  return pure_density(psi, {"loss:" + std::to_string(M) + "x" + std::to_string(N_max), psi.size()});
}

MultiModeBasis lambda_basis(int N) { return MultiModeBasis::conserved(3, N); }

LindbladModel build_lambda_model(int N, double g, double Delta, double Gamma_s) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  if (!(Gamma_s >= 0.0)) throw ArgumentError("emission rate must be non-negative");
  MultiModeBasis b = lambda_basis(N);
  if (b.size() > kDensityCapacity) throw CapacityError("lambda model dimension exceeds capacity");
  const int A = 0, B = 1, C = 2;
  BasisTag tag = b.tag();
  SparseMatrix H = ladder_product(b, {create(C), annihilate(C)}, Delta);
  H += ladder_product(b, {create(A), annihilate(C)}, g) + ladder_product(b, {create(C), annihilate(A)}, g);
  H += ladder_product(b, {create(B), annihilate(C)}, g) + ladder_product(b, {create(C), annihilate(B)}, g);
  LindbladModel m{herm(std::move(H), tag), {}, {}};
  m.jumps.push_back({plain(ladder_product(b, {create(A), annihilate(C)}), tag), Gamma_s, "a+c"});
  m.jumps.push_back({plain(ladder_product(b, {create(B), annihilate(C)}), tag), Gamma_s, "b+c"});
  SparseMatrix nA = ladder_product(b, {create(A), annihilate(A)});
  SparseMatrix nB = ladder_product(b, {create(B), annihilate(B)});
  m.observables.push_back({"Sz/N", nA - nB, 1.0 / N});
  m.observables.push_back(
      {"Sx/N", ladder_product(b, {create(A), annihilate(B)}) + ladder_product(b, {create(B), annihilate(A)}), 1.0 / N});
  m.observables.push_back({"nc", ladder_product(b, {create(C), annihilate(C)}), 1.0});
  return m;
}

DensityMatrix lambda_initial_state(int N) {
  MultiModeBasis b = lambda_basis(N);
  CVector psi = CVector::Zero(b.size());
  psi(*b.index_of({N, 0, 0})) = 1.0;
  return pure_density(psi, b.tag());
}

void CavityModel::validate() const {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  if (n_ph_max < 0 || n_exc_max < 0) throw ArgumentError("cutoffs must be non-negative");
  if (!(Gamma_c >= 0.0)) throw ArgumentError("photon decay rate must be non-negative");
  if (detuning() == 0.0 || omega == 0.0 || omega0 == 0.0) throw ArgumentError("detunings must be nonzero");
}

MultiModeBasis cavity_basis(const CavityModel& p) {
  p.validate();
  const int N = p.N, K = p.n_exc_max;
  return MultiModeBasis::filtered({N, N, N, N, N, N, p.n_ph_max},
                                  [N, K](const MultiModeBasis::Occupation& o) {
                                    return o[0] + o[1] + o[2] == N && o[3] + o[4] + o[5] == N &&
                                           o[2] + o[5] <= K;
                                  },
                                  "cavity:N" + std::to_string(N) + ":ph" + std::to_string(p.n_ph_max) + ":exc" +
                                      std::to_string(K));
}

LindbladModel build_cavity_model(const CavityModel& p, double g_laser) {
  namespace cm = cavity_mode;
  MultiModeBasis b = cavity_basis(p);
  if (b.size() > kDensityCapacity) throw CapacityError("cavity model dimension exceeds capacity");
  BasisTag tag = b.tag();
  const int A[2] = {cm::a1, cm::a2}, B[2] = {cm::b1, cm::b2}, C[2] = {cm::c1, cm::c2};
  SparseMatrix H = ladder_product(b, {create(cm::p), annihilate(cm::p)}, p.omega);
  SparseMatrix Fp(b.size(), b.size()), Fm(b.size(), b.size());
  for (int n = 0; n < 2; ++n) {
    // (omega0/2)(n_c - n_b) = omega0 n_c + (omega0/2) n_a - (omega0/2) N
    H += ladder_product(b, {create(C[n]), annihilate(C[n])}, p.omega0);
    if (p.keep_spectator_term) H += ladder_product(b, {create(A[n]), annihilate(A[n])}, p.omega0 / 2);
    H += ladder_product(b, {create(B[n]), annihilate(C[n]), create(cm::p)}, p.G);
    H += ladder_product(b, {create(C[n]), annihilate(B[n]), annihilate(cm::p)}, p.G);
    H += ladder_product(b, {create(B[n]), annihilate(C[n])}, g_laser);
    H += ladder_product(b, {create(C[n]), annihilate(B[n])}, g_laser);
    Fp += ladder_product(b, {create(C[n]), annihilate(B[n])});
    Fm += ladder_product(b, {create(B[n]), annihilate(C[n])});
  }
  LindbladModel m{herm(std::move(H), tag), {}, {}};
  m.jumps.push_back({plain(ladder_product(b, {annihilate(cm::p)}), tag), p.Gamma_c, "p"});
  auto sx = [&](int n) {
    return SparseMatrix(ladder_product(b, {create(A[n]), annihilate(B[n])}) +
                        ladder_product(b, {create(B[n]), annihilate(A[n])}));
  };
  auto sy = [&](int n) {
    return SparseMatrix(ladder_product(b, {create(A[n]), annihilate(B[n])}, Complex(0, -1)) +
                        ladder_product(b, {create(B[n]), annihilate(A[n])}, Complex(0, 1)));
  };
  auto sz = [&](int n) {
    return SparseMatrix(ladder_product(b, {create(A[n]), annihilate(A[n])}) -
                        ladder_product(b, {create(B[n]), annihilate(B[n])}));
  };
  const double invN = 1.0 / p.N;
  m.observables.push_back({"Sx1/N", sx(0), invN});
  m.observables.push_back({"Sy1/N", sy(0), invN});
  m.observables.push_back({"Sz1/N", sz(0), invN});
  m.observables.push_back({"Sz2/N", sz(1), invN});
  m.observables.push_back({"npho", ladder_product(b, {create(cm::p), annihilate(cm::p)}), 1.0});
  m.observables.push_back({"FF", SparseMatrix(Fp * Fm), 1.0});
  m.observables.push_back({"nc", SparseMatrix(ladder_product(b, {create(cm::c1), annihilate(cm::c1)}) +
                                              ladder_product(b, {create(cm::c2), annihilate(cm::c2)})),
                           1.0});
  return m;
}

DensityMatrix cavity_initial_state(const CavityModel& p, const SpinState& s1, const SpinState& s2) {
  if (s1.N != p.N || s2.N != p.N) throw ArgumentError("BEC states must hold N bosons");
  MultiModeBasis b = cavity_basis(p);
  CVector psi = CVector::Zero(b.size());
  for (int k1 = 0; k1 <= p.N; ++k1)
    for (int k2 = 0; k2 <= p.N; ++k2) psi(*b.index_of({k1, p.N - k1, 0, k2, p.N - k2, 0, 0})) = s1.amps(k1) * s2.amps(k2);
  return pure_density(psi, b.tag());
}

std::vector<int> cavity_sectors(const CavityModel& p) {
  MultiModeBasis b = cavity_basis(p);
  std::vector<int> lab;
  for (const auto& o : b.states()) lab.push_back(o[cavity_mode::a1] * (p.N + 1) + o[cavity_mode::a2]);
  return lab;
}

double cavity_zz_coupling(const CavityModel& p, double g_laser) {
  return -p.G * p.G * g_laser * g_laser / (2.0 * p.omega0 * p.omega0 * p.omega);
}

CMatrix cavity_effective_hamiltonian(const CavityModel& p, double g_laser) {
  const int N = p.N;
  const double lam = p.G * p.G * g_laser * g_laser / (p.omega0 * p.omega0 * p.omega);
  CMatrix H = CMatrix::Zero((N + 1) * (N + 1), (N + 1) * (N + 1));
  for (int k1 = 0; k1 <= N; ++k1)
    for (int k2 = 0; k2 <= N; ++k2) {
      double nb = (N - k1) + (N - k2);
      H(k1 * (N + 1) + k2, k1 * (N + 1) + k2) = -lam * nb * nb;
    }
  return H;
}

CMatrix cavity_reduce_bec1(const CavityModel& p, const CMatrix& rho) {
  MultiModeBasis b = cavity_basis(p);
  if (rho.rows() != b.size()) throw ArgumentError("density matrix does not match the cavity basis");
  MultiModeBasis b1 = MultiModeBasis::conserved(3, p.N);
  std::map<std::vector<int>, std::vector<std::pair<Index, Index>>> by_rest;
  for (Index i = 0; i < b.size(); ++i) {
    const auto& o = b.state(i);
    by_rest[{o.begin() + 3, o.end()}].push_back({i, *b1.index_of({o[0], o[1], o[2]})});
  }
  CMatrix r = CMatrix::Zero(b1.size(), b1.size());
  for (const auto& [rest, members] : by_rest)
    for (const auto& [i, ii] : members)
      for (const auto& [j, jj] : members) r(ii, jj) += rho(i, j);
  return r;
}

}  // namespace becq
