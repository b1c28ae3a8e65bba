#include "becq/lindblad.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <ostream>

namespace becq {

void LindbladModel::validate() const {
  const Index d = dim();
  if (d == 0) throw ArgumentError("model has an empty Hamiltonian");
  if (hermiticity_defect(hamiltonian.entries()) > 1e-10) throw ArgumentError("Hamiltonian is not Hermitian");
  for (const auto& j : jumps) {
    if (j.op.dim() != d || !(j.op.basis() == hamiltonian.basis()))
      throw ArgumentError("jump operator '" + j.name + "' acts on a different basis");
    if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) throw ArgumentError("jump rate must be finite and non-negative");
  }
  for (const auto& o : observables)
    if (o.op.rows() != d) throw ArgumentError("observable '" + o.name + "' has the wrong dimension");
}

const Observable& LindbladModel::observable(const std::string& name) const {
  for (const auto& o : observables)
    if (o.name == name) return o;
  throw ArgumentError("model has no observable '" + name + "'");
}

const std::vector<double>& EvolutionRecord::series(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw ArgumentError("record has no observable '" + name + "'");
}

double EvolutionRecord::max_trace_dev() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.trace_dev);
  return m;
}

double EvolutionRecord::max_herm_defect() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.herm_defect);
  return m;
}

double EvolutionRecord::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& d : diagnostics)
    if (!std::isnan(d.min_eig)) m = std::min(m, d.min_eig);
  return m;
}

std::size_t PropagatorCache::hash(const CMatrix& m, bool conj) {
  std::size_t h = std::hash<Index>{}(m.rows()) ^ (std::hash<Index>{}(m.cols()) << 1);
  for (Index i = 0; i < m.size(); ++i) {
    Complex v = conj ? std::conj(m.data()[i]) : m.data()[i];
    h = h * 1099511628211ull ^ std::hash<double>{}(v.real() + 0.0);
    h = h * 1099511628211ull ^ std::hash<double>{}(v.imag() + 0.0);
  }
  return h;
}

const CMatrix* PropagatorCache::find(const CMatrix& gen, bool& conjugated) const {
  for (bool c : {false, true}) {
    auto [lo, hi] = entries_.equal_range(hash(gen, c));
    for (auto it = lo; it != hi; ++it) {
      const CMatrix& g = it->second.first;
      if (g.rows() == gen.rows() && g.cols() == gen.cols() && (c ? g == gen.conjugate() : g == gen)) {
        conjugated = c;
        return &it->second.second;
      }
    }
  }
  return nullptr;
}

const CMatrix& PropagatorCache::insert(CMatrix gen, CMatrix prop) {
  std::size_t h = hash(gen, false);
  return entries_.emplace(h, std::make_pair(std::move(gen), std::move(prop)))->second.second;
}

namespace {

double trace_product_real(const SparseMatrix& op, const CMatrix& rho) {
  Complex s = 0.0;
  for (Index r = 0; r < op.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(op, r); it; ++it) s += it.value() * rho(it.col(), it.row());
  return s.real();
}

struct LindbladRhs {
  SparseMatrix A;  // -i H - (1/2) sum rate L^dag L
  std::vector<SparseMatrix> L;
  std::vector<double> rate;
  CMatrix X, Y;

  void operator()(double, const CMatrix& rho, CMatrix& out) {
    X.noalias() = A * rho;
    out = X + X.adjoint();
    for (size_t j = 0; j < L.size(); ++j) {
      Y.noalias() = L[j] * rho;
      X.noalias() = L[j] * Y.adjoint();
      out += rate[j] * X;
    }
  }
};


struct SectorLayout {
  std::vector<int> sector;              // compacted label per basis state
  std::vector<Index> local;             // position inside its sector
  std::vector<std::vector<Index>> members;
  std::vector<std::pair<int, int>> pairs;  // stored blocks (s <= s')
  std::vector<Index> offset;
  std::map<std::pair<int, int>, int> pair_index;
};

struct ObsEntry {
  Complex coeff;
  int pair;
  Index pos;
  bool conj;
};

SparseMatrix restrict_to(const SparseMatrix& m, const SectorLayout& lay, int s) {
  const auto& mem = lay.members[s];
  std::vector<Triplet> t;
  for (Index r : mem)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) t.emplace_back(lay.local[r], lay.local[it.col()], it.value());
  SparseMatrix out(static_cast<Index>(mem.size()), static_cast<Index>(mem.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void check_conserves(const SparseMatrix& m, const std::vector<int>& sector, const std::string& what) {
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      if (sector[it.row()] != sector[it.col()] && it.value() != Complex(0.0))
        throw ArgumentError(what + " connects different sectors");
}

struct SectorRhs {
  const SectorLayout* lay;
  std::vector<SparseMatrix> A;                // per sector
  std::vector<std::vector<SparseMatrix>> L;   // per jump, per sector
  std::vector<double> rate;
  std::vector<CMatrix> Xs, Ys;  // scratch per stored block

  void operator()(double, const CVector& y, CVector& out) {
    out.resize(y.size());
    if (Xs.size() != lay->pairs.size()) {
      Xs.resize(lay->pairs.size());
      Ys.resize(lay->pairs.size());
    }
    for (size_t p = 0; p < lay->pairs.size(); ++p) {
      CMatrix& X = Xs[p];
      CMatrix& Y = Ys[p];
      auto [s, sp] = lay->pairs[p];
      const Index ds = static_cast<Index>(lay->members[s].size()), dsp = static_cast<Index>(lay->members[sp].size());
      Eigen::Map<const CMatrix> R(y.data() + lay->offset[p], ds, dsp);
      Eigen::Map<CMatrix> D(out.data() + lay->offset[p], ds, dsp);
      D.noalias() = A[s] * R;
      X.noalias() = A[sp] * R.adjoint();
      D += X.adjoint();
      for (size_t j = 0; j < L.size(); ++j) {
        X.noalias() = L[j][sp] * R.adjoint();
        Y.noalias() = L[j][s] * X.adjoint();
        D += rate[j] * Y;
      }
    }
  }
};

EvolutionRecord integrate_sectors(const LindbladModel& model, const DensityMatrix& rho0, double t_end, int samples,
                                  const IntegrateOptions& opt) {
  const Index d = model.dim();
  if (static_cast<Index>(opt.sectors.size()) != d) throw ArgumentError("one sector label per basis state required");
  SectorLayout lay;
  {
    std::map<int, int> ids;
    for (int lab : opt.sectors) ids.emplace(lab, 0);
    int next = 0;
    for (auto& [lab, id] : ids) id = next++;
    lay.members.resize(ids.size());
    lay.sector.resize(d);
    lay.local.resize(d);
    for (Index i = 0; i < d; ++i) {
      int s = ids[opt.sectors[i]];
      lay.sector[i] = s;
      lay.local[i] = static_cast<Index>(lay.members[s].size());
      lay.members[s].push_back(i);
    }
  }
  check_conserves(model.hamiltonian.entries(), lay.sector, "Hamiltonian");
  for (const auto& j : model.jumps) check_conserves(j.op.entries(), lay.sector, "jump '" + j.name + "'");

  std::set<std::pair<int, int>> need;
  for (int s = 0; s < static_cast<int>(lay.members.size()); ++s) need.insert({s, s});
  for (const auto& o : model.observables)
    for (Index r = 0; r < o.op.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(o.op, r); it; ++it) {
        int a = lay.sector[it.col()], b = lay.sector[it.row()];  // rho(col,row)
        need.insert({std::min(a, b), std::max(a, b)});
      }
  Index total = 0;
  for (const auto& pr : need) {
    lay.pair_index[pr] = static_cast<int>(lay.pairs.size());
    lay.pairs.push_back(pr);
    lay.offset.push_back(total);
    total += static_cast<Index>(lay.members[pr.first].size() * lay.members[pr.second].size());
  }

  auto locate = [&](Index row, Index col) {  // entry rho(row, col)
    int a = lay.sector[row], b = lay.sector[col];
    bool conj = a > b;
    if (conj) {
      std::swap(a, b);
      std::swap(row, col);
    }
    int p = lay.pair_index.at({a, b});
    Index ds = static_cast<Index>(lay.members[a].size());
    return ObsEntry{1.0, p, lay.offset[p] + lay.local[col] * ds + lay.local[row], conj};
  };

  std::vector<std::vector<ObsEntry>> obs(model.observables.size());
  for (size_t o = 0; o < model.observables.size(); ++o) {
    const auto& op = model.observables[o].op;
    for (Index r = 0; r < op.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(op, r); it; ++it) {
        ObsEntry e = locate(it.col(), it.row());
        e.coeff = it.value();
        obs[o].push_back(e);
      }
  }
  std::vector<Index> diag_pos;
  for (Index i = 0; i < d; ++i) diag_pos.push_back(locate(i, i).pos);

  CVector y(total);
  for (size_t p = 0; p < lay.pairs.size(); ++p) {
    auto [s, sp] = lay.pairs[p];
    const auto &ms = lay.members[s], &msp = lay.members[sp];
    Eigen::Map<CMatrix> R(y.data() + lay.offset[p], static_cast<Index>(ms.size()), static_cast<Index>(msp.size()));
    for (size_t i = 0; i < ms.size(); ++i)
      for (size_t j = 0; j < msp.size(); ++j) R(i, j) = rho0.entries(ms[i], msp[j]);
  }

  SectorRhs f;
  f.lay = &lay;
  SparseMatrix decay(d, d);
  std::vector<const Jump*> active;
  for (const auto& j : model.jumps) {
    if (j.rate == 0.0) continue;
    active.push_back(&j);
    decay += SparseMatrix(j.rate * SparseMatrix(j.op.entries().adjoint()) * j.op.entries());
  }
  SparseMatrix A = SparseMatrix(Complex(0.0, -1.0) * model.hamiltonian.entries()) - SparseMatrix(0.5 * decay);
  for (int s = 0; s < static_cast<int>(lay.members.size()); ++s) f.A.push_back(restrict_to(A, lay, s));
  for (const Jump* j : active) {
    f.rate.push_back(j->rate);
    f.L.emplace_back();
    for (int s = 0; s < static_cast<int>(lay.members.size()); ++s) f.L.back().push_back(restrict_to(j->op.entries(), lay, s));
  }

  EvolutionRecord rec;
  rec.partial_state = true;
  for (const auto& o : model.observables) rec.names.push_back(o.name);
  rec.values.assign(rec.names.size(), {});
  double last_good = opt.t0;

  auto hermitize_diagonal_blocks = [&](bool measure) {
    double defect = 0.0;
    for (size_t p = 0; p < lay.pairs.size(); ++p) {
      auto [s, sp] = lay.pairs[p];
      if (s != sp) continue;
      Index ds = static_cast<Index>(lay.members[s].size());
      Eigen::Map<CMatrix> R(y.data() + lay.offset[p], ds, ds);
      if (measure) defect = std::max(defect, hermiticity_defect(CMatrix(R)));
      else R = 0.5 * (R + R.adjoint()).eval();
    }
    return defect;
  };

  auto record = [&](double t) {
    SampleDiagnostics diag;
    Complex tr = 0.0;
    for (Index pos : diag_pos) tr += y(pos);
    diag.trace_dev = std::abs(tr - 1.0);
    diag.herm_defect = hermitize_diagonal_blocks(true);
    diag.min_eig = std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(diag.trace_dev) || diag.trace_dev > 1e-6)
      throw IntegrationError("trace drift beyond 1e-6 at t = " + std::to_string(t), last_good);
    if (diag.trace_dev > 1e-7 || diag.herm_defect > 1e-8) rec.failed = true;
    rec.times.push_back(t);
    for (size_t o = 0; o < obs.size(); ++o) {
      Complex v = 0.0;
      for (const auto& e : obs[o]) v += e.coeff * (e.conj ? std::conj(y(e.pos)) : y(e.pos));
      rec.values[o].push_back(v.real() * model.observables[o].scale);
    }
    rec.diagnostics.push_back(diag);
    last_good = t;
  };

  double t = opt.t0;
  record(t);
  if (opt.exact_blocks) {
    // vec(A R B) = (B^T kron A) vec(R), column stacking.
    const double dt = samples > 1 ? t_end / (samples - 1) : 0.0;
    std::vector<CMatrix> prop;
    for (auto [s, sp] : lay.pairs) {
      CMatrix As = f.A[s], Asp = f.A[sp];
      const Index ds = As.rows(), dsp = Asp.rows();
      CMatrix gen = CMatrix::Zero(ds * dsp, ds * dsp);
      for (Index j = 0; j < dsp; ++j) gen.block(j * ds, j * ds, ds, ds) += As;
      for (Index j = 0; j < dsp; ++j)
        for (Index l = 0; l < dsp; ++l)
          if (Asp(j, l) != Complex(0.0))
            gen.block(j * ds, l * ds, ds, ds).diagonal().array() += std::conj(Asp(j, l));
      for (size_t k = 0; k < f.L.size(); ++k) {
        CMatrix Ls = f.L[k][s], Lsp = f.L[k][sp];
        for (Index j = 0; j < dsp; ++j)
          for (Index l = 0; l < dsp; ++l)
            if (Lsp(j, l) != Complex(0.0)) gen.block(j * ds, l * ds, ds, ds) += f.rate[k] * std::conj(Lsp(j, l)) * Ls;
      }
      gen *= dt;
      bool conj = false;
      const CMatrix* hit = opt.cache ? opt.cache->find(gen, conj) : nullptr;
      if (hit) prop.push_back(conj ? CMatrix(hit->conjugate()) : *hit);
      else if (opt.cache) prop.push_back(opt.cache->insert(gen, gen.exp()));
      else prop.push_back(gen.exp());
    }
    for (int s = 1; s < samples; ++s) {
      for (size_t p = 0; p < lay.pairs.size(); ++p) {
        Index n = prop[p].rows();
        CVector seg = prop[p] * y.segment(lay.offset[p], n);
        y.segment(lay.offset[p], n) = seg;
      }
      t = opt.t0 + t_end * s / (samples - 1);
      record(t);
      hermitize_diagonal_blocks(false);
    }
  } else {
    RkOptions ro;
    ro.method = opt.method;
    ro.rtol = opt.tol;
    ro.atol = opt.tol;
    AdaptiveRk<CVector, SectorRhs> rk(std::move(f), ro);
    for (int s = 1; s < samples; ++s) {
      try {
        rk.advance(t, y, opt.t0 + t_end * s / (samples - 1));
      } catch (const IntegrationError& e) {
        throw IntegrationError(e.what(), last_good);
      }
      record(t);
      hermitize_diagonal_blocks(false);
    }
    rec.stats = rk.stats();
  }

  CMatrix rho = CMatrix::Zero(d, d);
  for (size_t p = 0; p < lay.pairs.size(); ++p) {
    auto [s, sp] = lay.pairs[p];
    const auto &ms = lay.members[s], &msp = lay.members[sp];
    Eigen::Map<const CMatrix> R(y.data() + lay.offset[p], static_cast<Index>(ms.size()), static_cast<Index>(msp.size()));
    for (size_t i = 0; i < ms.size(); ++i)
      for (size_t j = 0; j < msp.size(); ++j) {
        rho(ms[i], msp[j]) = R(i, j);
        rho(msp[j], ms[i]) = std::conj(R(i, j));
      }
  }
  rec.final_state = DensityMatrix{std::move(rho), model.basis()};
  return rec;
}
}  // namespace

EvolutionRecord integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t_end, int samples,
                                 double tol) {
  IntegrateOptions opt;
  opt.tol = tol;
  return integrate_master(model, rho0, t_end, samples, opt);
}

EvolutionRecord integrate_master(const LindbladModel& model, const DensityMatrix& rho0, double t_end, int samples,
                                 const IntegrateOptions& opt) {
  model.validate();
  const Index d = model.dim();
  if (rho0.dim() != d) throw ArgumentError("initial state dimension does not match the model");
  if (d > opt.capacity) throw CapacityError("density matrix dimension " + std::to_string(d) + " exceeds capacity");
  if (samples < 2) throw ArgumentError("need at least two samples");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ArgumentError("t_end must be finite and non-negative");
  if (!(opt.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  if (!opt.sectors.empty()) return integrate_sectors(model, rho0, t_end, samples, opt);

  EvolutionRecord rec;
  for (const auto& o : model.observables) rec.names.push_back(o.name);
  rec.values.assign(rec.names.size(), {});

  bool diagonal = opt.allow_fast_path && is_diagonal(model.hamiltonian.entries());
  for (const auto& j : model.jumps) diagonal = diagonal && is_diagonal(j.op.entries());
  rec.fast_path = diagonal;

  std::vector<int> eig_at;
  if (d <= opt.eig_check_max_dim && opt.eig_checks > 0) {
    int n = std::min(opt.eig_checks, samples);
    for (int i = 0; i < n; ++i) eig_at.push_back(n == 1 ? samples - 1 : (samples - 1) * i / (n - 1));
  }

  CMatrix rho = rho0.entries;
  double last_good = opt.t0;
  auto record = [&](int s, double t) {
    SampleDiagnostics diag;
    diag.trace_dev = std::abs(rho.trace() - 1.0);
    diag.herm_defect = hermiticity_defect(rho);
    diag.min_eig = std::numeric_limits<double>::quiet_NaN();
    if (std::find(eig_at.begin(), eig_at.end(), s) != eig_at.end()) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
      diag.min_eig = es.eigenvalues().minCoeff();
    }
    if (!std::isfinite(diag.trace_dev) || diag.trace_dev > 1e-6)
      throw IntegrationError("trace drift beyond 1e-6 at t = " + std::to_string(t), last_good);
    if (diag.trace_dev > 1e-7 || diag.herm_defect > 1e-8 || diag.min_eig < -1e-7) rec.failed = true;
    rec.times.push_back(t);
    for (size_t o = 0; o < model.observables.size(); ++o)
      rec.values[o].push_back(trace_product_real(model.observables[o].op, rho) * model.observables[o].scale);
    rec.diagnostics.push_back(diag);
    last_good = t;
  };

  auto sample_time = [&](int s) { return opt.t0 + t_end * s / (samples - 1); };

  if (diagonal) {
    RVector h = RVector(model.hamiltonian.entries().diagonal().real());
    CMatrix lam = CMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index k = 0; k < d; ++k) lam(i, k) = Complex(0.0, -(h(i) - h(k)));
    for (const auto& j : model.jumps) {
      CVector l = j.op.entries().diagonal();
      for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k)
          lam(i, k) += j.rate * (l(i) * std::conj(l(k)) - 0.5 * std::norm(l(i)) - 0.5 * std::norm(l(k)));
    }
    for (int s = 0; s < samples; ++s) {
      double dt = sample_time(s) - opt.t0;
      rho = rho0.entries.cwiseProduct(CMatrix((lam * dt).array().exp()));
      record(s, sample_time(s));
    }
  } else {
    LindbladRhs f;
    SparseMatrix decay(d, d);
    for (const auto& j : model.jumps) {
      if (j.rate == 0.0) continue;
      f.L.push_back(j.op.entries());
      f.rate.push_back(j.rate);
      decay += SparseMatrix(j.rate * SparseMatrix(j.op.entries().adjoint()) * j.op.entries());
    }
    f.A = SparseMatrix(Complex(0.0, -1.0) * model.hamiltonian.entries()) - SparseMatrix(0.5 * decay);
    f.A.makeCompressed();
    RkOptions ro;
    ro.method = opt.method;
    ro.rtol = opt.tol;
    ro.atol = opt.tol;
    AdaptiveRk<CMatrix, LindbladRhs> rk(std::move(f), ro);
    double t = opt.t0;
    record(0, t);
    for (int s = 1; s < samples; ++s) {
      try {
        rk.advance(t, rho, sample_time(s));
      } catch (const IntegrationError& e) {
        throw IntegrationError(e.what(), last_good);
      }
      record(s, t);
      rho = 0.5 * (rho + rho.adjoint()).eval();
    }
    rec.stats = rk.stats();
  }
  rec.final_state = DensityMatrix{rho, model.basis()};
  return rec;
}

CMatrix liouvillian(const LindbladModel& model) {
  model.validate();
  const Index d = model.dim();
  if (d > 40) throw CapacityError("explicit superoperator limited to dim <= 40");
  CMatrix H = model.hamiltonian.dense();
  CMatrix I = CMatrix::Identity(d, d);
  auto kron = [](const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  CMatrix Lv = Complex(0.0, -1.0) * (kron(I, H) - kron(H.transpose(), I));
  for (const auto& j : model.jumps) {
    CMatrix L = j.op.dense();
    CMatrix LdL = L.adjoint() * L;
    Lv += j.rate * (kron(L.conjugate(), L) - 0.5 * kron(I, LdL) - 0.5 * kron(LdL.transpose(), I));
  }
  return Lv;
}

void write_csv(std::ostream& os, const EvolutionRecord& rec) {
  os << 't';
  for (const auto& n : rec.names) os << ',' << n;
  os << ",trace_dev,herm_defect\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (size_t s = 0; s < rec.times.size(); ++s) {
    put(rec.times[s]);
    for (const auto& series : rec.values) {
      os << ',';
      put(series[s]);
    }
    os << ',';
    put(rec.diagnostics[s].trace_dev);
    os << ',';
    put(rec.diagnostics[s].herm_defect);
    os << '\n';
  }
}

LindbladModel reversed_hamiltonian(const LindbladModel& model) {
  LindbladModel r = model;
  r.hamiltonian = OperatorMatrix(SparseMatrix(-1.0 * model.hamiltonian.entries()), model.hamiltonian.basis(), true);
  return r;
}

}  // namespace becq
