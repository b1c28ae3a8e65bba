#include "becq/algorithms.hpp"

#include <cmath>
#include <istream>
#include <random>
#include <set>
#include <sstream>

namespace becq {

int SpinProductTerm::order() const {
  int n = 0;
  for (const auto& f : factors) n += f.axis != Axis::I;
  return n;
}

void SpinProductTerm::validate(int site_count) const {
  std::set<int> seen;
  for (const auto& f : factors) {
    if (f.site < 0 || f.site >= site_count)
      throw ArgumentError("term factor on site " + std::to_string(f.site + 1) + " outside the register");
    if (!seen.insert(f.site).second) throw ArgumentError("term has two factors on the same site");
  }
  if (!std::isfinite(coeff)) throw ArgumentError("term coefficient is not finite");
}

std::string oracle_name(OracleId id) {
  switch (id) {
    case OracleId::const00: return "const00";
    case OracleId::const11: return "const11";
    case OracleId::bal01: return "bal01";
    case OracleId::bal10: return "bal10";
  }
  return "?";
}

OracleId oracle_from_name(const std::string& name) {
  for (OracleId id : {OracleId::const00, OracleId::const11, OracleId::bal01, OracleId::bal10})
    if (oracle_name(id) == name) return id;
  throw ArgumentError("unknown oracle '" + name + "'");
}

Schedule map_qubit_schedule(const Schedule& qubit_steps, int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  Schedule out;
  for (const auto& step : qubit_steps) {
    if (step.time < 0) throw ArgumentError("negative step time");
    GateStep g{{}, step.time / N};
    for (const auto& t : step.hamiltonian) {
      SpinProductTerm m = t;
      switch (t.order()) {
        case 0: m.coeff = t.coeff * N * N; break;
        case 1: m.coeff = t.coeff * N; break;
        case 2: break;
        default: throw UnsupportedMappingError("terms acting on three or more sites have no mapping");
      }
      g.hamiltonian.push_back(std::move(m));
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

struct SiteEigen {
  CMatrix V;
  RVector d;
};

SiteEigen site_eigen(Axis a, int N) {
  if (a == Axis::Z) {
    SiteEigen e{CMatrix::Identity(N + 1, N + 1), RVector(N + 1)};
    for (int k = 0; k <= N; ++k) e.d(k) = 2.0 * k - N;
    return e;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(spin_operator(a, N).dense());
  return {es.eigenvectors(), es.eigenvalues()};
}

void apply_term(CVector& v, const std::vector<int>& site_N, const SpinProductTerm& t) {
  for (const auto& f : t.factors)
    if (f.axis != Axis::I) apply_site_matrix(v, site_N, f.site, spin_operator(f.axis, site_N[f.site]).dense());
  v *= t.coeff;
}

bool terms_commute(const BecRegister& reg, const SpinProductTerm& a, const SpinProductTerm& b) {
  std::set<int> sa;
  for (const auto& f : a.factors)
    if (f.axis != Axis::I) sa.insert(f.site);
  bool shared = false;
  for (const auto& f : b.factors) shared |= f.axis != Axis::I && sa.count(f.site);
  if (!shared) return true;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  double scale = std::abs(a.coeff * b.coeff);
  for (const auto* t : {&a, &b})
    for (const auto& f : t->factors)
      if (f.axis != Axis::I) scale *= reg.site_N()[f.site];
  for (int trial = 0; trial < 2; ++trial) {
    CVector v(reg.dim());
    for (Index i = 0; i < v.size(); ++i) v(i) = Complex(nd(rng), nd(rng));
    v.normalize();
    CVector ab = v, ba = v;
    apply_term(ab, reg.site_N(), b);
    apply_term(ab, reg.site_N(), a);
    apply_term(ba, reg.site_N(), a);
    apply_term(ba, reg.site_N(), b);
    if ((ab - ba).norm() > 1e-9 * std::max(scale, 1.0)) return false;
  }
  return true;
}

void exponentiate_term(CVector& v, const std::vector<int>& site_N, const SpinProductTerm& t, double time) {
  if (t.order() == 0) {
    v *= std::polar(1.0, -t.coeff * time);
    return;
  }
  std::vector<int> sites;
  std::vector<SiteEigen> eig;
  for (const auto& f : t.factors) {
    if (f.axis == Axis::I) continue;
    sites.push_back(f.site);
    eig.push_back(site_eigen(f.axis, site_N[f.site]));
  }
  for (size_t i = 0; i < sites.size(); ++i)
    if (!eig[i].V.isIdentity()) apply_site_matrix(v, site_N, sites[i], eig[i].V.adjoint());
  std::vector<Index> strides(site_N.size(), 1);
  for (int n = static_cast<int>(site_N.size()) - 2; n >= 0; --n) strides[n] = strides[n + 1] * (site_N[n + 1] + 1);
  for (Index idx = 0; idx < v.size(); ++idx) {
    double e = t.coeff;
    for (size_t i = 0; i < sites.size(); ++i) e *= eig[i].d((idx / strides[sites[i]]) % (site_N[sites[i]] + 1));
    v(idx) *= std::polar(1.0, -e * time);
  }
  for (size_t i = 0; i < sites.size(); ++i)
    if (!eig[i].V.isIdentity()) apply_site_matrix(v, site_N, sites[i], eig[i].V);
}

}  // namespace

BecRegister run_schedule(const BecRegister& reg, const Schedule& steps) {
  CVector v = reg.amps();
  BecRegister probe = reg;
  for (const auto& step : steps) {
    if (step.time < 0) throw ArgumentError("negative step time");
    for (const auto& t : step.hamiltonian) t.validate(reg.sites());
    for (size_t i = 0; i < step.hamiltonian.size(); ++i)
      for (size_t j = i + 1; j < step.hamiltonian.size(); ++j)
        if (!terms_commute(probe, step.hamiltonian[i], step.hamiltonian[j]))
          throw ArgumentError("step contains non-commuting terms; split it into separate steps");
    // Commuting terms: the exponential of the sum factorizes.
    for (const auto& t : step.hamiltonian) exponentiate_term(v, reg.site_N(), t, step.time);
  }
  return BecRegister(reg.site_N(), std::move(v));
}

std::vector<SpinProductTerm> deutsch_hamiltonian(const DeutschOracle& o) {
  const double N = o.N;
  const SpinFactor z1{0, Axis::Z}, z2{1, Axis::Z};
  switch (o.id) {
    case OracleId::const00: return {};
    case OracleId::const11: return {{2.0 * N, {z2}}};
    case OracleId::bal01: return {{1.0, {z1, z2}}, {N, {z2}}, {-N * N, {}}};
    case OracleId::bal10: return {{-1.0, {z1, z2}}, {N, {z2}}, {-N * N, {}}};
  }
  return {};
}

double deutsch_time(int N) { return kPi / (2.0 * N); }

double teleportation_entangling_time(int N) {
  if (N < 1) throw ArgumentError("particle count must be at least 1");
  return 1.0 / std::sqrt(2.0 * N);
}

DeutschResult run_deutsch(const DeutschOracle& o) {
  if (o.N < 1) throw ArgumentError("particle count must be at least 1");
  const double r = 1.0 / std::sqrt(2.0);
  BecRegister reg = tensor({make_coherent(CoherentParams::from_amplitudes(r, r, o.N)),
                            make_coherent(CoherentParams::from_amplitudes(1.0, 0.0, o.N))});
  BecRegister out = run_schedule(reg, {{deutsch_hamiltonian(o), deutsch_time(o.N)}});
  CVector sx = out.amps();
  apply_site_matrix(sx, out.site_N(), 0, spin_operator(Axis::X, o.N).dense());
  DeutschResult res;
  res.readout = out.amps().dot(sx).real() / o.N;
  res.classification = res.readout > 0 ? Classification::constant : Classification::balanced;
  return res;
}

namespace {

double to_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

int to_int(const std::string& s, int line) {
  double v = to_double(s, line);
  if (v != std::floor(v)) throw ArgumentError("line " + std::to_string(line) + ": expected an integer");
  return static_cast<int>(v);
}

}  // namespace

ScheduleFile parse_schedule(std::istream& in) {
  ScheduleFile f;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (tok[0] == "sites") {
      f.site_N.clear();
      for (size_t i = 1; i < tok.size(); ++i) f.site_N.push_back(to_int(tok[i], lineno));
      if (f.site_N.empty()) throw ArgumentError(where + "sites needs at least one count");
    } else if (tok[0] == "init") {
      if (tok.size() != 6) throw ArgumentError(where + "init takes a site and four numbers");
      Complex a(to_double(tok[2], lineno), to_double(tok[3], lineno));
      Complex b(to_double(tok[4], lineno), to_double(tok[5], lineno));
      const int site = to_int(tok[1], lineno);
      if (site < 1) throw ArgumentError(where + "sites are numbered from 1");
      f.inits.push_back({site - 1, {a, b}});
    } else if (tok[0] == "term") {
      GateStep step;
      size_t i = 0;
      bool have_time = false;
      while (i < tok.size()) {
        if (tok[i] == ";") {
          if (i + 2 != tok.size()) throw ArgumentError(where + "expected exactly one time after ';'");
          step.time = to_double(tok[i + 1], lineno);
          have_time = true;
          break;
        }
        if (tok[i] != "term") throw ArgumentError(where + "expected 'term', got '" + tok[i] + "'");
        if (i + 1 >= tok.size()) throw ArgumentError(where + "term without coefficient");
        SpinProductTerm t{to_double(tok[i + 1], lineno), {}};
        i += 2;
        while (i < tok.size() && tok[i] != "term" && tok[i] != ";") {
          auto c = tok[i].find(':');
          if (c == std::string::npos || c + 2 != tok[i].size())
            throw ArgumentError(where + "factor must look like <site>:<axis>, got '" + tok[i] + "'");
          const int site = to_int(tok[i].substr(0, c), lineno);
          if (site < 1) throw ArgumentError(where + "sites are numbered from 1");
          t.factors.push_back({site - 1, axis_from_char(tok[i][c + 1])});
          ++i;
        }
        step.hamiltonian.push_back(std::move(t));
      }
      if (!have_time) throw ArgumentError(where + "missing '; <time>'");
      if (step.time < 0) throw ArgumentError(where + "negative time");
      f.steps.push_back(std::move(step));
    } else {
      throw ArgumentError(where + "unknown directive '" + tok[0] + "'");
    }
  }
  return f;
}

std::string format_schedule(const Schedule& steps) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& s : steps) {
    for (const auto& t : s.hamiltonian) {
      os << "term " << t.coeff;
      for (const auto& f : t.factors) os << ' ' << f.site + 1 << ':' << axis_char(f.axis);
      os << ' ';
    }
    if (s.hamiltonian.empty()) os << "term 0 ";
    os << "; " << s.time << '\n';
  }
  return os.str();
}

}  // namespace becq
