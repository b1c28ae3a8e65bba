#include "becq/basis.hpp"

#include <cmath>

namespace becq {

namespace {

void enumerate(std::vector<int>& cur, int mode, const std::vector<int>& maxn,
               const std::function<bool(const MultiModeBasis::Occupation&)>& keep,
               std::vector<MultiModeBasis::Occupation>& out) {
  if (mode == static_cast<int>(maxn.size())) {
    if (keep(cur)) out.push_back(cur);
    return;
  }
  for (int n = 0; n <= maxn[mode]; ++n) {
    cur[mode] = n;
    enumerate(cur, mode + 1, maxn, keep, out);
  }
}

}  // namespace

MultiModeBasis MultiModeBasis::conserved(int mode_count, int total_N) {
  if (mode_count < 1 || total_N < 0) throw ArgumentError("invalid mode basis parameters");
  MultiModeBasis b = filtered(std::vector<int>(mode_count, total_N),
                              [total_N](const Occupation& o) {
                                int s = 0;
                                for (int n : o) s += n;
                                return s == total_N;
                              },
                              "modes" + std::to_string(mode_count) + ":N" + std::to_string(total_N));
  b.total_ = total_N;
  return b;
}

MultiModeBasis MultiModeBasis::filtered(std::vector<int> max_per_mode,
                                        const std::function<bool(const Occupation&)>& keep, std::string label) {
  if (max_per_mode.empty()) throw ArgumentError("basis needs at least one mode");
  double full = 1.0;
  for (int m : max_per_mode) {
    if (m < 0) throw ArgumentError("negative occupation cap");
    full *= m + 1.0;
  }
  if (full > 5e7) throw CapacityError("mode enumeration too large");
  MultiModeBasis b;
  b.modes_ = static_cast<int>(max_per_mode.size());
  b.label_ = std::move(label);
  std::vector<int> cur(max_per_mode.size(), 0);
  enumerate(cur, 0, max_per_mode, keep, b.states_);
  for (Index i = 0; i < b.size(); ++i) b.index_.emplace(b.states_[i], i);
  if (b.states_.empty()) throw ArgumentError("basis is empty");
  return b;
}

std::optional<Index> MultiModeBasis::index_of(const Occupation& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseMatrix ladder_product(const MultiModeBasis& basis, const std::vector<Ladder>& ops, Complex coeff) {
  for (const auto& op : ops)
    if (op.mode < 0 || op.mode >= basis.mode_count()) throw ArgumentError("ladder operator on a missing mode");
  std::vector<Triplet> trip;
  for (Index col = 0; col < basis.size(); ++col) {
    MultiModeBasis::Occupation occ = basis.state(col);
    double amp = 1.0;
    for (auto it = ops.rbegin(); it != ops.rend() && amp != 0.0; ++it) {
      int& n = occ[it->mode];
      if (it->dagger) {
        amp *= std::sqrt(n + 1.0);
        ++n;
      } else {
        amp *= std::sqrt(static_cast<double>(n));
        --n;
      }
    }
    if (amp == 0.0) continue;
    if (auto row = basis.index_of(occ)) trip.emplace_back(*row, col, coeff * amp);
  }
  SparseMatrix m(basis.size(), basis.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix embed_site_operator(const SparseMatrix& op, int site, const std::vector<Index>& dims) {
  if (site < 0 || site >= static_cast<int>(dims.size())) throw ArgumentError("site out of range");
  if (op.rows() != dims[site]) throw ArgumentError("site operator dimension mismatch");
  Index left = 1, right = 1;
  for (int n = 0; n < site; ++n) left *= dims[n];
  for (size_t n = site + 1; n < dims.size(); ++n) right *= dims[n];
  const Index d = dims[site], total = left * d * right;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(op.nonZeros() * left * right));
  for (Index r = 0; r < op.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(op, r); it; ++it)
      for (Index l = 0; l < left; ++l)
        for (Index q = 0; q < right; ++q)
          trip.emplace_back((l * d + it.row()) * right + q, (l * d + it.col()) * right + q, it.value());
  SparseMatrix m(total, total);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix sparse_identity(Index dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return m;
}

bool is_diagonal(const SparseMatrix& m) {
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      if (it.row() != it.col() && it.value() != Complex(0.0)) return false;
  return true;
}

}  // namespace becq
