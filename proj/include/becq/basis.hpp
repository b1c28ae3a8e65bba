#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "becq/spin_core.hpp"

namespace becq {

// Enumerated bosonic occupation states over a fixed set of modes.
class MultiModeBasis {
 public:
  using Occupation = std::vector<int>;

  // All tuples with n_1 + ... + n_modes = total_N, in lexicographic order.
  static MultiModeBasis conserved(int mode_count, int total_N);
  // Tuples with 0 <= n_i <= max_per_mode[i] accepted by keep.
  static MultiModeBasis filtered(std::vector<int> max_per_mode, const std::function<bool(const Occupation&)>& keep,
                                 std::string label);

  int mode_count() const { return modes_; }
  int total_N() const { return total_; }  // -1 when not conserved
  Index size() const { return static_cast<Index>(states_.size()); }
  const Occupation& state(Index i) const { return states_.at(i); }
  const std::vector<Occupation>& states() const { return states_; }
  std::optional<Index> index_of(const Occupation& occ) const;
  BasisTag tag() const { return {label_, size()}; }

 private:
  int modes_ = 0;
  int total_ = -1;
  std::string label_;
  std::vector<Occupation> states_;
  std::map<Occupation, Index> index_;
};

struct Ladder {
  int mode = 0;
  bool dagger = false;
};

inline Ladder create(int mode) { return {mode, true}; }
inline Ladder annihilate(int mode) { return {mode, false}; }

// coeff * ops[0] ops[1] ... ops[n-1] with the rightmost operator applied
// first. Transitions leaving the enumerated set are dropped.
SparseMatrix ladder_product(const MultiModeBasis& basis, const std::vector<Ladder>& ops, Complex coeff = 1.0);

// I (x) ... (x) op (x) ... (x) I for a product of sites with the given dims.
SparseMatrix embed_site_operator(const SparseMatrix& op, int site, const std::vector<Index>& dims);

SparseMatrix sparse_identity(Index dim);
bool is_diagonal(const SparseMatrix& m);

}  // namespace becq
