#pragma once

#include <vector>

#include "wbcol/state.hpp"

namespace wbcol {

// Cell-average storage with ghost layers on both sides. Valid cell indices
// run from -n_ghost to n_cells + n_ghost - 1.
class FieldAverages {
 public:
  FieldAverages() = default;
  FieldAverages(int n_vars, int n_cells, int n_ghost)
      : n_vars_(n_vars),
        n_cells_(n_cells),
        n_ghost_(n_ghost),
        data_((n_cells + 2 * n_ghost) * n_vars, 0.0) {}

  int n_vars() const { return n_vars_; }
  int n_cells() const { return n_cells_; }
  int n_ghost() const { return n_ghost_; }

  StateVec get(int i) const {
    const double* p = ptr(i);
    StateVec u(n_vars_);
    for (int c = 0; c < n_vars_; ++c) u[c] = p[c];
    return u;
  }
  void set(int i, const StateVec& u) {
    double* p = ptr(i);
    for (int c = 0; c < n_vars_; ++c) p[c] = u[c];
  }

 private:
  const double* ptr(int i) const {
    assert(i >= -n_ghost_ && i < n_cells_ + n_ghost_);
    return data_.data() + (i + n_ghost_) * n_vars_;
  }
  double* ptr(int i) {
    assert(i >= -n_ghost_ && i < n_cells_ + n_ghost_);
    return data_.data() + (i + n_ghost_) * n_vars_;
  }

  int n_vars_ = 0;
  int n_cells_ = 0;
  int n_ghost_ = 0;
  std::vector<double> data_;
};

}  // namespace wbcol
