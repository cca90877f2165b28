#include "wbcol/state.hpp"

namespace wbcol {

bool solve_linear(const SmallMat& A, const StateVec& rhs, StateVec& out,
                  double eps_rel, double* pivot_ratio) {
  const int n = A.size();
  assert(rhs.size() == n);

  double a[3][3];
  double b[3];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a[r][c] = A(r, c);
    b[r] = rhs[r];
  }

  const double scale = std::max(A.max_abs(), 1e-300);
  double min_pivot = scale;

  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r)
      if (std::fabs(a[r][k]) > std::fabs(a[p][k])) p = r;
    if (p != k) {
      for (int c = 0; c < n; ++c) std::swap(a[k][c], a[p][c]);
      std::swap(b[k], b[p]);
    }
    min_pivot = std::min(min_pivot, std::fabs(a[k][k]));
    if (std::fabs(a[k][k]) <= eps_rel * scale) {
      if (pivot_ratio) *pivot_ratio = min_pivot / scale;
      return false;
    }
    for (int r = k + 1; r < n; ++r) {
      const double f = a[r][k] / a[k][k];
      for (int c = k + 1; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  if (pivot_ratio) *pivot_ratio = min_pivot / scale;

  StateVec x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  out = x;
  return true;
}

}  // namespace wbcol
