#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>

namespace wbcol {

// Small dense state vector. The largest system shipped here is Euler (N = 3),
// so storage is inline and fixed.
class StateVec {
 public:
  static constexpr int kMaxVars = 3;

  StateVec() = default;
  explicit StateVec(int n, double fill = 0.0) : n_(n) {
    assert(n >= 0 && n <= kMaxVars);
    for (int i = 0; i < n_; ++i) c_[i] = fill;
  }
  StateVec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    assert(n_ <= kMaxVars);
    int i = 0;
    for (double x : xs) c_[i++] = x;
  }

  int size() const { return n_; }
  double& operator[](int i) {
    assert(i >= 0 && i < n_);
    return c_[i];
  }
  double operator[](int i) const {
    assert(i >= 0 && i < n_);
    return c_[i];
  }

  StateVec& operator+=(const StateVec& o) {
    assert(o.n_ == n_);
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  StateVec& operator-=(const StateVec& o) {
    assert(o.n_ == n_);
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  StateVec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend StateVec operator+(StateVec a, const StateVec& b) { return a += b; }
  friend StateVec operator-(StateVec a, const StateVec& b) { return a -= b; }
  friend StateVec operator*(double s, StateVec a) { return a *= s; }
  friend StateVec operator*(StateVec a, double s) { return a *= s; }

  // this += s * o, no temporary
  void axpy(double s, const StateVec& o) {
    assert(o.n_ == n_);
    for (int i = 0; i < n_; ++i) c_[i] += s * o.c_[i];
  }

  double inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) m = std::max(m, std::fabs(c_[i]));
    return m;
  }
  bool finite() const {
    for (int i = 0; i < n_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

 private:
  std::array<double, kMaxVars> c_{};
  int n_ = 0;
};

inline double inf_dist(const StateVec& a, const StateVec& b) {
  return (a - b).inf_norm();
}

// Dense n x n matrix, n <= 3.
class SmallMat {
 public:
  SmallMat() = default;
  explicit SmallMat(int n) : n_(n) { assert(n >= 0 && n <= StateVec::kMaxVars); }

  int size() const { return n_; }
  double& operator()(int r, int c) {
    assert(r >= 0 && r < n_ && c >= 0 && c < n_);
    return m_[r][c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < n_ && c >= 0 && c < n_);
    return m_[r][c];
  }

  StateVec apply(const StateVec& x) const {
    assert(x.size() == n_);
    StateVec y(n_);
    for (int r = 0; r < n_; ++r) {
      double s = 0.0;
      for (int c = 0; c < n_; ++c) s += m_[r][c] * x[c];
      y[r] = s;
    }
    return y;
  }

  double max_abs() const {
    double m = 0.0;
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) m = std::max(m, std::fabs(m_[r][c]));
    return m;
  }

 private:
  std::array<std::array<double, StateVec::kMaxVars>, StateVec::kMaxVars> m_{};
  int n_ = 0;
};

// Gaussian elimination with partial pivoting. Returns false when the smallest
// pivot falls below eps_rel relative to the matrix scale; out is untouched in
// that case. pivot_ratio (optional) receives min|pivot| / max|A|.
bool solve_linear(const SmallMat& A, const StateVec& rhs, StateVec& out,
                  double eps_rel = 1e-13, double* pivot_ratio = nullptr);

}  // namespace wbcol
