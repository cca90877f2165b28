#pragma once

#include <span>
#include <vector>

#include "wbcol/state.hpp"

namespace wbcol {

// Uniform 1D mesh over [a, b]. Cell i spans [interface(i), interface(i+1)].
struct Mesh {
  double a = 0.0;
  double b = 1.0;
  int n_cells = 1;
  double dx = 1.0;

  double interface(int i) const { return a + (b - a) * (static_cast<double>(i) / n_cells); }
  double cell_center(int i) const { return a + (i + 0.5) * dx; }
};

// Throws std::invalid_argument unless b > a and n >= 1.
Mesh make_uniform_mesh(double a, double b, int n);

// Gauss-Legendre nodes/weights on the unit interval; s in {1, 2}.
struct QuadratureRule {
  int stages = 1;
  std::array<double, 2> node{};    // c_m in (0,1), strictly increasing
  std::array<double, 2> weight{};  // b_m, sum 1

  double physical_node(const Mesh& mesh, int cell, int m) const {
    return mesh.interface(cell) + node[m] * mesh.dx;
  }
};

QuadratureRule gauss_legendre_rule(int s);

// sum_m b_m * values[m]; length must match the rule's stage count.
StateVec quadrature_average(std::span<const StateVec> values_at_nodes,
                            const QuadratureRule& rule);

}  // namespace wbcol
