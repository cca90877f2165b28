#include "wbcol/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace wbcol {

Mesh make_uniform_mesh(double a, double b, int n) {
  if (!(b > a)) throw std::invalid_argument("make_uniform_mesh: requires b > a");
  if (n < 1) throw std::invalid_argument("make_uniform_mesh: requires n >= 1");
  Mesh m;
  m.a = a;
  m.b = b;
  m.n_cells = n;
  m.dx = (b - a) / n;
  return m;
}

QuadratureRule gauss_legendre_rule(int s) {
  QuadratureRule r;
  r.stages = s;
  if (s == 1) {
    r.node = {0.5, 0.0};
    r.weight = {1.0, 0.0};
  } else if (s == 2) {
    const double off = std::sqrt(3.0) / 6.0;
    r.node = {0.5 - off, 0.5 + off};
    r.weight = {0.5, 0.5};
  } else {
    throw std::invalid_argument("gauss_legendre_rule: only s in {1,2} supported");
  }
  return r;
}

StateVec quadrature_average(std::span<const StateVec> values_at_nodes,
                            const QuadratureRule& rule) {
  if (static_cast<int>(values_at_nodes.size()) != rule.stages)
    throw std::invalid_argument("quadrature_average: values/stages length mismatch");
  StateVec avg(values_at_nodes[0].size());
  for (int m = 0; m < rule.stages; ++m) avg.axpy(rule.weight[m], values_at_nodes[m]);
  return avg;
}

}  // namespace wbcol
