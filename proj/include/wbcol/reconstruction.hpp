#pragma once

#include <span>

#include "wbcol/collocation.hpp"
#include "wbcol/field.hpp"

namespace wbcol {

// Component-wise reconstruction polynomial in the scaled cell coordinate
// xi = (x - x_i) / dx, xi in [-1/2, 1/2].
struct ReconPoly {
  int n_vars = 0;
  double coef[StateVec::kMaxVars][3]{};  // q(xi) = c0 + c1 xi + c2 xi^2

  StateVec eval(double xi) const {
    StateVec v(n_vars);
    for (int c = 0; c < n_vars; ++c)
      v[c] = coef[c][0] + xi * (coef[c][1] + xi * coef[c][2]);
    return v;
  }
};

// values spans the stencil in physical order with the reconstructed cell at
// center_idx.
ReconPoly q_pw_constant(std::span<const StateVec> values, int center_idx);
ReconPoly q_muscl_minmod(std::span<const StateVec> values, int center_idx, double dx);
ReconPoly q_cweno3(std::span<const StateVec> values, int center_idx, double dx,
                   const QuadratureRule& rule);

// order 1: piecewise constant, s=1, stencil {i}
// order 2: MUSCL/minmod,      s=1, stencil {i-1, i, i+1}
// order 3: CWENO3,            s=2, stencil {i-1, i, i+1}
struct OrderConfig {
  int order = 1;
  int l = 0, r = 0;
  ButcherTableau tableau;
  QuadratureRule rule;

  static OrderConfig make(int order);
};

// ghost layers needed per side: the stencil width plus one cell so boundary
// stencils always exist
inline int ghost_layers(const OrderConfig& oc) { return std::max(oc.l, 1) + 1; }

struct ReconstructionResult {
  bool well_balanced = false;          // false: fallback (standard recon on raw averages)
  std::array<StateVec, 2> node_values; // P_i at the cell's quadrature nodes
  StateVec left_state;                 // P_i at x_{i-1/2}  (U^+_{i-1/2})
  StateVec right_state;                // P_i at x_{i+1/2}  (U^-_{i+1/2})
  std::array<StateVec, 2> stat_nodes;  // stationary field at the nodes (zero on fallback)
  StateVec stat_iface_left, stat_iface_right;
};

// Well-balanced wrapper: local stationary solve at cell i, standard operator
// on the fluctuations, then the sum of both. wb_enabled = false forces the
// fallback path everywhere (the non-well-balanced baseline).
ReconstructionResult wb_reconstruct(const BalanceLawModel& model,
                                    const FieldAverages& averages, int i,
                                    const OrderConfig& order_cfg,
                                    const CollocationConfig& solver_cfg,
                                    const Mesh& mesh, bool wb_enabled = true);

}  // namespace wbcol
