#pragma once

#include <vector>

#include "wbcol/mesh.hpp"
#include "wbcol/models.hpp"

namespace wbcol {

// Gauss-Legendre collocation coefficients; s in {1, 2}.
struct ButcherTableau {
  int s = 1;
  double a[2][2]{};
  double b[2]{};
  double c[2]{};

  static ButcherTableau gauss_legendre(int s);
};

struct CollocationConfig {
  double tol = 1e-15;          // stage fixed-point residual on the stage values
  int max_iter = 2000;
  double eps_singular = 1e-10; // relative pivot breakdown threshold
  double froude_window = 1e-6; // |Fr-1| band for the branch-selecting start
  double crest_window = 0.0;   // spatial window for the minimum-of-H test

  // The window only chooses the initial branch of the stage iteration near
  // a sonic anchor (the collocation march misses exact criticality by its
  // own truncation error, O(dx^2) at one stage); the iteration itself runs
  // on the exact stage equations everywhere. Crest-adjacent cells converge
  // at a rate approaching 1, hence the generous sweep budget.
  static CollocationConfig for_mesh(double dx) {
    CollocationConfig cfg;
    cfg.froude_window = std::max(1e-6, 2.5 * dx);
    cfg.crest_window = dx;
    return cfg;
  }
};

enum class SolveError {
  none,
  non_convergence,
  resonant_no_solution,
  singular_system,
  inadmissible_state,
};

const char* to_string(SolveError e);

struct SlopeSolveResult {
  StateVec slope;
  SolveError err = SolveError::none;
};

// Solve Df(V) K = g(x, V) for the stationary slope at one stage state.
// Near-critical states (model detector, or pivot breakdown) are delegated to
// the model's resonance policy; trend_sign picks the slope branch there.
SlopeSolveResult stage_slope_solve(const BalanceLawModel& model, const StateVec& v,
                                   double x, const CollocationConfig& cfg,
                                   int trend_sign = 0);

struct StageSet {
  int s = 1;
  std::array<StateVec, 2> k{};
};

struct StageSolveResult {
  StageSet stages;
  SolveError err = SolveError::none;
  int iterations = 0;
};

// Gauss-Jacobi fixed point for the stage system of one collocation step.
// direction +1 steps right from the anchor (V_m = U + dx sum a_mk K_k at
// x + c_m dx); direction -1 is the reflected step to the left (V_m =
// U - dx sum a_mk K_k at x - c_m dx, which is the exact inverse map for the
// symmetric Gauss tableaus).
StageSolveResult solve_collocation_stages(const BalanceLawModel& model,
                                          const StateVec& anchor, double x_anchor,
                                          double dx, const ButcherTableau& tab,
                                          const CollocationConfig& cfg, int direction,
                                          int trend_sign = 0);

inline StageSolveResult solve_stages_forward(const BalanceLawModel& model,
                                             const StateVec& u_left, double x_left,
                                             double dx, const ButcherTableau& tab,
                                             const CollocationConfig& cfg,
                                             int trend_sign = 0) {
  return solve_collocation_stages(model, u_left, x_left, dx, tab, cfg, +1, trend_sign);
}

inline StageSolveResult solve_stages_backward(const BalanceLawModel& model,
                                              const StateVec& u_right, double x_right,
                                              double dx, const ButcherTableau& tab,
                                              const CollocationConfig& cfg,
                                              int trend_sign = 0) {
  return solve_collocation_stages(model, u_right, x_right, dx, tab, cfg, -1, trend_sign);
}

struct StepValues {
  StateVec far;                  // anchor +/- dx sum b_m K_m
  std::array<StateVec, 2> nodes; // stage states in left-to-right physical order
};

StepValues step_from_stages(const StateVec& anchor, double dx, const ButcherTableau& tab,
                            const StageSet& stages, int direction);

// Collocation polynomial through the anchor: value at offset xi in [0,1]
// measured from the anchor towards the step direction.
StateVec collocation_poly_eval(const StateVec& anchor, double dx,
                               const ButcherTableau& tab, const StageSet& stages,
                               int direction, double xi);

struct CellNodeValues {
  std::array<StateVec, 2> nodes{};
};

// Marching solution of the stationary Cauchy problem over n_steps mesh cells.
// cells[t]/far_interfaces[t] describe the t-th cell away from the start
// interface. When a step fails, the remaining cells are filled by constant
// continuation from the last valid interface value, failed_at records the
// first failing step, and err the reason; preparation and the per-cell local
// solves share this rule so both sides of a fluctuation agree even past a
// point where the stationary curve stops existing.
struct Extension {
  std::vector<CellNodeValues> cells;
  std::vector<StateVec> far_interfaces;
  int failed_at = -1;
  SolveError err = SolveError::none;
};

Extension cauchy_extend(const BalanceLawModel& model, const StateVec& u_interface,
                        const Mesh& mesh, int start_interface_index, int direction,
                        int n_steps, const ButcherTableau& tab,
                        const CollocationConfig& cfg, int trend_sign = 0);

// Output of the average-constrained local problem on the stencil
// {i-l, ..., i+r}. Node values are stored per stencil cell in physical
// order; iface_left/right are the cell-i intercell values.
struct LocalStationaryField {
  int cell_index = 0;
  int l = 0, r = 0;
  int s = 1;
  bool solved = false;
  SolveError err = SolveError::none;
  StateVec iface_left, iface_right;
  std::vector<CellNodeValues> cells;  // size l + r + 1, j = i-l .. i+r

  const StateVec& node(int j_rel, int m) const { return cells[j_rel].nodes[m]; }
};

// True when one of the cell's quadrature nodes falls inside the half-window
// around an interior minimum of H (only possible at two stages). Stage
// systems of such cells lose their root in the transcritical regime, and
// every consumer must evaluate them through the cell's own constrained
// solve rather than by marching in from a neighbour.
bool crest_cell(const BalanceLawModel& model, const Mesh& mesh, int cell_index,
                const ButcherTableau& tab, double crest_window);

// Algorithm: solve the coupled {stage equations, average constraint} system
// at cell i (closed form for s = 1), then extend over the stencil with the
// Cauchy solver. A failure of the cell-i solve itself reports solved = false
// and the caller falls back to the standard reconstruction.
LocalStationaryField solve_local_problem(const BalanceLawModel& model,
                                         const StateVec& w_tilde, int cell_index,
                                         int l, int r, const ButcherTableau& tab,
                                         const QuadratureRule& rule,
                                         const CollocationConfig& cfg, const Mesh& mesh,
                                         int trend_sign = 0);

}  // namespace wbcol
