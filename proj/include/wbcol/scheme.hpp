#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "wbcol/reconstruction.hpp"

namespace wbcol {

// Per-side boundary prescription: (component index, nominal value) pairs;
// an empty list is an open (outflow) side. When a run carries a stationary
// hint, deviations from the discrete equilibrium are handled per mode:
// `characteristic` zeroes the incoming wave content (absorbing, carries the
// prescribed data through the equilibrium trace), `pin` zeroes the
// prescribed components themselves (reflecting, but it grips stationary
// families whose tangent runs along the outgoing characteristic — the
// transcritical upstream side needs this).
struct BoundarySide {
  enum class Mode { characteristic, pin };
  std::vector<std::pair<int, double>> prescribed;
  Mode mode = Mode::characteristic;
  bool open() const { return prescribed.empty(); }
};

struct BoundarySpec {
  BoundarySide left, right;
};

// Discrete stationary reference produced by the preparation step: cell
// averages over interior + ghosts plus the two boundary interface states.
struct StationaryHint {
  FieldAverages averages;
  StateVec left_iface, right_iface;
  bool valid = false;
};

struct SchemeConfig {
  int order = 1;
  double cfl = 0.9;
  bool well_balanced = true;
  BoundarySpec bc;
  CollocationConfig solver;
  int threads = 1;
};

StateVec rusanov_flux(const BalanceLawModel& model, const StateVec& ul,
                      const StateVec& ur);

// Well-balanced source quadrature: exact flux difference of the local
// stationary field plus the rule quadrature of the fluctuation part; plain
// rule quadrature of g(x, P) on the fallback path.
StateVec source_cell(const BalanceLawModel& model, const ReconstructionResult& recon,
                     const Mesh& mesh, int i, const QuadratureRule& rule);

// Refresh ghost averages. With a hint: ghosts carry the hint value plus the
// deviation of the adjacent interior cell (deviation zeroed on prescribed
// components). Without: zero-order copy, prescribed components overwritten
// by their nominal values.
void fill_ghost_cells(const BalanceLawModel& model, FieldAverages& field,
                      const BoundarySpec& bc, const StationaryHint* hint);

struct RhsStats {
  int fallback_cells = 0;
};

// Semi-discrete operator: per interior cell,
// -(F_{i+1/2} - F_{i-1/2})/dx + S_i/dx. Ghost averages are refreshed first
// (the only mutation of `field`).
std::vector<StateVec> semidiscrete_rhs(const BalanceLawModel& model,
                                       FieldAverages& field, const SchemeConfig& cfg,
                                       const Mesh& mesh, const StationaryHint* hint,
                                       RhsStats* stats = nullptr);

double compute_dt(const BalanceLawModel& model, const FieldAverages& field,
                  const Mesh& mesh, double cfl);

// SSP Runge-Kutta step of the configured order over a generic RHS; exposed
// separately so the amplification factors can be checked against the scalar
// recursion.
using RhsFn = std::function<std::vector<StateVec>(FieldAverages&)>;
FieldAverages ssp_rk_step(const RhsFn& rhs, const FieldAverages& field, double dt,
                          int order);

FieldAverages tvd_rk_advance(const BalanceLawModel& model, const FieldAverages& field,
                             double dt, const SchemeConfig& cfg, const Mesh& mesh,
                             const StationaryHint* hint, RhsStats* stats = nullptr);

}  // namespace wbcol
