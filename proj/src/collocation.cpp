#include "wbcol/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace wbcol {

namespace {

int sign3(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Per-sweep step limiter for the stage fixed point: keeps the early iterates
// of near-singular starts from leaving the admissible set without moving the
// fixed point itself. Returns true when the step was cut.
bool clamp_update(const StateVec& k_old, StateVec& k_new) {
  const double cap = 2.0 * (1.0 + k_old.inf_norm());
  bool cut = false;
  for (int c = 0; c < k_new.size(); ++c) {
    const double d = k_new[c] - k_old[c];
    if (d > cap) {
      k_new[c] = k_old[c] + cap;
      cut = true;
    } else if (d < -cap) {
      k_new[c] = k_old[c] - cap;
      cut = true;
    }
  }
  return cut;
}

// Branch-selecting initial stages: near a sonic state the stage system has
// sub- and supercritical solution branches and the plain iteration would
// start in whichever basin the rounding of the anchor picked; the analytic
// crest slope (signed by the trend) provides a deterministic start in the
// transcritical basin. Away from criticality returns nothing.
std::optional<StateVec> branch_init(const BalanceLawModel& model, const StateVec& state,
                                    double x_mid, const CollocationConfig& cfg,
                                    int trend_sign) {
  if (!(model.resonance_indicator(state) < cfg.froude_window)) return std::nullopt;
  return model.critical_slope(x_mid, state, trend_sign, cfg.crest_window);
}

// Stage whose node falls inside the half-window around an interior minimum
// of H; -1 when none does. Only meaningful at two stages: the inner Gauss
// node then sits at 0.21 dx from the minimum, where the one-cell stage
// system provably loses its root, while the single midpoint node of the
// one-stage method keeps it.
int crest_pin_stage(const BalanceLawModel& model, const double* xbar, int s,
                    double crest_window) {
  if (s < 2) return -1;
  int pin = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < s; ++m) {
    const double hxx = model.geometry_deriv2(xbar[m]);
    if (!(hxx > 0.0)) continue;
    const double rho = std::fabs(model.geometry_deriv(xbar[m])) / (hxx * crest_window);
    if (rho > 0.5) continue;
    if (rho < best) {
      best = rho;
      pin = m;
    }
  }
  return pin;
}

// Affine description of the stage states: V_m(K) = base + dx sum_j w_mj K_j.
// Covers both the marching step (base = anchor, w = +-a) and the
// average-constrained cell problem (base = W-tilde, w_mj = a_mj - sum_l b_l
// a_lj after eliminating the anchor).
struct StageMap {
  const BalanceLawModel* model;
  StateVec base;
  double dx;
  int s, n;
  double w[2][2];
  double xbar[2];

  StateVec stage_state(int m, const StageSet& k) const {
    StateVec v = base;
    for (int j = 0; j < s; ++j) v.axpy(dx * w[m][j], k.k[j]);
    return v;
  }

  // stacked residual of Df(V_m) K_m - g(xbar_m, V_m); false when a stage
  // state leaves the admissible set
  bool residual(const StageSet& k, double* out) const {
    for (int m = 0; m < s; ++m) {
      const StateVec v = stage_state(m, k);
      if (!model->admissible(v)) return false;
      const StateVec r = model->flux_jacobian(v).apply(k.k[m]) -
                         model->stationary_rhs(xbar[m], v);
      for (int c = 0; c < n; ++c) out[m * n + c] = r[c];
    }
    return true;
  }
};

double max_abs(const double* v, int dim) {
  double m = 0.0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

// dense solve for the Newton correction, dim <= 6
bool gauss_solve(double a[6][6], double b[6], int dim) {
  for (int k = 0; k < dim; ++k) {
    int p = k;
    for (int r = k + 1; r < dim; ++r)
      if (std::fabs(a[r][k]) > std::fabs(a[p][k])) p = r;
    if (std::fabs(a[p][k]) < 1e-14 * (1.0 + max_abs(&a[0][0], 6 * dim))) return false;
    if (p != k) {
      for (int c = 0; c < dim; ++c) std::swap(a[k][c], a[p][c]);
      std::swap(b[k], b[p]);
    }
    for (int r = k + 1; r < dim; ++r) {
      const double f = a[r][k] / a[k][k];
      for (int c = k; c < dim; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    for (int c = r + 1; c < dim; ++c) b[r] -= a[r][c] * b[c];
    b[r] /= a[r][r];
  }
  return true;
}

// Damped Newton on the exact stage equations. The crest-adjacent cells have
// a fixed-point map with spectral radius at or above one, so the sweep
// iteration cannot settle there, while the equations themselves still have
// a locally unique fold-respecting solution; Newton recovers it without
// smoothing the fold away. Runs to full stagnation so independent callers
// reach bitwise-comparable limits.
bool newton_stages(const StageMap& map, StageSet& k, const CollocationConfig& cfg) {
  const int dim = map.s * map.n;
  double f[6];
  if (!map.residual(k, f)) return false;
  double fnorm = max_abs(f, dim);

  for (int iter = 0; iter < 80; ++iter) {
    double scale = 0.0;
    for (int m = 0; m < map.s; ++m) scale = std::max(scale, k.k[m].inf_norm());

    double jac[6][6];
    double fp[6];
    for (int col = 0; col < dim; ++col) {
      const double h = 1e-7 * (1.0 + scale);
      StageSet kp = k;
      kp.k[col / map.n][col % map.n] += h;
      if (!map.residual(kp, fp)) return false;
      for (int r = 0; r < dim; ++r) jac[r][col] = (fp[r] - f[r]) / h;
    }
    double step[6];
    for (int r = 0; r < dim; ++r) step[r] = -f[r];
    if (!gauss_solve(jac, step, dim)) return false;

    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 12; ++half) {
      StageSet kt = k;
      for (int r = 0; r < dim; ++r) kt.k[r / map.n][r % map.n] += lambda * step[r];
      if (map.residual(kt, fp)) {
        const double fn = max_abs(fp, dim);
        if (fn < fnorm) {
          k = kt;
          fnorm = fn;
          std::copy(fp, fp + dim, f);
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    // run to full stagnation so independent callers reach the same limit
    if (!improved) return fnorm <= 1e-9 * (1.0 + scale);
    (void)cfg;
  }
  return false;
}

}  // namespace

ButcherTableau ButcherTableau::gauss_legendre(int s) {
  ButcherTableau t;
  t.s = s;
  if (s == 1) {
    t.a[0][0] = 0.5;
    t.b[0] = 1.0;
    t.c[0] = 0.5;
  } else if (s == 2) {
    const double r = std::sqrt(3.0) / 6.0;
    t.a[0][0] = 0.25;
    t.a[0][1] = 0.25 - r;
    t.a[1][0] = 0.25 + r;
    t.a[1][1] = 0.25;
    t.b[0] = t.b[1] = 0.5;
    t.c[0] = 0.5 - r;
    t.c[1] = 0.5 + r;
  } else {
    throw std::invalid_argument("ButcherTableau: only s in {1,2} supported");
  }
  return t;
}

const char* to_string(SolveError e) {
  switch (e) {
    case SolveError::none: return "none";
    case SolveError::non_convergence: return "non_convergence";
    case SolveError::resonant_no_solution: return "resonant_no_solution";
    case SolveError::singular_system: return "singular_system";
    case SolveError::inadmissible_state: return "inadmissible_state";
  }
  return "?";
}

SlopeSolveResult stage_slope_solve(const BalanceLawModel& model, const StateVec& v,
                                   double x, const CollocationConfig& cfg,
                                   int trend_sign) {
  SlopeSolveResult out;
  if (!model.admissible(v)) {
    out.err = SolveError::inadmissible_state;
    return out;
  }
  const StateVec g = model.stationary_rhs(x, v);

  // The dense solve carries the full fold structure of the stationary ODE;
  // it is replaced by the analytic crest slope only when the matrix is
  // singular to rounding (a sonic state).
  const SmallMat jac = model.flux_jacobian(v);
  StateVec k(v.size());
  if (solve_linear(jac, g, k, cfg.eps_singular)) {
    out.slope = k;
    return out;
  }
  if (auto kc = model.critical_slope(x, v, trend_sign, cfg.crest_window)) {
    out.slope = *kc;
    return out;
  }
  out.err = model.resonance_indicator(v) < 0.5 ? SolveError::resonant_no_solution
                                               : SolveError::singular_system;
  return out;
}

namespace {

// Gauss-Jacobi sweeps over a stage map; stage pin_m (когда >= 0) takes the
// model's analytic crest slope each sweep instead of the linear solve.
StageSolveResult sweep_stages(const StageMap& map, const CollocationConfig& cfg,
                              int trend_sign, const StageSet& k_init, int pin_m,
                              int budget) {
  const int s = map.s;
  StageSolveResult out;
  out.stages = k_init;

  std::array<StateVec, 2> v_prev;
  double res_min = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < budget; ++iter) {
    StageSet next;
    next.s = s;
    std::array<StateVec, 2> v_cur;
    double vmax = 0.0;
    bool cut = false;
    for (int m = 0; m < s; ++m) {
      const StateVec v = map.stage_state(m, out.stages);
      if (m == pin_m) {
        if (!map.model->admissible(v)) {
          out.err = SolveError::inadmissible_state;
          out.iterations = iter;
          return out;
        }
        auto kc = map.model->critical_slope(map.xbar[m], v, 0, cfg.crest_window);
        if (!kc) {
          out.err = SolveError::resonant_no_solution;
          out.iterations = iter;
          return out;
        }
        next.k[m] = *kc;
      } else {
        auto r = stage_slope_solve(*map.model, v, map.xbar[m], cfg, trend_sign);
        if (r.err != SolveError::none) {
          out.err = r.err;
          out.iterations = iter;
          return out;
        }
        next.k[m] = r.slope;
      }
      cut = clamp_update(out.stages.k[m], next.k[m]) || cut;
      v_cur[m] = v;
      vmax = std::max(vmax, v.inf_norm());
    }
    double res = std::numeric_limits<double>::infinity();
    if (iter > 0) {
      res = 0.0;
      for (int m = 0; m < s; ++m) res = std::max(res, inf_dist(v_cur[m], v_prev[m]));
    }
    out.stages = next;
    out.iterations = iter + 1;
    v_prev = v_cur;
    if (res <= cfg.tol * (1.0 + vmax)) return out;
    if (cut) {
      res_min = std::numeric_limits<double>::infinity();  // still walking in
    } else {
      res_min = std::min(res_min, res);
      if (iter > 5 && res > 10.0 * res_min) break;  // diverging
    }
  }
  out.err = SolveError::non_convergence;
  return out;
}

// Sweeps, then Newton on the exact equations, then sweeps with the
// crest-adjacent stage pinned to the analytic slope. The last rung exists
// because the one-cell stage system provably loses its root when a
// quadrature node sits close enough to the sonic point; everywhere else the
// exact equations win and keep the transcritical fold sharp.
StageSolveResult solve_stage_map(const StageMap& map, const CollocationConfig& cfg,
                                 int trend_sign, const StateVec& init_state,
                                 double x_mid) {
  const int s = map.s;
  const int n = map.n;
  StageSet k0;
  k0.s = s;
  StateVec kstart(n);
  if (auto kb = branch_init(*map.model, init_state, x_mid, cfg, trend_sign)) kstart = *kb;
  for (int m = 0; m < s; ++m) k0.k[m] = kstart;

  // A cell whose inner Gauss node falls inside the crest half-window takes
  // the analytic slope at that node unconditionally. The exact one-cell
  // system loses its root there in the transcritical regime, and in the
  // regimes where it still has one the root sits at the edge of the sweep
  // iteration's convergence, so which branch an exact attempt lands on
  // flips with the last bits of the input; a purely geometric rule with the
  // flow-direction branch is the only choice every caller agrees on.
  // Everywhere else the exact equations are solved (sweeps, then Newton),
  // which keeps the fold of the stationary ODE sharp.
  const int pin = crest_pin_stage(*map.model, map.xbar, s, cfg.crest_window);
  if (pin >= 0) return sweep_stages(map, cfg, trend_sign, k0, pin, cfg.max_iter);

  auto first = sweep_stages(map, cfg, trend_sign, k0, -1, std::min(cfg.max_iter, 400));
  if (first.err == SolveError::none) return first;
  if (first.err != SolveError::non_convergence) return first;

  StageSet kn = first.stages;
  if (newton_stages(map, kn, cfg)) {
    first.stages = kn;
    first.err = SolveError::none;
    return first;
  }
  return first;
}

}  // namespace

StageSolveResult solve_collocation_stages(const BalanceLawModel& model,
                                          const StateVec& anchor, double x_anchor,
                                          double dx, const ButcherTableau& tab,
                                          const CollocationConfig& cfg, int direction,
                                          int trend_sign) {
  StageMap map;
  map.model = &model;
  map.base = anchor;
  map.dx = dx;
  map.s = tab.s;
  map.n = anchor.size();
  for (int m = 0; m < tab.s; ++m) {
    for (int j = 0; j < tab.s; ++j) map.w[m][j] = direction * tab.a[m][j];
    map.xbar[m] = x_anchor + direction * tab.c[m] * dx;
  }
  if (!model.admissible(anchor)) {
    StageSolveResult out;
    out.err = SolveError::inadmissible_state;
    return out;
  }
  return solve_stage_map(map, cfg, trend_sign, anchor, x_anchor + direction * 0.5 * dx);
}

StepValues step_from_stages(const StateVec& anchor, double dx, const ButcherTableau& tab,
                            const StageSet& stages, int direction) {
  const int s = tab.s;
  StepValues out;
  out.far = anchor;
  for (int m = 0; m < s; ++m) out.far.axpy(direction * dx * tab.b[m], stages.k[m]);
  for (int m = 0; m < s; ++m) {
    StateVec v = anchor;
    for (int k = 0; k < s; ++k) v.axpy(direction * dx * tab.a[m][k], stages.k[k]);
    // reflected steps visit the cell's physical nodes in reverse order
    const int phys = direction > 0 ? m : s - 1 - m;
    out.nodes[phys] = v;
  }
  return out;
}

StateVec collocation_poly_eval(const StateVec& anchor, double dx,
                               const ButcherTableau& tab, const StageSet& stages,
                               int direction, double xi) {
  const int s = tab.s;
  StateVec v = anchor;
  if (s == 1) {
    v.axpy(direction * dx * xi, stages.k[0]);
  } else {
    const double c1 = tab.c[0], c2 = tab.c[1];
    const double th1 = (0.5 * xi * xi - c2 * xi) / (c1 - c2);
    const double th2 = (0.5 * xi * xi - c1 * xi) / (c2 - c1);
    v.axpy(direction * dx * th1, stages.k[0]);
    v.axpy(direction * dx * th2, stages.k[1]);
  }
  return v;
}

Extension cauchy_extend(const BalanceLawModel& model, const StateVec& u_interface,
                        const Mesh& mesh, int start_interface_index, int direction,
                        int n_steps, const ButcherTableau& tab,
                        const CollocationConfig& cfg, int trend_sign) {
  Extension ext;
  ext.cells.reserve(n_steps);
  ext.far_interfaces.reserve(n_steps);

  StateVec anchor = u_interface;
  double x = mesh.interface(start_interface_index);
  int trend = trend_sign;

  for (int step = 0; step < n_steps; ++step) {
    SolveError err = SolveError::none;
    StepValues sv;
    auto st = solve_collocation_stages(model, anchor, x, mesh.dx, tab, cfg, direction, trend);
    if (st.err != SolveError::none) {
      err = st.err;
    } else {
      sv = step_from_stages(anchor, mesh.dx, tab, st.stages, direction);
      if (direction < 0) {
        // Backward steps must reproduce the forward-marching values of the
        // cell: rung choices inside the step solver are not reflection
        // invariant at the crest, so verify the reflected solution against
        // the forward map and polish it by shooting when they disagree.
        err = SolveError::non_convergence;
        StateVec ul = sv.far;
        const double xl = x - mesh.dx;
        StateVec r(anchor.size());
        auto forward_from = [&](const StateVec& cand, StateVec& res, StepValues& out_sv,
                                int tr) -> bool {
          auto fs = solve_collocation_stages(model, cand, xl, mesh.dx, tab, cfg, +1, tr);
          if (fs.err != SolveError::none) return false;
          out_sv = step_from_stages(cand, mesh.dx, tab, fs.stages, +1);
          res = out_sv.far - anchor;
          return true;
        };
        // near the crest the forward map is two-to-one (the sub- and
        // supercritical branches collide at the fold), so a candidate that
        // merely reproduces the far value is not enough: its orientation
        // must match the trend hint
        const double cell_nodes[2] = {xl + tab.c[0] * mesh.dx, xl + tab.c[1] * mesh.dx};
        const int cell_pin = crest_pin_stage(model, cell_nodes, tab.s, cfg.crest_window);
        auto branch_ok = [&](const StateVec& cand) {
          if (cell_pin < 0 || trend == 0) return true;
          const int dir = sign3(anchor[0] - cand[0]);
          return dir == 0 || dir == trend;
        };
        StepValues fsv;
        if (forward_from(ul, r, fsv, trend)) {
          const double rtol = 1e-13 * (1.0 + anchor.inf_norm());
          double rnorm = r.inf_norm();
          for (int iter = 0; iter < 40 && rnorm > rtol; ++iter) {
            SmallMat jac(anchor.size());
            StateVec rp(anchor.size());
            StepValues tmp;
            bool fd_ok = true;
            for (int c = 0; c < anchor.size() && fd_ok; ++c) {
              const double h = 1e-7 * (1.0 + ul.inf_norm());
              StateVec up = ul;
              up[c] += h;
              fd_ok = forward_from(up, rp, tmp, trend);
              if (fd_ok)
                for (int rr = 0; rr < anchor.size(); ++rr)
                  jac(rr, c) = (rp[rr] - r[rr]) / h;
            }
            StateVec stp(anchor.size());
            if (!fd_ok || !solve_linear(jac, r, stp, 1e-13)) break;
            // small steps only: the fold makes the preimage non-unique and a
            // full Newton step can hop to the mirror branch; the reflected
            // solve already lands within O(dx^3) of the right one
            const double cap = 0.1 * mesh.dx * (1.0 + anchor.inf_norm());
            if (stp.inf_norm() > cap) stp *= cap / stp.inf_norm();
            bool improved = false;
            double lambda = 1.0;
            for (int half = 0; half < 10; ++half) {
              StateVec ut = ul;
              ut.axpy(-lambda, stp);
              StepValues cand_sv;
              if (forward_from(ut, rp, cand_sv, trend) && rp.inf_norm() < rnorm) {
                ul = ut;
                r = rp;
                fsv = cand_sv;
                rnorm = rp.inf_norm();
                improved = true;
                break;
              }
              lambda *= 0.5;
            }
            if (!improved) break;
          }
          if (rnorm <= 1e-11 * (1.0 + anchor.inf_norm()) && branch_ok(ul)) {
            sv.nodes = fsv.nodes;
            sv.far = ul;
            err = SolveError::none;
          }
        }
      }
    }
    if (err != SolveError::none) {
      ext.failed_at = step;
      ext.err = err;
      CellNodeValues tail;
      for (int m = 0; m < tab.s; ++m) tail.nodes[m] = anchor;
      for (int rest = step; rest < n_steps; ++rest) {
        ext.cells.push_back(tail);
        ext.far_interfaces.push_back(anchor);
      }
      return ext;
    }
    ext.cells.push_back({sv.nodes});
    ext.far_interfaces.push_back(sv.far);
    trend = direction > 0 ? sign3(sv.far[0] - anchor[0]) : sign3(anchor[0] - sv.far[0]);
    anchor = sv.far;
    x += direction * mesh.dx;
  }
  return ext;
}

bool crest_cell(const BalanceLawModel& model, const Mesh& mesh, int cell_index,
                const ButcherTableau& tab, double crest_window) {
  double xbars[2] = {0.0, 0.0};
  for (int m = 0; m < tab.s; ++m)
    xbars[m] = mesh.interface(cell_index) + tab.c[m] * mesh.dx;
  return crest_pin_stage(model, xbars, tab.s, crest_window) >= 0;
}

LocalStationaryField solve_local_problem(const BalanceLawModel& model,
                                         const StateVec& w_tilde, int cell_index,
                                         int l, int r, const ButcherTableau& tab,
                                         const QuadratureRule& rule,
                                         const CollocationConfig& cfg, const Mesh& mesh,
                                         int trend_sign) {
  const int s = tab.s;
  const int n = w_tilde.size();
  LocalStationaryField field;
  field.cell_index = cell_index;
  field.l = l;
  field.r = r;
  field.s = s;
  field.cells.assign(l + r + 1, CellNodeValues{});

  const double dx = mesh.dx;
  const double x_left = mesh.interface(cell_index);
  const double x_mid = mesh.cell_center(cell_index);

  StageSet stages;
  stages.s = s;
  StateVec u_left(n);

  if (!model.admissible(w_tilde)) {
    field.err = SolveError::inadmissible_state;
    return field;
  }

  double xbars[2];
  for (int m = 0; m < s; ++m) xbars[m] = x_left + tab.c[m] * dx;

  // Eliminating the anchor through the average constraint turns the coupled
  // {stages, constraint} system into a plain stage map with weights
  // a_mj - sum_l b_l a_lj; at one stage the map is constant (V == W-tilde),
  // which is the closed form of the second-order method.
  StageMap map;
  map.model = &model;
  map.base = w_tilde;
  map.dx = dx;
  map.s = s;
  map.n = n;
  for (int m = 0; m < s; ++m) {
    for (int j = 0; j < s; ++j) {
      double wmj = tab.a[m][j];
      for (int l = 0; l < s; ++l) wmj -= tab.b[l] * tab.a[l][j];
      map.w[m][j] = wmj;
    }
    map.xbar[m] = xbars[m];
  }
  auto solved = solve_stage_map(map, cfg, trend_sign, w_tilde, x_mid);
  if (solved.err != SolveError::none) {
    field.err = solved.err;
    return field;
  }
  stages = solved.stages;
  u_left = w_tilde;
  for (int m = 0; m < s; ++m)
    for (int k = 0; k < s; ++k) u_left.axpy(-dx * tab.b[m] * tab.a[m][k], stages.k[k]);

  if (rule.stages != tab.s)
    throw std::invalid_argument("solve_local_problem: rule/tableau stage mismatch");

  auto own = step_from_stages(u_left, dx, tab, stages, +1);
  field.iface_left = u_left;
  field.iface_right = own.far;
  field.cells[l] = {own.nodes};
  field.solved = true;

  int trend = sign3(field.iface_right[0] - field.iface_left[0]);
  if (trend == 0) trend = trend_sign;

  if (r > 0) {
    auto fwd =
        cauchy_extend(model, field.iface_right, mesh, cell_index + 1, +1, r, tab, cfg, trend);
    for (int t = 0; t < r; ++t) field.cells[l + 1 + t] = fwd.cells[t];
  }
  if (l > 0) {
    auto bwd =
        cauchy_extend(model, field.iface_left, mesh, cell_index, -1, l, tab, cfg, trend);
    for (int t = 0; t < l; ++t) field.cells[l - 1 - t] = bwd.cells[t];
  }
  return field;
}

}  // namespace wbcol
