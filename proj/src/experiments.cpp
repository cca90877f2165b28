#include "wbcol/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace wbcol {

StateVec Perturbation::delta(int n_vars, double x) const {
  StateVec d(n_vars);
  for (const auto& b : bumps)
    if (x >= b.x0 && x <= b.x1) d[b.comp] += b.amp;
  for (const auto& g : gaussians)
    d[g.comp] += g.amp * std::exp(-g.width * (x - g.center) * (x - g.center));
  return d;
}

ICRecipe::Kind ic_kind_from_string(const std::string& s) {
  if (s == "a" || s == "exact") return ICRecipe::Kind::exact_average;
  if (s == "b" || s == "quadrature") return ICRecipe::Kind::rule_points;
  if (s == "c" || s == "fine") return ICRecipe::Kind::fine_collocation;
  if (s == "d" || s == "collocation") return ICRecipe::Kind::collocation;
  throw std::invalid_argument("unknown initial-condition recipe: " + s);
}

std::string to_string(ICRecipe::Kind k) {
  switch (k) {
    case ICRecipe::Kind::exact_average: return "a";
    case ICRecipe::Kind::rule_points: return "b";
    case ICRecipe::Kind::fine_collocation: return "c";
    case ICRecipe::Kind::collocation: return "d";
  }
  return "?";
}

ModelPtr ExperimentSpec::make_model() const {
  if (model_id == "linear_transport") return linear_transport_model();
  if (model_id == "burgers_exp") return burgers_exp_model();
  if (model_id == "burgers_sin") return burgers_sin_model();
  if (model_id == "shallow_water") return shallow_water_model(g, bathymetry);
  if (model_id == "shallow_water_manning")
    return shallow_water_manning_model(g, manning_k, manning_eta, bathymetry);
  if (model_id == "euler_gravity") return euler_gravity_model(gamma);
  throw std::invalid_argument("unknown model id: " + model_id);
}

double manning_subcritical_depth(double g, double k, double eta, double q0, double x0,
                                 double x) {
  const double hc = std::cbrt(q0 * q0 / g);
  auto xi = [&](double h) {
    return -q0 * q0 / (eta - 1.0) * (std::pow(h, eta - 1.0) - std::pow(hc, eta - 1.0)) +
           g / (eta + 2.0) * (std::pow(h, eta + 2.0) - std::pow(hc, eta + 2.0)) +
           k * q0 * std::fabs(q0) * (x - x0);
  };
  double lo = hc, hi = 10.0 * hc;
  if (!(xi(lo) < 0.0 && xi(hi) > 0.0))
    throw std::runtime_error("manning_subcritical_depth: root not bracketed");
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (xi(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

ExperimentSpec base_burgers(const std::string& id) {
  ExperimentSpec s;
  s.id = id;
  s.model_id = "burgers_exp";
  s.a = -1.0;
  s.b = 1.0;
  s.t_final = 5.0;
  s.meshes = {100, 200, 400, 800};
  s.ic.kind = ICRecipe::Kind::collocation;
  s.ic.anchor_x = -1.0;
  s.ic.anchor = [](double) { return StateVec{std::exp(-1.0)}; };
  s.ic.point_value = [](double x) { return StateVec{std::exp(x)}; };
  s.ic.cell_average = [](double xl, double xr) {
    return StateVec{(std::exp(xr) - std::exp(xl)) / (xr - xl)};
  };
  s.bc.left.prescribed = {{0, std::exp(-1.0)}};
  return s;
}

ExperimentSpec spec_test11() {
  ExperimentSpec s = base_burgers("test1.1");
  s.title = "Burgers with quadratic source, stationary exponential";
  return s;
}

ExperimentSpec spec_test21() {
  ExperimentSpec s;
  s.id = "test2.1";
  s.title = "Burgers with sine source, stationary preservation";
  s.model_id = "burgers_sin";
  s.a = -1.0;
  s.b = 1.0;
  s.t_final = 5.0;
  s.meshes = {100, 200, 400, 800};
  s.ic.anchor_x = -1.0;
  s.ic.anchor = [](double) { return StateVec{2.0}; };
  s.bc.left.prescribed = {{0, 2.0}};
  return s;
}

ExperimentSpec spec_test22() {
  ExperimentSpec s = spec_test21();
  s.id = "test2.2";
  s.title = "Burgers with sine source, perturbed stationary state";
  s.meshes = {100};
  s.perturbation.gaussians.push_back({0, 0.3, -0.5, 200.0});
  s.reference_fine_cells = 12800;
  return s;
}

ExperimentSpec spec_test31() {
  ExperimentSpec s;
  s.id = "test3.1";
  s.title = "Shallow water, transcritical smooth stationary solution";
  s.model_id = "shallow_water";
  s.bathymetry = Bathymetry::bump;
  s.a = 0.0;
  s.b = 3.0;
  s.t_final = 1.0;
  s.meshes = {100, 200, 400, 800};
  s.ic.anchor_x = 0.0;
  s.ic.anchor = [](double) { return StateVec{1.67750727, 2.5}; };
  s.bc.left.prescribed = {{0, 1.67750727}};  // water height upstream
  s.bc.right.prescribed = {{1, 2.5}};        // discharge downstream
  return s;
}

ExperimentSpec spec_test32() {
  ExperimentSpec s = spec_test31();
  s.id = "test3.2";
  s.title = "Shallow water, perturbed transcritical stationary solution";
  s.t_final = 5.0;
  s.meshes = {200};
  s.perturbation.bumps.push_back({0, 0.02, 1.1, 1.2});
  s.reference_fine_cells = 2000;
  return s;
}

ExperimentSpec spec_test33() {
  ExperimentSpec s;
  s.id = "test3.3";
  s.title = "Shallow water, perturbed subcritical stationary solution";
  s.model_id = "shallow_water";
  s.bathymetry = Bathymetry::bump;
  s.a = 0.0;
  s.b = 3.0;
  s.t_final = 5.0;
  s.meshes = {100};
  s.ic.anchor_x = 0.0;
  s.ic.anchor = [](double) { return StateVec{2.0, 3.5}; };
  s.bc.left.prescribed = {{1, 3.5}};
  s.bc.right.prescribed = {{0, 2.0}};
  s.perturbation.bumps.push_back({0, 0.02, 0.7, 1.0});
  s.reference_fine_cells = 3200;
  return s;
}

ExperimentSpec spec_test41() {
  ExperimentSpec s;
  s.id = "test4.1";
  s.title = "Shallow water with Manning friction, flat bed moving equilibrium";
  s.model_id = "shallow_water_manning";
  s.manning_k = 1.0;
  s.bathymetry = Bathymetry::flat;
  s.a = 0.0;
  s.b = 1.0;
  s.t_final = 1.0;
  s.meshes = {200};
  s.ic.anchor_x = 0.0;
  const double g = s.g, k = s.manning_k, eta = s.manning_eta;
  s.ic.anchor = [g, k, eta](double dx) {
    return StateVec{manning_subcritical_depth(g, k, eta, -1.0, -dx, 0.0), -1.0};
  };
  // flow runs right-to-left: discharge at the downstream (left) side, depth
  // at the upstream (right) side; the upstream nominal is the discrete
  // stationary value, supplied by the hint at run time
  s.bc.left.prescribed = {{1, -1.0}};
  s.bc.right.prescribed = {{0, std::nan("")}};
  s.reference_fine_cells = 1600;
  return s;
}

ExperimentSpec spec_test42() {
  ExperimentSpec s = spec_test41();
  s.id = "test4.2";
  s.title = "Manning friction, perturbed flat-bed equilibrium";
  s.t_final = 9.0;
  s.meshes = {100};
  s.perturbation.bumps.push_back({0, 0.2, 3.0 / 7.0, 4.0 / 7.0});
  return s;
}

ExperimentSpec spec_test43() {
  ExperimentSpec s;
  s.id = "test4.3";
  s.title = "Manning friction over exp-cosine bed, supercritical equilibrium";
  s.model_id = "shallow_water_manning";
  s.manning_k = 0.01;
  s.bathymetry = Bathymetry::exp_cosine;
  s.a = 0.0;
  s.b = 1.0;
  s.t_final = 1.0;
  s.meshes = {100};
  s.ic.anchor_x = 0.0;
  s.ic.anchor = [](double) { return StateVec{0.3, 1.0}; };
  s.bc.left.prescribed = {{0, 0.3}, {1, 1.0}};  // supercritical inflow
  s.reference_fine_cells = 1600;
  return s;
}

ExperimentSpec spec_test44() {
  ExperimentSpec s = spec_test43();
  s.id = "test4.4";
  s.title = "Manning friction, perturbed supercritical equilibrium";
  s.t_final = 2.0;
  s.meshes = {100};
  s.perturbation.bumps.push_back({0, 0.05, 2.0 / 7.0, 3.0 / 7.0});
  s.perturbation.bumps.push_back({0, 0.05, 4.0 / 7.0, 5.0 / 7.0});
  s.perturbation.bumps.push_back({1, 0.5, 2.0 / 7.0, 3.0 / 7.0});
  s.perturbation.bumps.push_back({1, 0.5, 4.0 / 7.0, 5.0 / 7.0});
  return s;
}

ExperimentSpec spec_test51() {
  ExperimentSpec s;
  s.id = "test5.1";
  s.title = "Euler with gravity, supersonic moving equilibrium";
  s.model_id = "euler_gravity";
  s.gamma = 1.5;
  s.a = -1.0;
  s.b = 1.0;
  s.t_final = 5.0;
  s.meshes = {100};
  s.ic.anchor_x = -1.0;
  s.ic.anchor = [](double) { return StateVec{1.0, 10.0, 52.0}; };
  s.bc.left.prescribed = {{0, 1.0}, {1, 10.0}, {2, 52.0}};
  return s;
}

}  // namespace

std::vector<std::string> experiment_ids() {
  return {"test1.1", "test2.1", "test2.2", "test3.1", "test3.2", "test3.3",
          "test4.1", "test4.2", "test4.3", "test4.4", "test5.1"};
}

ExperimentSpec experiment_by_id(const std::string& id) {
  if (id == "test1.1") return spec_test11();
  if (id == "test2.1") return spec_test21();
  if (id == "test2.2") return spec_test22();
  if (id == "test3.1") return spec_test31();
  if (id == "test3.2") return spec_test32();
  if (id == "test3.3") return spec_test33();
  if (id == "test4.1") return spec_test41();
  if (id == "test4.2") return spec_test42();
  if (id == "test4.3") return spec_test43();
  if (id == "test4.4") return spec_test44();
  if (id == "test5.1") return spec_test51();
  throw std::invalid_argument("unknown experiment id: " + id);
}

// ---- preparation ------------------------------------------------------------

namespace {

struct Trajectory {
  int n_ghost = 0;
  std::vector<StateVec> interfaces;     // index i + n_ghost, i = -g .. nc+g
  std::vector<CellNodeValues> cells;    // index i + n_ghost, i = -g .. nc+g-1
};

const StateVec& traj_iface(const Trajectory& t, int i) { return t.interfaces[i + t.n_ghost]; }

Trajectory collocation_trajectory(const BalanceLawModel& model, const Mesh& mesh,
                                  int n_ghost, const StateVec& anchor, double anchor_x,
                                  const ButcherTableau& tab,
                                  const CollocationConfig& cfg) {
  const int nc = mesh.n_cells;
  const long idx = std::lround((anchor_x - mesh.a) / mesh.dx);
  if (std::fabs(mesh.interface(static_cast<int>(idx)) - anchor_x) >
      1e-9 * (std::fabs(mesh.dx) + std::fabs(anchor_x)))
    throw std::invalid_argument("stationary anchor must sit on a mesh interface");
  if (idx < 0 || idx > nc)
    throw std::invalid_argument("stationary anchor outside the domain");

  Trajectory t;
  t.n_ghost = n_ghost;
  t.interfaces.assign(nc + 2 * n_ghost + 1, StateVec(model.n_vars()));
  t.cells.assign(nc + 2 * n_ghost, CellNodeValues{});
  t.interfaces[idx + n_ghost] = anchor;

  const int i0 = static_cast<int>(idx);
  const int fwd_steps = nc + n_ghost - i0;
  const int bwd_steps = i0 + n_ghost;

  auto fwd = cauchy_extend(model, anchor, mesh, i0, +1, fwd_steps, tab, cfg);
  if (fwd.failed_at >= 0 && i0 + fwd.failed_at < nc)
    throw std::runtime_error("stationary preparation failed in interior cell " +
                             std::to_string(i0 + fwd.failed_at) + ": " +
                             to_string(fwd.err));
  for (int s = 0; s < fwd_steps; ++s) {
    t.cells[i0 + s + n_ghost] = fwd.cells[s];
    t.interfaces[i0 + s + 1 + n_ghost] = fwd.far_interfaces[s];
  }
  auto bwd = cauchy_extend(model, anchor, mesh, i0, -1, bwd_steps, tab, cfg);
  if (bwd.failed_at >= 0 && i0 - 1 - bwd.failed_at >= 0)
    throw std::runtime_error("stationary preparation failed in interior cell " +
                             std::to_string(i0 - 1 - bwd.failed_at) + ": " +
                             to_string(bwd.err));
  for (int s = 0; s < bwd_steps; ++s) {
    t.cells[i0 - 1 - s + n_ghost] = bwd.cells[s];
    t.interfaces[i0 - 1 - s + n_ghost] = bwd.far_interfaces[s];
  }
  return t;
}

// collocation polynomial through the left interface value and the s node
// values of one cell, evaluated at xi in [0,1]
StateVec lagrange_cell_eval(const StateVec& left, const CellNodeValues& nodes,
                            const QuadratureRule& rule, double xi) {
  if (rule.stages == 1) {
    const double w = xi / rule.node[0];
    return (1.0 - w) * left + w * nodes.nodes[0];
  }
  const double x0 = 0.0, x1 = rule.node[0], x2 = rule.node[1];
  const double l0 = (xi - x1) * (xi - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (xi - x0) * (xi - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (xi - x0) * (xi - x1) / ((x2 - x0) * (x2 - x1));
  StateVec v = l0 * left;
  v.axpy(l1, nodes.nodes[0]);
  v.axpy(l2, nodes.nodes[1]);
  return v;
}

}  // namespace

PreparedRun prepare_initial_averages(const ExperimentSpec& spec,
                                     const BalanceLawModel& model, const Mesh& mesh,
                                     const OrderConfig& oc, const CollocationConfig& cfg,
                                     ICRecipe::Kind kind) {
  const int n = model.n_vars();
  const int ng = ghost_layers(oc);
  const int nc = mesh.n_cells;
  const QuadratureRule& rule = oc.rule;

  PreparedRun out;
  out.hint.averages = FieldAverages(n, nc, ng);
  out.hint.valid = true;

  auto set_all = [&](const std::function<StateVec(int)>& avg_of_cell) {
    for (int i = -ng; i < nc + ng; ++i) out.hint.averages.set(i, avg_of_cell(i));
  };

  switch (kind) {
    case ICRecipe::Kind::exact_average: {
      if (!spec.ic.cell_average || !spec.ic.point_value)
        throw std::invalid_argument(spec.id + ": recipe (a) needs a closed form");
      set_all([&](int i) {
        return spec.ic.cell_average(mesh.interface(i), mesh.interface(i + 1));
      });
      out.hint.left_iface = spec.ic.point_value(mesh.a);
      out.hint.right_iface = spec.ic.point_value(mesh.b);
      break;
    }
    case ICRecipe::Kind::rule_points: {
      if (!spec.ic.point_value)
        throw std::invalid_argument(spec.id + ": recipe (b) needs a closed form");
      set_all([&](int i) {
        std::array<StateVec, 2> vals;
        for (int m = 0; m < rule.stages; ++m)
          vals[m] = spec.ic.point_value(rule.physical_node(mesh, i, m));
        return quadrature_average(std::span<const StateVec>(vals.data(), rule.stages), rule);
      });
      out.hint.left_iface = spec.ic.point_value(mesh.a);
      out.hint.right_iface = spec.ic.point_value(mesh.b);
      break;
    }
    case ICRecipe::Kind::collocation: {
      auto traj = collocation_trajectory(model, mesh, ng, spec.ic.anchor(mesh.dx),
                                         spec.ic.anchor_x, oc.tableau, cfg);
      set_all([&](int i) {
        std::span<const StateVec> nodes(traj.cells[i + ng].nodes.data(), rule.stages);
        return quadrature_average(nodes, rule);
      });
      out.hint.left_iface = traj_iface(traj, 0);
      out.hint.right_iface = traj_iface(traj, nc);
      break;
    }
    case ICRecipe::Kind::fine_collocation: {
      const int f = spec.ic.fine_factor;
      Mesh fine = make_uniform_mesh(mesh.a, mesh.b, f * nc);
      auto cfg_f = cfg;
      cfg_f.froude_window = std::max(1e-6, 0.5 * fine.dx);
      cfg_f.crest_window = fine.dx;
      auto traj = collocation_trajectory(model, fine, f * ng, spec.ic.anchor(mesh.dx),
                                         spec.ic.anchor_x, oc.tableau, cfg_f);
      auto value_at = [&](double x) {
        int k = static_cast<int>(std::floor((x - fine.a) / fine.dx));
        k = std::max(-f * ng, std::min(k, f * nc + f * ng - 1));
        const double xi = (x - fine.interface(k)) / fine.dx;
        return lagrange_cell_eval(traj_iface(traj, k), traj.cells[k + f * ng], rule, xi);
      };
      set_all([&](int i) {
        std::array<StateVec, 2> vals;
        for (int m = 0; m < rule.stages; ++m)
          vals[m] = value_at(rule.physical_node(mesh, i, m));
        return quadrature_average(std::span<const StateVec>(vals.data(), rule.stages), rule);
      });
      out.hint.left_iface = traj_iface(traj, 0);
      out.hint.right_iface = traj_iface(traj, f * nc);
      break;
    }
  }

  out.initial = out.hint.averages;
  if (!spec.perturbation.empty()) {
    for (int i = 0; i < nc; ++i) {
      std::array<StateVec, 2> vals;
      for (int m = 0; m < rule.stages; ++m)
        vals[m] = spec.perturbation.delta(n, rule.physical_node(mesh, i, m));
      const StateVec add =
          quadrature_average(std::span<const StateVec>(vals.data(), rule.stages), rule);
      out.initial.set(i, out.initial.get(i) + add);
    }
  }
  return out;
}

std::vector<double> l1_error(const FieldAverages& fa, const FieldAverages& fb,
                             const Mesh& mesh) {
  if (fa.n_vars() != fb.n_vars() || fa.n_cells() != fb.n_cells())
    throw std::invalid_argument("l1_error: field shape mismatch");
  std::vector<double> err(fa.n_vars(), 0.0);
  for (int i = 0; i < fa.n_cells(); ++i) {
    const StateVec d = fa.get(i) - fb.get(i);
    for (int c = 0; c < fa.n_vars(); ++c) err[c] += std::fabs(d[c]) * mesh.dx;
  }
  return err;
}

RunOutcome run_single(const ExperimentSpec& spec, int order, int cells,
                      bool well_balanced, const RunOverrides& ov) {
  const auto t0 = std::chrono::steady_clock::now();

  ModelPtr model = spec.make_model();
  model->reset_resonance_counter();
  const Mesh mesh = make_uniform_mesh(spec.a, spec.b, cells);
  const OrderConfig oc = OrderConfig::make(order);

  CollocationConfig ccfg = CollocationConfig::for_mesh(mesh.dx);
  if (ov.tol) ccfg.tol = *ov.tol;
  if (ov.max_iter) ccfg.max_iter = *ov.max_iter;

  const ICRecipe::Kind kind = ov.ic_kind.value_or(spec.ic.kind);
  PreparedRun prep = prepare_initial_averages(spec, *model, mesh, oc, ccfg, kind);

  SchemeConfig scfg;
  scfg.order = order;
  scfg.cfl = ov.cfl.value_or(spec.cfl);
  scfg.well_balanced = well_balanced;
  scfg.bc = spec.bc;
  scfg.solver = ccfg;
  scfg.threads = ov.threads.value_or(1);

  RunOutcome out;
  out.experiment = spec.id;
  out.order = order;
  out.cells = cells;
  out.well_balanced = well_balanced;
  out.ic_kind = kind;
  out.t_final = ov.t_final.value_or(spec.t_final);
  out.mesh = mesh;
  out.hint = prep.hint;
  out.initial_field = prep.initial;

  FieldAverages field = prep.initial;
  RhsStats stats;
  double t = 0.0;
  const double t_end = out.t_final;
  while (t < t_end * (1.0 - 1e-14)) {
    double dt = compute_dt(*model, field, mesh, scfg.cfl);
    if (t + dt > t_end) dt = t_end - t;
    field = tvd_rk_advance(*model, field, dt, scfg, mesh, &prep.hint, &stats);
    t += dt;
    ++out.steps;
    if (out.steps > 50'000'000)
      throw std::runtime_error(spec.id + ": time loop exceeded the step budget");
  }

  out.final_field = field;
  out.err_vs_initial = l1_error(field, prep.initial, mesh);
  out.err_vs_stationary = l1_error(field, prep.hint.averages, mesh);
  out.resonance_hits = model->resonance_activations();
  out.fallback_cells = stats.fallback_cells;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ErrorReport run_experiment(const ExperimentSpec& spec, const std::vector<int>& orders,
                           const std::vector<int>& meshes, bool well_balanced,
                           const RunOverrides& ov) {
  ErrorReport report;
  report.experiment = spec.id;
  report.well_balanced = well_balanced;
  report.component_names = spec.make_model()->component_names();
  for (int order : orders)
    for (int cells : meshes)
      report.runs.push_back(run_single(spec, order, cells, well_balanced, ov));
  return report;
}

FieldAverages reference_solution(const ExperimentSpec& spec, int fine_n, int coarse_n,
                                 double t, const RunOverrides& ov) {
  if (fine_n % coarse_n != 0)
    throw std::invalid_argument("reference_solution: fine mesh must refine the coarse one");
  RunOverrides fine_ov = ov;
  fine_ov.t_final = t;
  const RunOutcome fine = run_single(spec, 1, fine_n, true, fine_ov);

  const int f = fine_n / coarse_n;
  FieldAverages coarse(fine.final_field.n_vars(), coarse_n, 2);
  for (int i = 0; i < coarse_n; ++i) {
    StateVec sum(fine.final_field.n_vars());
    for (int k = 0; k < f; ++k) sum += fine.final_field.get(i * f + k);
    sum *= 1.0 / f;
    coarse.set(i, sum);
  }
  return coarse;
}

std::vector<ConvergenceEntry> convergence_orders(const ErrorReport& report) {
  std::vector<ConvergenceEntry> table;
  const RunOutcome* prev = nullptr;
  for (const auto& run : report.runs) {
    ConvergenceEntry e;
    e.cells = run.cells;
    e.scheme_order = run.order;
    e.errors = run.err_vs_stationary;
    const int n = static_cast<int>(e.errors.size());
    e.rates.assign(n, std::nan(""));
    e.at_floor.assign(n, false);
    const bool chained = prev && prev->order == run.order && prev->cells < run.cells;
    for (int c = 0; c < n; ++c) {
      e.at_floor[c] = e.errors[c] < 1e-13;
      if (chained && !e.at_floor[c] && prev->err_vs_stationary[c] > 0.0 && e.errors[c] > 0.0)
        e.rates[c] = std::log2(prev->err_vs_stationary[c] / e.errors[c]) /
                     std::log2(static_cast<double>(run.cells) / prev->cells);
    }
    table.push_back(std::move(e));
    prev = &report.runs[table.size() - 1];
  }
  return table;
}

}  // namespace wbcol
