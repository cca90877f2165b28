#pragma once

#include <optional>
#include <string>

#include "wbcol/scheme.hpp"

namespace wbcol {

struct Perturbation {
  struct Bump {
    int comp;
    double amp;
    double x0, x1;
  };
  struct Gaussian {
    int comp;
    double amp;
    double center, width;  // amp * exp(-width (x - center)^2)
  };
  std::vector<Bump> bumps;
  std::vector<Gaussian> gaussians;

  bool empty() const { return bumps.empty() && gaussians.empty(); }
  StateVec delta(int n_vars, double x) const;
};

// Initial-data recipes: (a) exact cell averages, (b) rule quadrature of the
// closed form, (c) quadrature of a sub-stepped fine collocation solve,
// (d) collocation solve on the scheme's own nodes (the discrete stationary
// sequence).
struct ICRecipe {
  enum class Kind { exact_average, rule_points, fine_collocation, collocation };

  Kind kind = Kind::collocation;
  std::function<StateVec(double dx)> anchor;  // Cauchy data, may depend on the mesh
  double anchor_x = 0.0;
  std::function<StateVec(double)> point_value;           // U*(x), when known
  std::function<StateVec(double, double)> cell_average;  // exact average on [xl, xr]
  int fine_factor = 10;
};

ICRecipe::Kind ic_kind_from_string(const std::string& s);  // "a".."d"
std::string to_string(ICRecipe::Kind k);

struct ExperimentSpec {
  std::string id;
  std::string title;
  std::string model_id;
  double g = 9.81;
  double manning_k = 0.0;
  double manning_eta = 7.0 / 3.0;
  double gamma = 1.5;
  Bathymetry bathymetry = Bathymetry::linear;

  double a = 0.0, b = 1.0;
  double t_final = 1.0;
  double cfl = 0.9;
  std::vector<int> meshes;
  std::vector<int> orders = {1, 2, 3};
  BoundarySpec bc;
  ICRecipe ic;
  Perturbation perturbation;
  int reference_fine_cells = 0;

  ModelPtr make_model() const;
};

std::vector<std::string> experiment_ids();
ExperimentSpec experiment_by_id(const std::string& id);  // throws on unknown id

// Positive subcritical root h(x) of the integrated frictional momentum
// balance anchored at (x0, h_c(q0)); bisection on (h_c, 10 h_c).
double manning_subcritical_depth(double g, double k, double eta, double q0, double x0,
                                 double x);

struct PreparedRun {
  StationaryHint hint;      // per-recipe stationary reference, ghosts included
  FieldAverages initial;    // hint averages + perturbation
};

PreparedRun prepare_initial_averages(const ExperimentSpec& spec,
                                     const BalanceLawModel& model, const Mesh& mesh,
                                     const OrderConfig& oc, const CollocationConfig& cfg,
                                     ICRecipe::Kind kind);

std::vector<double> l1_error(const FieldAverages& fa, const FieldAverages& fb,
                             const Mesh& mesh);

struct RunOverrides {
  std::optional<double> t_final;
  std::optional<double> cfl;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> threads;
  std::optional<ICRecipe::Kind> ic_kind;
};

struct RunOutcome {
  std::string experiment;
  int order = 1;
  int cells = 0;
  bool well_balanced = true;
  ICRecipe::Kind ic_kind = ICRecipe::Kind::collocation;
  double t_final = 0.0;
  int steps = 0;
  double wall_ms = 0.0;
  long resonance_hits = 0;
  int fallback_cells = 0;
  std::vector<double> err_vs_initial;
  std::vector<double> err_vs_stationary;
  Mesh mesh;
  FieldAverages initial_field;
  FieldAverages final_field;
  StationaryHint hint;
};

RunOutcome run_single(const ExperimentSpec& spec, int order, int cells,
                      bool well_balanced, const RunOverrides& ov = {});

struct ErrorReport {
  std::string experiment;
  bool well_balanced = true;
  std::vector<std::string> component_names;
  std::vector<RunOutcome> runs;  // grouped by order, meshes ascending
};

ErrorReport run_experiment(const ExperimentSpec& spec, const std::vector<int>& orders,
                           const std::vector<int>& meshes, bool well_balanced,
                           const RunOverrides& ov = {});

// First-order well-balanced run on fine_n cells, conservatively restricted
// to coarse_n cells (fine_n must be a multiple of coarse_n).
FieldAverages reference_solution(const ExperimentSpec& spec, int fine_n, int coarse_n,
                                 double t, const RunOverrides& ov = {});

struct ConvergenceEntry {
  int cells = 0;
  int scheme_order = 1;
  std::vector<double> errors;  // per component, vs the stationary reference
  std::vector<double> rates;   // log2(e_N / e_2N); NaN on the first row
  std::vector<bool> at_floor;  // error below 1e-13: rate printed as a dash
};

std::vector<ConvergenceEntry> convergence_orders(const ErrorReport& report);

}  // namespace wbcol
