#pragma once

#include <string>

#include "json.hpp"
#include "wbcol/experiments.hpp"

namespace wbcol {

// Fully resolved run description: a builtin experiment id or an inline spec,
// plus the sweep parameters and solver overrides.
struct RunConfig {
  ExperimentSpec spec;
  bool inline_spec = false;
  std::vector<int> orders;
  std::vector<int> cells;
  std::string variant = "wb";  // "wb" | "nwb"
  std::string ic = "";         // "", or "a".."d"
  std::string out_dir = ".";
  double cfl = 0.9;
  double tol = 1e-15;
  int max_iter = 0;  // 0: use the solver default
  int threads = 1;
  std::optional<double> t_final;

  RunOverrides overrides() const;
  bool well_balanced() const { return variant == "wb"; }
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig parse_config(const std::string& path);  // throws with file/field context
nlohmann::json config_to_json(const RunConfig& cfg);

// CSV: header cells,component,error,order; rate column empty below the
// machine-noise floor; errors in scientific notation with 6 significant
// digits. One scheme order per file.
void write_error_table(const ErrorReport& report, int scheme_order,
                       const std::string& path);

// CSV: x_center, one column per component, and difference-to-stationary
// columns when a hint is supplied.
void write_snapshot(const FieldAverages& field, const Mesh& mesh, double t,
                    const std::string& path, const BalanceLawModel& model,
                    const StationaryHint* hint = nullptr);

}  // namespace wbcol
