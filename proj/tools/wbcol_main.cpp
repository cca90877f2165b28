#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wbcol/io.hpp"

namespace {

struct CliFlags {
  std::string config_path;
  std::string experiment;
  std::vector<int> orders;
  std::vector<int> cells;
  std::string variant;
  std::string ic;
  std::string out_dir;
  double tfinal = -1.0;
  double cfl = -1.0;
  int threads = 0;
};

void add_common(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration");
  cmd->add_option("--experiment", f.experiment, "builtin experiment id (test1.1 .. test5.1)");
  cmd->add_option("--orders", f.orders, "scheme orders")->delimiter(',');
  cmd->add_option("--cells", f.cells, "mesh sizes")->delimiter(',');
  cmd->add_option("--tfinal", f.tfinal, "final time override");
  cmd->add_option("--cfl", f.cfl, "CFL number");
  cmd->add_option("--variant", f.variant, "wb (well-balanced) or nwb (standard)")
      ->check(CLI::IsMember({"wb", "nwb"}));
  cmd->add_option("--ic", f.ic, "initial-data recipe a|b|c|d")
      ->check(CLI::IsMember({"a", "b", "c", "d"}));
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads for the RHS loops");
}

wbcol::RunConfig resolve(const CliFlags& f) {
  wbcol::RunConfig cfg;
  if (!f.config_path.empty()) {
    cfg = wbcol::parse_config(f.config_path);
  } else if (!f.experiment.empty()) {
    cfg.spec = wbcol::experiment_by_id(f.experiment);
    cfg.orders = cfg.spec.orders;
    cfg.cells = cfg.spec.meshes;
  } else {
    throw std::invalid_argument("either --config or --experiment is required");
  }
  if (!f.experiment.empty() && f.config_path.empty()) cfg.spec = wbcol::experiment_by_id(f.experiment);
  if (!f.orders.empty()) cfg.orders = f.orders;
  if (!f.cells.empty()) cfg.cells = f.cells;
  if (!f.variant.empty()) cfg.variant = f.variant;
  if (!f.ic.empty()) cfg.ic = f.ic;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.tfinal >= 0.0) cfg.t_final = f.tfinal;
  if (f.cfl > 0.0) cfg.cfl = f.cfl;
  if (f.threads > 0) cfg.threads = f.threads;
  return cfg;
}

std::string run_tag(const wbcol::RunConfig& cfg) {
  return cfg.spec.id + "_" + cfg.variant;
}

int do_run(const wbcol::RunConfig& cfg, bool tables_only, bool snapshots) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto model = cfg.spec.make_model();

  wbcol::ErrorReport report = wbcol::run_experiment(cfg.spec, cfg.orders, cfg.cells,
                                                    cfg.well_balanced(), cfg.overrides());

  for (const auto& run : report.runs) {
    std::cout << cfg.spec.id << " order=" << run.order << " cells=" << run.cells
              << " variant=" << cfg.variant << " t=" << run.t_final
              << " steps=" << run.steps << "  L1(final-stationary)=";
    for (size_t c = 0; c < run.err_vs_stationary.size(); ++c)
      std::cout << (c ? "," : "") << run.err_vs_stationary[c];
    std::cout << "  wall=" << run.wall_ms << "ms";
    if (run.resonance_hits > 0) std::cout << " resonance_hits=" << run.resonance_hits;
    std::cout << "\n";

    if (snapshots && !tables_only) {
      const std::string path = cfg.out_dir + "/snapshot_" + run_tag(cfg) + "_o" +
                               std::to_string(run.order) + "_n" +
                               std::to_string(run.cells) + ".csv";
      wbcol::write_snapshot(run.final_field, run.mesh, run.t_final, path, *model,
                            &run.hint);
    }
  }
  for (int order : cfg.orders) {
    const std::string path =
        cfg.out_dir + "/table_" + run_tag(cfg) + "_o" + std::to_string(order) + ".csv";
    wbcol::write_error_table(report, order, path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"well-balanced collocation finite-volume solver for 1D balance laws"};
  app.require_subcommand(1);

  CliFlags rf, tf, sf;
  CLI::App* run = app.add_subcommand("run", "run an experiment, write snapshots and tables");
  add_common(run, rf);
  CLI::App* table = app.add_subcommand("table", "run an experiment, write convergence tables");
  add_common(table, tf);
  CLI::App* snap = app.add_subcommand("snapshot", "run and dump the final state only");
  add_common(snap, sf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(resolve(rf), false, true);
    if (table->parsed()) return do_run(resolve(tf), true, false);
    if (snap->parsed()) return do_run(resolve(sf), false, true);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
