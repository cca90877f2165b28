#include "wbcol/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wbcol {

using nlohmann::json;

RunOverrides RunConfig::overrides() const {
  RunOverrides ov;
  ov.cfl = cfl;
  ov.tol = tol;
  if (max_iter > 0) ov.max_iter = max_iter;
  ov.threads = threads;
  if (t_final) ov.t_final = t_final;
  if (!ic.empty()) ov.ic_kind = ic_kind_from_string(ic);
  return ov;
}

namespace {

ExperimentSpec inline_spec_from_json(const json& j) {
  ExperimentSpec s;
  s.id = j.value("name", std::string("inline"));
  s.model_id = j.at("model").get<std::string>();
  s.g = j.value("g", 9.81);
  s.manning_k = j.value("k", 0.0);
  s.manning_eta = j.value("eta", 7.0 / 3.0);
  s.gamma = j.value("gamma", 1.5);
  if (j.contains("bathymetry"))
    s.bathymetry = bathymetry_from_string(j.at("bathymetry").get<std::string>());
  else if (s.model_id == "shallow_water" || s.model_id == "shallow_water_manning")
    s.bathymetry = Bathymetry::flat;

  const auto dom = j.at("domain");
  s.a = dom.at(0).get<double>();
  s.b = dom.at(1).get<double>();
  s.t_final = j.at("tfinal").get<double>();
  s.meshes = j.value("cells", std::vector<int>{100});

  s.ic.anchor_x = j.value("anchor_x", s.a);
  const auto st = j.at("anchor").get<std::vector<double>>();
  StateVec anchor(static_cast<int>(st.size()));
  for (int c = 0; c < anchor.size(); ++c) anchor[c] = st[c];
  s.ic.anchor = [anchor](double) { return anchor; };

  auto parse_side = [](const json& side) {
    BoundarySide out;
    for (const auto& p : side)
      out.prescribed.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
    return out;
  };
  if (j.contains("bc")) {
    if (j["bc"].contains("left")) s.bc.left = parse_side(j["bc"]["left"]);
    if (j["bc"].contains("right")) s.bc.right = parse_side(j["bc"]["right"]);
  }
  if (j.contains("perturbation")) {
    for (const auto& b : j["perturbation"].value("bumps", json::array()))
      s.perturbation.bumps.push_back({b.at("comp").get<int>(), b.at("amp").get<double>(),
                                      b.at("x0").get<double>(), b.at("x1").get<double>()});
    for (const auto& gsn : j["perturbation"].value("gaussians", json::array()))
      s.perturbation.gaussians.push_back({gsn.at("comp").get<int>(),
                                          gsn.at("amp").get<double>(),
                                          gsn.at("center").get<double>(),
                                          gsn.at("width").get<double>()});
  }
  return s;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("experiment")) {
    cfg.spec = experiment_by_id(j.at("experiment").get<std::string>());
  } else if (j.contains("model")) {
    cfg.spec = inline_spec_from_json(j);
    cfg.inline_spec = true;
  } else {
    throw std::invalid_argument("config needs either \"experiment\" or \"model\"");
  }
  cfg.orders = j.value("orders", cfg.spec.orders);
  cfg.cells = j.value("cells", cfg.spec.meshes);
  cfg.variant = j.value("variant", std::string("wb"));
  if (cfg.variant != "wb" && cfg.variant != "nwb")
    throw std::invalid_argument("variant must be \"wb\" or \"nwb\"");
  cfg.ic = j.value("ic", std::string(""));
  if (!cfg.ic.empty()) ic_kind_from_string(cfg.ic);  // validate
  cfg.out_dir = j.value("out", std::string("."));
  cfg.cfl = j.value("cfl", 0.9);
  cfg.tol = j.value("tol", 1e-15);
  cfg.max_iter = j.value("max_iter", 0);
  cfg.threads = j.value("threads", 1);
  if (j.contains("tfinal")) cfg.t_final = j.at("tfinal").get<double>();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config field error in " + path + ": " + e.what());
  }
}

json config_to_json(const RunConfig& cfg) {
  json j;
  if (!cfg.inline_spec) j["experiment"] = cfg.spec.id;
  j["orders"] = cfg.orders;
  j["cells"] = cfg.cells;
  j["variant"] = cfg.variant;
  if (!cfg.ic.empty()) j["ic"] = cfg.ic;
  j["out"] = cfg.out_dir;
  j["cfl"] = cfg.cfl;
  j["tol"] = cfg.tol;
  if (cfg.max_iter > 0) j["max_iter"] = cfg.max_iter;
  j["threads"] = cfg.threads;
  if (cfg.t_final) j["tfinal"] = *cfg.t_final;
  return j;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

}  // namespace

void write_error_table(const ErrorReport& report, int scheme_order,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "cells,component,error,order\n";

  ErrorReport filtered;
  filtered.experiment = report.experiment;
  for (const auto& run : report.runs)
    if (run.order == scheme_order) filtered.runs.push_back(run);
  const auto table = convergence_orders(filtered);

  for (const auto& e : table) {
    for (size_t c = 0; c < e.errors.size(); ++c) {
      const std::string name = c < report.component_names.size()
                                   ? report.component_names[c]
                                   : "c" + std::to_string(c);
      out << e.cells << "," << name << "," << sci(e.errors[c]) << ",";
      if (!e.at_floor[c] && !std::isnan(e.rates[c])) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", e.rates[c]);
        out << buf;
      }
      out << "\n";
    }
  }
}

void write_snapshot(const FieldAverages& field, const Mesh& mesh, double t,
                    const std::string& path, const BalanceLawModel& model,
                    const StationaryHint* hint) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const auto names = model.component_names();
  out << "x_center";
  for (const auto& n : names) out << "," << n;
  if (hint && hint->valid)
    for (const auto& n : names) out << ",d" << n;
  out << "\n";
  char buf[64];
  for (int i = 0; i < field.n_cells(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", mesh.cell_center(i));
    out << buf;
    const StateVec u = field.get(i);
    for (int c = 0; c < field.n_vars(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", u[c]);
      out << buf;
    }
    if (hint && hint->valid) {
      const StateVec d = u - hint->averages.get(i);
      for (int c = 0; c < field.n_vars(); ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", d[c]);
        out << buf;
      }
    }
    out << "\n";
  }
  (void)t;
}

}  // namespace wbcol
