#pragma once

#include "moreau/certify.hpp"
#include "moreau/sweep_sim.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace moreau::io {

/// Parsed scenario file. `kind` usv/nano starts from the frozen dataset
/// with explicit keys applied on top; `custom` requires the full schema.
struct ScenarioFile {
  std::string kind;  // "usv" | "nano" | "custom"
  ScenarioSpec spec;
  Eigen::Index grid_k = 4096;
  std::optional<double> grid_T;
  /// Seconds per simulation time unit (the nano scenario runs scaled).
  double time_unit = 1.0;
};

/// Parses and schema-validates a scenario document. Unknown keys are
/// rejected. Throws std::invalid_argument with a diagnostic.
ScenarioFile parse_scenario(const std::string& json_text);
ScenarioFile load_scenario(const std::string& path);

/// Canonical serialization: alphabetically ordered keys, full precision.
std::string serialize_scenario(const ScenarioFile& file);

/// CSV with header t,x11,x12,...,eta_1,...,active_flags; one row per
/// grid node, 17 significant digits, LF line endings.
void write_trajectory_csv(std::ostream& os, const SimulationResult& sim);
std::string trajectory_csv(const SimulationResult& sim);

void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows);

std::string certificate_json(const Certificate& cert, double threshold);

struct OptimizeReport {
  std::vector<double> control;
  std::optional<double> t_contact;
  double T_bar = 0.0;
  double cost = 0.0;
  std::string method;
  Eigen::Index iterations = 0;
  std::string mode;  // "closed_form" | "simulated"
  // control-independent closed-form products, when the scenario has them
  std::vector<double> contact_products;
  std::optional<double> horizon_product;
};
std::string optimize_report_json(const OptimizeReport& report);

}  // namespace moreau::io
