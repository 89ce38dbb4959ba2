// moreau-opt: scenario simulation, optimization and candidate
// certification for planar controlled sweeping processes.

#include "moreau/certify.hpp"
#include "moreau/io.hpp"
#include "moreau/nano.hpp"
#include "moreau/optimize.hpp"
#include "moreau/sweep_sim.hpp"
#include "moreau/usv.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace moreau;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

Vec parse_control(const std::string& csv, Eigen::Index n) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  if (static_cast<Eigen::Index>(values.size()) != n)
    throw std::invalid_argument("--control needs " + std::to_string(n) + " magnitudes");
  return Eigen::Map<const Vec>(values.data(), n);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // LF endings everywhere
  if (!os) throw std::invalid_argument("cannot open output file " + path);
  return os;
}

double resolve_horizon(const io::ScenarioFile& file, double cli_T) {
  if (cli_T > 0.0) return cli_T;
  if (file.grid_T) return *file.grid_T;
  throw std::invalid_argument("no horizon: pass --T or set grid.T in the scenario");
}

int cmd_simulate(const std::string& scenario_path, const std::string& control, Eigen::Index k,
                 double T, const std::string& out) {
  const io::ScenarioFile file = io::load_scenario(scenario_path);
  const Vec u = parse_control(control, file.spec.count());
  const Grid grid(resolve_horizon(file, T), k > 0 ? k : file.grid_k);
  const SimulationResult sim = simulate(file.spec, ControlSignal::constant(u), grid);
  auto os = open_out(out);
  io::write_trajectory_csv(os, sim);
  return kExitOk;
}

int cmd_optimize(const std::string& scenario_path, const std::string& method,
                 const std::string& out) {
  const io::ScenarioFile file = io::load_scenario(scenario_path);
  io::OptimizeReport report;
  report.method = method;

  if (file.kind == "usv") {
    const usv::UsvCandidate best = usv::optimize();
    report.control = {best.u1, best.u2};
    report.t_contact = best.t_m;
    report.T_bar = best.T_bar;
    report.cost = best.cost;
    report.mode = "closed_form";
  } else if (file.kind == "nano") {
    const nano::NanoOptimum best = nano::optimize();
    report.control = {best.best.u1, best.best.u2};
    report.t_contact = best.best.t_star;
    report.T_bar = best.best.T_bar;
    report.cost = best.best.cost;
    report.mode = "closed_form";
    const auto forces = nano::compute_forces(nano::NanoEnvironment::make(),
                                             nano::initial_configuration());
    const auto products = nano::contact_products(forces.s1(), forces.s2());
    report.contact_products = {products.first, products.second};
    report.horizon_product = nano::horizon_product(forces.s1(), forces.s2());
  } else {
    // No closed forms: score controls by simulation, scanning the grid
    // prefix for the best free horizon.
    const double T = resolve_horizon(file, 0.0);
    const Grid grid(T, file.grid_k);
    Eigen::Index iterations = 0;
    auto objective = [&](const Vec& mags) {
      ++iterations;
      try {
        const SimulationResult sim = simulate(file.spec, ControlSignal::constant(mags), grid);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 1; i <= grid.k; ++i)
          best = std::min(best, cost_value(file.spec.cost,
                                           sim.trajectory.states()[static_cast<size_t>(i)],
                                           grid.node(i) * file.time_unit));
        return best;
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    opt::BoxDomain dom;
    dom.lower = file.spec.model.lower;
    dom.upper = file.spec.model.upper;
    for (const auto& cp : file.spec.model.couplings) {
      Eigen::Index pivot = -1;
      for (Eigen::Index i = 0; i < cp.coeffs.size(); ++i)
        if (cp.coeffs(i) != 0.0) { pivot = i; break; }
      opt::BoxDomain::Coupling bc;
      bc.bound = pivot;
      bc.coeffs = -cp.coeffs / cp.coeffs(pivot);
      bc.coeffs(pivot) = 0.0;
      bc.shift = cp.rhs / cp.coeffs(pivot);
      dom.couplings.push_back(std::move(bc));
    }
    opt::SearchResult coarse = opt::grid_search(objective, dom, 9);
    const opt::NelderMeadResult polished =
        (method == "grid") ? opt::NelderMeadResult{coarse.point, coarse.value, 0, true, false}
                           : opt::nelder_mead(objective, coarse.point, dom);
    const Vec u = polished.value <= coarse.value ? polished.point : coarse.point;
    const SimulationResult sim = simulate(file.spec, ControlSignal::constant(u), grid);
    double best_cost = std::numeric_limits<double>::infinity();
    double best_T = T;
    for (Eigen::Index i = 1; i <= grid.k; ++i) {
      const double c = cost_value(file.spec.cost, sim.trajectory.states()[static_cast<size_t>(i)],
                                  grid.node(i) * file.time_unit);
      if (c < best_cost) { best_cost = c; best_T = grid.node(i) * file.time_unit; }
    }
    report.control.assign(u.data(), u.data() + u.size());
    report.t_contact = sim.first_contact;
    report.T_bar = best_T;
    report.cost = best_cost;
    report.iterations = iterations;
    report.mode = "simulated";
  }

  auto os = open_out(out);
  os << io::optimize_report_json(report);
  return kExitOk;
}

int cmd_certify(const std::string& scenario_path, const std::string& control, double T,
                Eigen::Index k, double threshold, const std::string& out) {
  const io::ScenarioFile file = io::load_scenario(scenario_path);
  const Vec u = parse_control(control, file.spec.count());
  // --T is in the scenario's simulation time units, like grid.T.
  const Grid grid(resolve_horizon(file, T), k > 0 ? k : file.grid_k);
  const SimulationResult sim = simulate(file.spec, ControlSignal::constant(u), grid);

  // Certify in base units: undo the scenario's time scaling so the cost
  // is the declared one.
  ScenarioSpec base_spec = file.spec;
  base_spec.model.speeds /= file.time_unit;
  const Trajectory base_traj = rescale_time(sim.trajectory, file.time_unit);
  const Certificate cert = certify(base_spec, base_traj, ControlSignal::constant(u));

  auto os = open_out(out);
  os << io::certificate_json(cert, threshold);  // pass/fail lives in the JSON
  return kExitOk;
}

int cmd_converge(const std::string& scenario_path, const std::string& control, Eigen::Index k_min,
                 Eigen::Index k_max, double T, const std::string& out) {
  const io::ScenarioFile file = io::load_scenario(scenario_path);
  const Vec u = parse_control(control, file.spec.count());
  std::vector<Eigen::Index> ks;
  for (Eigen::Index k = k_min; k <= k_max; k *= 2) ks.push_back(k);
  const auto rows =
      refine_and_compare(file.spec, ControlSignal::constant(u), resolve_horizon(file, T), ks);
  auto os = open_out(out);
  io::write_refinement_csv(os, rows);
  return kExitOk;
}

int cmd_usv_study(const std::string& out) {
  const usv::UsvCandidate best = usv::optimize();
  std::ostringstream report;
  report << "two-vessel study\n";
  report << "  optimal |u| = (" << best.u1 << ", " << best.u2 << ")\n";
  report << "  contact time   " << best.t_m << "\n";
  report << "  multiplier     " << best.eta_m << "\n";
  report << "  horizon        " << best.T_bar << "\n";
  report << "  cost           " << best.cost << "\n";
  report << "  terminal       (" << best.terminal.transpose() << ")\n";

  const ScenarioSpec spec = usv::scenario();
  const Trajectory traj = usv::synthesize_trajectory(best, 4000);
  const Certificate cert =
      certify(spec, traj, ControlSignal::constant((Vec(2) << best.u1, best.u2).finished()));
  report << "  certificate residual max = " << cert.max_residual()
         << (cert.pass() ? "  (pass)" : "  (FAIL)") << "\n";
  if (cert.interiority_violated)
    report << "  note: optimal control sits on the boundary of U; the interior-control\n"
              "  assumption behind the closed forms does not hold at the optimum\n";
  std::cout << report.str();
  if (!out.empty()) {
    auto os = open_out(out);
    os << io::certificate_json(cert, 1e-6);
  }
  return kExitOk;
}

int cmd_nano_study(const std::string& out) {
  const auto env = nano::NanoEnvironment::make();
  const auto forces = nano::compute_forces(env, nano::initial_configuration());
  const auto opt = nano::optimize();
  std::ostringstream report;
  report << "microtube study\n";
  report << "  speeds s = (" << forces.s1() << ", " << forces.s2() << ")\n";
  const auto products = nano::contact_products(forces.s1(), forces.s2());
  report << "  contact products t*|u2| = " << products.first << ", " << products.second << "\n";
  report << "  horizon product T|u2|   = " << nano::horizon_product(forces.s1(), forces.s2())
         << "\n";
  report << "  winner: case " << opt.best.case_id << " (cost " << opt.best.cost << ")";
  report << (opt.other_case.sweeping_feasible
                 ? "\n"
                 : "; other case crosses the chain constraint and is infeasible\n");
  report << "  flat valley of J over |u2|: [" << opt.flat_range_lo << ", " << opt.flat_range_hi
         << "] spread " << opt.flat_spread << "\n";
  std::cout << report.str();
  if (!out.empty()) {
    io::OptimizeReport r;
    r.control = {opt.best.u1, opt.best.u2};
    r.t_contact = opt.best.t_star;
    r.T_bar = opt.best.T_bar;
    r.cost = opt.best.cost;
    r.method = "nm";
    r.mode = "closed_form";
    auto os = open_out(out);
    os << io::optimize_report_json(r);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled sweeping process toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, control, out, method = "both";
  Eigen::Index k = 0, k_min = 64, k_max = 4096;
  double T = 0.0, threshold = 1e-6;

  auto* sim = app.add_subcommand("simulate", "Run the catching-up scheme and export CSV");
  sim->add_option("--scenario", scenario_path)->required();
  sim->add_option("--control", control)->required();
  sim->add_option("--k", k);
  sim->add_option("--T", T);
  sim->add_option("--out", out)->required();

  auto* optc = app.add_subcommand("optimize", "Search the control box for the best cost");
  optc->add_option("--scenario", scenario_path)->required();
  optc->add_option("--method", method)->check(CLI::IsMember({"grid", "nm", "both"}));
  optc->add_option("--out", out)->required();

  auto* cert = app.add_subcommand("certify", "Reconstruct multipliers and residuals");
  cert->add_option("--scenario", scenario_path)->required();
  cert->add_option("--control", control)->required();
  cert->add_option("--T", T)->required();
  cert->add_option("--k", k);
  cert->add_option("--threshold", threshold);
  cert->add_option("--out", out)->required();

  auto* conv = app.add_subcommand("converge", "Dyadic refinement distance table");
  conv->add_option("--scenario", scenario_path)->required();
  conv->add_option("--control", control)->required();
  conv->add_option("--k-min", k_min);
  conv->add_option("--k-max", k_max);
  conv->add_option("--T", T);
  conv->add_option("--out", out)->required();

  auto* usv_cmd = app.add_subcommand("usv", "Reproduce the two-vessel case study");
  usv_cmd->add_option("--out", out);

  auto* nano_cmd = app.add_subcommand("nano", "Reproduce the microtube case study");
  nano_cmd->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(scenario_path, control, k, T, out);
    if (optc->parsed()) return cmd_optimize(scenario_path, method, out);
    if (cert->parsed()) return cmd_certify(scenario_path, control, T, k, threshold, out);
    if (conv->parsed()) return cmd_converge(scenario_path, control, k_min, k_max, T, out);
    if (usv_cmd->parsed()) return cmd_usv_study(out);
    if (nano_cmd->parsed()) return cmd_nano_study(out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
