#include "moreau/io.hpp"

#include "moreau/nano.hpp"
#include "moreau/usv.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace moreau::io {

using nlohmann::json;  // std::map-backed: keys serialize alphabetically

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known)
      throw std::invalid_argument("scenario: unknown key \"" + it.key() + "\" in " + where);
  }
}

ScenarioFile frozen_dataset(const std::string& kind) {
  ScenarioFile f;
  f.kind = kind;
  if (kind == "usv") {
    f.spec = usv::scenario();
    f.grid_T = usv::optimal_horizon(100.0, 60.0);
    f.grid_k = 4096;
  } else if (kind == "nano") {
    f.spec = nano::scenario();
    const auto c = nano::evaluate_case(1, 1.1903);
    f.grid_T = c.T_bar / nano::kSimTimeUnit;
    f.grid_k = 4096;
    f.time_unit = nano::kSimTimeUnit;
  } else {
    throw std::invalid_argument("scenario: unknown kind \"" + kind + "\"");
  }
  return f;
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

void apply_keys(ScenarioFile& f, const json& j) {
  const auto n_default = f.spec.initial.positions.empty()
                             ? Eigen::Index(0)
                             : f.spec.initial.count();
  Eigen::Index n = j.contains("n") ? j.at("n").get<Eigen::Index>() : n_default;
  if (n < 2) throw std::invalid_argument("scenario: n must be >= 2");

  std::vector<double> radii;
  std::vector<Eigen::Vector2d> initial;
  if (j.contains("radii")) {
    radii = j.at("radii").get<std::vector<double>>();
  } else {
    radii = f.spec.initial.radii;
  }
  if (j.contains("initial")) {
    for (const auto& pair : j.at("initial")) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("scenario: initial entries must be [x, y] pairs");
      initial.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
  } else {
    initial = f.spec.initial.positions;
  }
  if (static_cast<Eigen::Index>(radii.size()) != n ||
      static_cast<Eigen::Index>(initial.size()) != n)
    throw std::invalid_argument("scenario: radii/initial must have n entries");
  f.spec.initial = Configuration(initial, radii);

  auto read_vec = [&](const char* key, Vec& target) {
    if (!j.contains(key)) return;
    const auto values = j.at(key).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != n)
      throw std::invalid_argument(std::string("scenario: ") + key + " must have n entries");
    target = Eigen::Map<const Vec>(values.data(), n);
  };
  if (f.spec.model.speeds.size() != n) {
    // growing n for a custom scenario: demand explicit arrays
    f.spec.model.speeds = Vec::Ones(n);
    f.spec.model.angles = Vec::Zero(n);
    f.spec.model.lower = Vec::Zero(n);
    f.spec.model.upper = Vec::Ones(n);
  }
  read_vec("speeds", f.spec.model.speeds);
  if (j.contains("angles_deg")) {
    const auto deg = j.at("angles_deg").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(deg.size()) != n)
      throw std::invalid_argument("scenario: angles_deg must have n entries");
    f.spec.model.angles = Vec(n);
    for (Eigen::Index i = 0; i < n; ++i) f.spec.model.angles(i) = deg_to_rad(deg[static_cast<size_t>(i)]);
  }

  if (j.contains("control_bounds")) {
    const json& cb = j.at("control_bounds");
    reject_unknown_keys(cb, {"per_object", "couplings"}, "control_bounds");
    if (cb.contains("per_object")) {
      const auto& per = cb.at("per_object");
      if (static_cast<Eigen::Index>(per.size()) != n)
        throw std::invalid_argument("scenario: per_object bounds must have n entries");
      f.spec.model.lower = Vec(n);
      f.spec.model.upper = Vec(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& lohi = per[static_cast<size_t>(i)];
        if (!lohi.is_array() || lohi.size() != 2)
          throw std::invalid_argument("scenario: per_object entries must be [lo, hi]");
        f.spec.model.lower(i) = lohi[0].get<double>();
        f.spec.model.upper(i) = lohi[1].get<double>();
      }
    }
    if (cb.contains("couplings")) {
      f.spec.model.couplings.clear();
      for (const auto& cp : cb.at("couplings")) {
        reject_unknown_keys(cp, {"coeffs", "rhs"}, "coupling");
        MagnitudeCoupling mc;
        const auto coeffs = cp.at("coeffs").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(coeffs.size()) != n)
          throw std::invalid_argument("scenario: coupling coeffs must have n entries");
        mc.coeffs = Eigen::Map<const Vec>(coeffs.data(), n);
        mc.rhs = cp.value("rhs", 0.0);
        f.spec.model.couplings.push_back(std::move(mc));
      }
    }
  }

  if (j.contains("constraint")) {
    const auto kind = j.at("constraint").get<std::string>();
    if (kind == "sum_norm_polyhedron") f.spec.constraint = ConstraintKind::SumNormChain;
    else if (kind == "euclidean_pairs") f.spec.constraint = ConstraintKind::EuclideanPairs;
    else throw std::invalid_argument("scenario: constraint must be sum_norm_polyhedron or euclidean_pairs");
  }
  if (j.contains("offset_override")) {
    const auto values = j.at("offset_override").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != n - 1)
      throw std::invalid_argument("scenario: offset_override must have n-1 entries");
    f.spec.offset_override = Eigen::Map<const Vec>(values.data(), n - 1);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown_keys(g, {"k", "T"}, "grid");
    if (g.contains("k")) f.grid_k = g.at("k").get<Eigen::Index>();
    if (f.grid_k < 1) throw std::invalid_argument("scenario: grid.k must be >= 1");
    if (g.contains("T")) {
      f.grid_T = g.at("T").get<double>();
      if (!(*f.grid_T > 0.0)) throw std::invalid_argument("scenario: grid.T must be positive");
    }
  }
  if (j.contains("cost")) {
    if (j.at("cost").get<std::string>() != "quadratic_state_time")
      throw std::invalid_argument("scenario: cost must be quadratic_state_time");
    f.spec.cost = CostKind::QuadraticStateTime;
  }
  if (j.contains("time_unit")) {
    f.time_unit = j.at("time_unit").get<double>();
    if (!(f.time_unit > 0.0)) throw std::invalid_argument("scenario: time_unit must be positive");
  }
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: top-level document must be an object");
  reject_unknown_keys(j,
                      {"kind", "n", "radii", "initial", "speeds", "angles_deg", "control_bounds",
                       "constraint", "offset_override", "grid", "cost", "time_unit"},
                      "scenario");
  if (!j.contains("kind")) throw std::invalid_argument("scenario: missing \"kind\"");
  const auto kind = j.at("kind").get<std::string>();

  ScenarioFile f;
  if (kind == "usv" || kind == "nano") {
    f = frozen_dataset(kind);
  } else if (kind == "custom") {
    f.kind = "custom";
    for (const char* required : {"n", "radii", "initial", "speeds", "angles_deg", "control_bounds"})
      if (!j.contains(required))
        throw std::invalid_argument(std::string("scenario: custom kind requires \"") + required + "\"");
    // placeholder two-disk configuration, replaced by apply_keys
    f.spec.initial = Configuration({Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 3)}, {1.0, 1.0});
    f.spec.model.speeds = Vec();
  } else {
    throw std::invalid_argument("scenario: kind must be usv, nano or custom");
  }
  apply_keys(f, j);
  if (f.spec.constraint == ConstraintKind::SumNormChain)
    validate_orientation(f.spec.initial);
  return f;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioFile& f) {
  json j;
  j["kind"] = f.kind;
  const Eigen::Index n = f.spec.count();
  j["n"] = n;
  j["radii"] = f.spec.initial.radii;
  json initial = json::array();
  for (const auto& p : f.spec.initial.positions) initial.push_back({p.x(), p.y()});
  j["initial"] = initial;
  j["speeds"] = std::vector<double>(f.spec.model.speeds.data(), f.spec.model.speeds.data() + n);
  std::vector<double> deg(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) deg[static_cast<size_t>(i)] = rad_to_deg(f.spec.model.angles(i));
  j["angles_deg"] = deg;
  json per = json::array();
  for (Eigen::Index i = 0; i < n; ++i)
    per.push_back({f.spec.model.lower(i), f.spec.model.upper(i)});
  json couplings = json::array();
  for (const auto& cp : f.spec.model.couplings) {
    json c;
    c["coeffs"] = std::vector<double>(cp.coeffs.data(), cp.coeffs.data() + n);
    c["rhs"] = cp.rhs;
    couplings.push_back(c);
  }
  j["control_bounds"] = {{"per_object", per}, {"couplings", couplings}};
  j["constraint"] = f.spec.constraint == ConstraintKind::SumNormChain ? "sum_norm_polyhedron"
                                                                      : "euclidean_pairs";
  if (f.spec.offset_override) {
    j["offset_override"] = std::vector<double>(
        f.spec.offset_override->data(), f.spec.offset_override->data() + f.spec.offset_override->size());
  }
  json grid;
  grid["k"] = f.grid_k;
  if (f.grid_T) grid["T"] = *f.grid_T;
  j["grid"] = grid;
  j["cost"] = "quadratic_state_time";
  j["time_unit"] = f.time_unit;
  return j.dump(2) + "\n";
}

namespace {

void append_full(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const SimulationResult& sim) {
  const Trajectory& traj = sim.trajectory;
  const auto n = static_cast<Eigen::Index>(traj.states().front().size() / 2);
  const auto rows = static_cast<Eigen::Index>(
      sim.multipliers.empty() ? 0 : sim.multipliers.front().size());

  std::string header = "t";
  for (Eigen::Index i = 1; i <= n; ++i) {
    header += ",x" + std::to_string(i) + "1";
    header += ",x" + std::to_string(i) + "2";
  }
  for (Eigen::Index j = 1; j <= rows; ++j) header += ",eta_" + std::to_string(j);
  header += ",active_flags";
  os << header << "\n";

  for (Eigen::Index i = 0; i <= traj.grid().k; ++i) {
    std::string line;
    append_full(line, traj.grid().node(i));
    const Vec& x = traj.states()[static_cast<size_t>(i)];
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      line += ',';
      append_full(line, x(c));
    }
    // multipliers and activity of the interval ending at this node
    unsigned long flags = 0;
    if (i == 0) {
      for (Eigen::Index j = 0; j < rows; ++j) line += ",0";
    } else {
      const Vec& eta = sim.multipliers[static_cast<size_t>(i - 1)];
      for (Eigen::Index j = 0; j < rows; ++j) {
        line += ',';
        append_full(line, eta(j));
      }
      for (Eigen::Index j : sim.active_sets[static_cast<size_t>(i - 1)])
        flags |= 1ul << j;
    }
    line += ',' + std::to_string(flags);
    os << line << "\n";
  }
}

std::string trajectory_csv(const SimulationResult& sim) {
  std::ostringstream os;
  write_trajectory_csv(os, sim);
  return os.str();
}

void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows) {
  os << "k,distance\n";
  for (const auto& r : rows) {
    std::string line = std::to_string(r.k_coarse);
    line += ',';
    append_full(line, r.distance);
    os << line << "\n";
  }
}

std::string certificate_json(const Certificate& cert, double threshold) {
  json j;
  j["mu"] = cert.mu;
  j["H_bar"] = cert.H_bar;
  j["p"] = std::vector<double>(cert.p.data(), cert.p.data() + cert.p.size());
  json atoms = json::array();
  for (const auto& atom : cert.gamma_atoms) {
    json a;
    a["t"] = atom.time;
    a["mass"] = std::vector<double>(atom.mass.data(), atom.mass.data() + atom.mass.size());
    atoms.push_back(a);
  }
  j["gamma_atoms"] = atoms;
  j["eta_terminal"] = std::vector<double>(cert.eta_terminal.data(),
                                          cert.eta_terminal.data() + cert.eta_terminal.size());
  json e0 = json::array();
  for (const auto& [lo, hi] : cert.active_intervals) e0.push_back({lo, hi});
  j["E0"] = e0;
  j["support_condition_ok"] = cert.support_condition_ok;
  j["interiority_assumption_violated"] = cert.interiority_violated;
  j["enhanced_nontriviality"] = cert.enhanced_nontriviality;
  j["nontrivial"] = cert.nontrivial;
  j["residuals"] = cert.residuals;
  j["threshold"] = threshold;
  j["pass"] = cert.pass(threshold);
  return j.dump(2) + "\n";
}

std::string optimize_report_json(const OptimizeReport& r) {
  json j;
  j["control"] = r.control;
  if (r.t_contact) j["t_contact"] = *r.t_contact;
  j["T_bar"] = r.T_bar;
  j["cost"] = r.cost;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["mode"] = r.mode;
  if (!r.contact_products.empty()) j["contact_products"] = r.contact_products;
  if (r.horizon_product) j["horizon_product"] = *r.horizon_product;
  return j.dump(2) + "\n";
}

}  // namespace moreau::io
