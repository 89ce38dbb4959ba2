#include "moreau/sweep_sim.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

Grid::Grid(double horizon, Eigen::Index subintervals) : T(horizon), k(subintervals) {
  if (!(T > 0.0)) throw std::invalid_argument("Grid: horizon must be positive");
  if (k < 1) throw std::invalid_argument("Grid: need at least one subinterval");
}

Trajectory::Trajectory(Grid grid, std::vector<Vec> states)
    : grid_(grid), states_(std::move(states)) {
  if (static_cast<Eigen::Index>(states_.size()) != grid_.k + 1)
    throw std::invalid_argument("Trajectory: expected k+1 states");
  const double h = grid_.h();
  velocities_.reserve(static_cast<size_t>(grid_.k));
  for (Eigen::Index i = 0; i < grid_.k; ++i)
    velocities_.push_back((states_[static_cast<size_t>(i + 1)] - states_[static_cast<size_t>(i)]) / h);
}

Vec Trajectory::state_at(double t) const {
  if (t <= 0.0) return states_.front();
  if (t >= grid_.T) return states_.back();
  const double h = grid_.h();
  const auto i = static_cast<Eigen::Index>(std::floor(t / h));
  const Eigen::Index idx = std::min(i, grid_.k - 1);
  const double local = t - grid_.node(idx);
  return states_[static_cast<size_t>(idx)] + local * velocities_[static_cast<size_t>(idx)];
}

Vec Trajectory::velocity_at(double t) const {
  const double h = grid_.h();
  auto i = static_cast<Eigen::Index>(std::floor(t / h));
  i = std::clamp<Eigen::Index>(i, 0, grid_.k - 1);
  return velocities_[static_cast<size_t>(i)];
}

ControlSignal ControlSignal::constant(Vec u_mags) {
  ControlSignal s;
  s.samples_.push_back(std::move(u_mags));
  return s;
}

ControlSignal ControlSignal::per_interval(std::vector<Vec> samples) {
  if (samples.empty()) throw std::invalid_argument("ControlSignal: no samples");
  ControlSignal s;
  s.samples_ = std::move(samples);
  return s;
}

Vec ControlSignal::sample(Eigen::Index interval) const {
  if (samples_.size() == 1) return samples_.front();
  if (interval < 0 || interval >= static_cast<Eigen::Index>(samples_.size()))
    throw std::out_of_range("ControlSignal: interval out of range");
  return samples_[static_cast<size_t>(interval)];
}

namespace {

double scene_scale(const Configuration& c) {
  double s = 1.0;
  for (const auto& p : c.positions) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

void check_admissible_input(const ScenarioSpec& spec, const Configuration& c, double scale) {
  if (spec.constraint == ConstraintKind::EuclideanPairs) {
    if (!admissible(c, kMembershipTol * scale))
      throw std::domain_error("step: configuration violates the disk gaps");
  } else {
    const MovingPolyhedron mp = build_sum_norm_constraint_set(spec);
    if ((mp.slacks(c.stacked()).array() < -kMembershipTol * scale).any())
      throw std::domain_error("step: configuration violates the chain constraint");
  }
}

}  // namespace

Polyhedron velocity_feasible_set(const ScenarioSpec& spec, const Configuration& c, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("velocity_feasible_set: h must be positive");
  if (spec.constraint == ConstraintKind::EuclideanPairs)
    return admissible_velocity_set(c, h);
  const MovingPolyhedron mp = build_sum_norm_constraint_set(spec);
  std::vector<Halfspace> hs;
  const Vec slack = mp.slacks(c.stacked());
  for (Eigen::Index j = 0; j < mp.count(); ++j)
    hs.emplace_back(mp.rows.row(j).transpose(), slack(j) / h);
  return Polyhedron(std::move(hs), mp.dim());
}

StepResult step(const ScenarioSpec& spec, const Configuration& c, const Vec& u_mags,
                const StepOptions& opts) {
  if (!(opts.h > 0.0)) throw std::invalid_argument("step: h must be positive");
  const double scale = scene_scale(c);
  check_admissible_input(spec, c, scale);

  const Vec g = controlled_velocity(spec.model, u_mags);
  const Polyhedron vset = velocity_feasible_set(spec, c, opts.h);
  const Projection proj = project_with_certificate(vset, g);

  StepResult r;
  r.velocity = proj.point;
  r.next = Configuration::from_stacked(c.stacked() + opts.h * r.velocity, c.radii);

  // The projected step satisfies the linearized constraints exactly;
  // the true gaps may dip O(h^2) below zero near contact.
  if (!contains(vset, r.velocity, kMembershipTol * std::max(scale, g.lpNorm<Eigen::Infinity>())))
    throw std::runtime_error("step: projection left the velocity set");
  if (spec.constraint == ConstraintKind::EuclideanPairs) {
    if (!admissible(r.next, opts.tol_geom * scale))
      throw std::runtime_error("step: geometric overshoot beyond tol_geom");
  }

  // Multipliers over the raw constraint rows: the projection certificate
  // is stated over unit normals, so rescale per row.
  const MovingPolyhedron raw = scenario_constraints(spec, c);
  r.eta = Vec::Zero(raw.count());
  for (Eigen::Index j = 0; j < raw.count(); ++j) {
    const double len = raw.rows.row(j).norm();
    if (proj.lambda(j) > 0.0) {
      r.eta(j) = proj.lambda(j) / len;
      r.active.push_back(j);
    }
  }
  r.representation_residual =
      (g - r.velocity - raw.rows.transpose() * r.eta).norm();
  return r;
}

SimulationResult simulate(const ScenarioSpec& spec, const ControlSignal& u, const Grid& grid,
                          double tol_geom) {
  const double h = grid.h();
  std::vector<Vec> states;
  states.reserve(static_cast<size_t>(grid.k + 1));
  states.push_back(spec.initial.stacked());

  std::vector<std::vector<Eigen::Index>> active_sets;
  std::vector<Vec> multipliers;

  Configuration c = spec.initial;
  StepOptions opts;
  opts.tol_geom = tol_geom;
  opts.h = h;
  for (Eigen::Index i = 0; i < grid.k; ++i) {
    StepResult s = step(spec, c, u.sample(i), opts);
    active_sets.push_back(std::move(s.active));
    multipliers.push_back(std::move(s.eta));
    c = std::move(s.next);
    states.push_back(c.stacked());
  }
  SimulationResult out{Trajectory(grid, std::move(states)), std::move(active_sets),
                       std::move(multipliers), std::nullopt};

  // Contact report: first node where the declared functional reaches its
  // offset within tolerance, refined by bisection on the interpolant.
  const double scale = scene_scale(spec.initial);
  const double tol = kMembershipTol * scale;
  const std::optional<MovingPolyhedron> chain =
      spec.constraint == ConstraintKind::SumNormChain
          ? std::optional<MovingPolyhedron>(build_sum_norm_constraint_set(spec))
          : std::nullopt;
  auto min_slack = [&](const Vec& x) {
    if (chain) return chain->slacks(x).minCoeff();
    double m = std::numeric_limits<double>::infinity();
    const Configuration cc = Configuration::from_stacked(x, spec.initial.radii);
    for (Eigen::Index i = 0; i < cc.count(); ++i)
      for (Eigen::Index j = i + 1; j < cc.count(); ++j)
        m = std::min(m, disk_distance(cc, i, j));
    return m;
  };
  for (Eigen::Index i = 0; i <= grid.k; ++i) {
    if (min_slack(out.trajectory.states()[static_cast<size_t>(i)]) <= tol) {
      if (i == 0) {
        out.first_contact = 0.0;
        break;
      }
      double lo = grid.node(i - 1), hi = grid.node(i);
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (min_slack(out.trajectory.state_at(mid)) <= tol) hi = mid; else lo = mid;
      }
      out.first_contact = hi;
      break;
    }
  }
  return out;
}

double w12_distance(const Trajectory& a, const Trajectory& b) {
  if (std::abs(a.grid().T - b.grid().T) > 1e-12 * std::max(1.0, a.grid().T))
    throw std::invalid_argument("w12_distance: horizons differ");

  // Merge the node sets; velocities are constant between merged nodes.
  std::vector<double> nodes;
  nodes.reserve(static_cast<size_t>(a.grid().k + b.grid().k + 2));
  for (Eigen::Index i = 0; i <= a.grid().k; ++i) nodes.push_back(a.grid().node(i));
  for (Eigen::Index i = 0; i <= b.grid().k; ++i) nodes.push_back(b.grid().node(i));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double x, double y) { return std::abs(x - y) < 1e-15 * std::max(1.0, a.grid().T); }),
              nodes.end());

  double sq = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double len = nodes[i + 1] - nodes[i];
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
    sq += len * (a.velocity_at(mid) - b.velocity_at(mid)).squaredNorm();
  }
  return (a.states().front() - b.states().front()).norm() + std::sqrt(sq);
}

std::vector<RefinementRow> refine_and_compare(const ScenarioSpec& spec, const ControlSignal& u,
                                              double T, const std::vector<Eigen::Index>& k_list,
                                              double tol_geom) {
  for (size_t i = 0; i + 1 < k_list.size(); ++i)
    if (k_list[i + 1] <= k_list[i])
      throw std::invalid_argument("refine_and_compare: k_list must be strictly increasing");

  std::vector<RefinementRow> rows;
  for (Eigen::Index k : k_list) {
    const Trajectory coarse = simulate(spec, u, Grid(T, k), tol_geom).trajectory;
    const Trajectory fine = simulate(spec, u, Grid(T, 2 * k), tol_geom).trajectory;
    rows.push_back({k, 2 * k, w12_distance(coarse, fine)});
  }
  return rows;
}

}  // namespace moreau
