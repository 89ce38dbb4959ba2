#pragma once

#include "moreau/planar_model.hpp"

#include <optional>
#include <vector>

namespace moreau {

/// Uniform grid t_i = i*T/k on [0, T].
struct Grid {
  double T = 0.0;
  Eigen::Index k = 0;

  Grid() = default;
  Grid(double horizon, Eigen::Index subintervals);
  double h() const { return T / static_cast<double>(k); }
  double node(Eigen::Index i) const { return T * static_cast<double>(i) / static_cast<double>(k); }
};

/// Piecewise-linear grid function: states at the nodes, one constant
/// velocity per subinterval, states[i+1] = states[i] + h*velocities[i].
class Trajectory {
public:
  Trajectory(Grid grid, std::vector<Vec> states);

  const Grid& grid() const { return grid_; }
  const std::vector<Vec>& states() const { return states_; }
  const std::vector<Vec>& velocities() const { return velocities_; }

  Vec state_at(double t) const;     // linear interpolation
  Vec velocity_at(double t) const;  // piecewise constant, right-continuous

private:
  Grid grid_;
  std::vector<Vec> states_;
  std::vector<Vec> velocities_;
};

/// Piecewise-constant control magnitudes: either one constant vector or
/// one sample per subinterval.
class ControlSignal {
public:
  static ControlSignal constant(Vec u_mags);
  static ControlSignal per_interval(std::vector<Vec> samples);

  Vec sample(Eigen::Index interval) const;
  bool is_constant() const { return samples_.size() == 1; }

private:
  std::vector<Vec> samples_;
};

struct StepOptions {
  double h = 0.0;
  /// Admissibility slack allowed on the true (nonlinear) gaps after a
  /// step; the linearization permits O(h^2) overshoot.
  double tol_geom = 1e-6;
};

struct StepResult {
  Configuration next;
  Vec velocity;
  std::vector<Eigen::Index> active;  // constraint rows active in the projection
  Vec eta;                           // multipliers over the raw constraint rows
  double representation_residual = 0.0;
};

/// One catching-up step: project the desired velocity onto the velocity
/// set of the scenario's declared constraint geometry, then advance.
StepResult step(const ScenarioSpec& spec, const Configuration& c, const Vec& u_mags,
                const StepOptions& opts);

struct SimulationResult {
  Trajectory trajectory;
  std::vector<std::vector<Eigen::Index>> active_sets;  // per interval
  std::vector<Vec> multipliers;                        // per interval, raw rows
  /// First time the declared constraint functional reaches its offset,
  /// refined by bisection on the interpolant.
  std::optional<double> first_contact;
};

SimulationResult simulate(const ScenarioSpec& spec, const ControlSignal& u, const Grid& grid,
                          double tol_geom = 1e-6);

/// V-space feasible set at configuration c for one step of length h
/// under the scenario's declared constraint geometry.
Polyhedron velocity_feasible_set(const ScenarioSpec& spec, const Configuration& c, double h);

/// Discrete W^{1,2} distance: initial-state distance plus the L2 norm of
/// the velocity difference integrated on the common refinement of the
/// two grids. Horizons must agree.
double w12_distance(const Trajectory& a, const Trajectory& b);

struct RefinementRow {
  Eigen::Index k_coarse = 0;
  Eigen::Index k_fine = 0;
  double distance = 0.0;
};

/// Successive distances between the k- and 2k-subinterval solutions for
/// each k in k_list (strictly increasing, typically dyadic).
std::vector<RefinementRow> refine_and_compare(const ScenarioSpec& spec, const ControlSignal& u,
                                              double T, const std::vector<Eigen::Index>& k_list,
                                              double tol_geom = 1e-6);

}  // namespace moreau
