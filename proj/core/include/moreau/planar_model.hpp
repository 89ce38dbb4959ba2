#pragma once

#include "moreau/polytope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace moreau {

/// Stacked planar positions of n safety disks with their radii.
/// A configuration is admissible when no two disks overlap.
struct Configuration {
  std::vector<Eigen::Vector2d> positions;
  std::vector<double> radii;

  Configuration() = default;
  Configuration(std::vector<Eigen::Vector2d> pos, std::vector<double> r);

  Eigen::Index count() const { return static_cast<Eigen::Index>(positions.size()); }
  /// Positions flattened to (x^11, x^12, x^21, x^22, ...).
  Vec stacked() const;
  static Configuration from_stacked(const Vec& x, const std::vector<double>& radii);
};

/// Surface gap between disks i and j: center distance minus radius sum.
double disk_distance(const Configuration& c, Eigen::Index i, Eigen::Index j);

/// Gradient of disk_distance with respect to the stacked configuration.
/// Nonzero only in blocks i and j. Throws when the centers coincide.
Vec disk_distance_gradient(const Configuration& c, Eigen::Index i, Eigen::Index j);

/// True when all pairwise gaps are >= -tol.
bool admissible(const Configuration& c, double tol = kMembershipTol);

/// Velocities V keeping the linearized gaps nonnegative over one step
/// of length h:  D_ij(x) + h <grad D_ij(x), V> >= 0 for all i < j.
Polyhedron admissible_velocity_set(const Configuration& c, double h);

/// First-order feasible positions around x:
///   K(x) = { y : D_ij(x) + <grad D_ij(x), y - x> >= 0 }.
Polyhedron linearized_feasible_set(const Configuration& c);

/// The n-1 raw chain-constraint rows; row j has +1 in block j and -1 in
/// block j+1 (not unit length by design).
std::vector<Vec> vertex_vectors(Eigen::Index n);

/// Desired controlled velocities: block i is s_i * |u_i| * (cos t_i, sin t_i)
/// with fixed heading angles.
struct MagnitudeCoupling {
  Vec coeffs;         // applies to control magnitudes
  double rhs = 0.0;   // sum_i coeffs_i * |u_i| = rhs
};

struct ControlledVelocityModel {
  Vec speeds;       // s_i, one per object
  Vec angles;       // heading angles in radians, constant in time
  Vec lower;        // magnitude bounds per object
  Vec upper;
  std::vector<MagnitudeCoupling> couplings;

  Eigen::Index count() const { return speeds.size(); }
  /// Throws (naming the constraint) when magnitudes violate the bounds
  /// or a coupling.
  void validate_magnitudes(const Vec& u_mags, double tol = 1e-9) const;
};

Vec controlled_velocity(const ControlledVelocityModel& model, const Vec& u_mags);

/// Time-dependent constraint polyhedron <row_j, x> <= offset_j. The
/// scenarios in scope are constant in time; `at` exists so callers
/// never bake that in.
struct MovingPolyhedron {
  Mat rows;      // one raw constraint row per line, not normalized
  Vec offsets;

  Eigen::Index dim() const { return rows.cols(); }
  Eigen::Index count() const { return rows.rows(); }
  Polyhedron at(double t) const;
  /// offset_j - <row_j, x>, nonnegative inside.
  Vec slacks(const Vec& x) const;
};

enum class ConstraintKind {
  SumNormChain,    // constant polyhedron built from vertex_vectors
  EuclideanPairs,  // per-step linearization of the disk gaps
};

enum class CostKind { QuadraticStateTime };  // 0.5*|x(T)|^2 + 0.5*T^2

struct ScenarioSpec {
  ControlledVelocityModel model;
  Configuration initial;
  /// The quadratic cost in scope is anchored at the origin; the field
  /// records the intended target for reporting.
  Eigen::Vector2d target = Eigen::Vector2d::Zero();
  ConstraintKind constraint = ConstraintKind::EuclideanPairs;
  std::optional<Vec> offset_override;  // replaces sum-norm offsets
  CostKind cost = CostKind::QuadraticStateTime;

  Eigen::Index count() const { return initial.count(); }
};

/// Constant chain polyhedron <vertex_vectors_j, x> <= -(R_j + R_{j+1})
/// (or the override). Requires the orientation assumption: object j+1
/// ahead of object j on both axes at the initial configuration.
MovingPolyhedron build_sum_norm_constraint_set(const ScenarioSpec& spec);

/// Raw constraint rows/offsets of the scenario's declared geometry at
/// configuration x (state space). Sum-norm rows are constant; Euclidean
/// rows are the linearization -grad D_ij at x with offset D_ij - <.,x>.
MovingPolyhedron scenario_constraints(const ScenarioSpec& spec, const Configuration& c);

/// Throws when the chain orientation assumption fails at c.
void validate_orientation(const Configuration& c);

double cost_value(CostKind kind, const Vec& terminal_state, double T);

}  // namespace moreau
