#pragma once

#include "moreau/sweep_sim.hpp"

#include <array>
#include <utility>

namespace moreau::usv {

using moreau::Vec;

/// Frozen dataset of the two-vessel study: diagonal headings toward the
/// origin, unit speeds, chain offset -7.
struct UsvData {
  Eigen::Vector2d start1{-25.0, -25.0};
  Eigen::Vector2d start2{-15.0, -15.0};
  double radius = 3.5;
  double theta = 0.0;           // set to 45 degrees in radians by make()
  double speed1 = 1.0;
  double speed2 = 1.0;
  double u1_max = 100.0;
  double u2_max = 60.0;
  double chain_offset = -7.0;
  // Hull metadata only; the physical ship dynamics are out of scope.
  double hull_mass_kg = 23.8;
  double hull_length_m = 1.255;

  static UsvData make();
};

ScenarioSpec scenario(const UsvData& data = UsvData::make());

/// A closed-form candidate: constant control magnitudes, hitting time,
/// boundary multiplier, free horizon and cost.
struct UsvCandidate {
  double u1 = 0.0;
  double u2 = 0.0;
  double t_m = 0.0;
  double eta_m = 0.0;
  double T_bar = 0.0;
  double cost = 0.0;
  int root_index = 0;            // 0: near root, 1: far root
  bool sweeping_feasible = true; // far-root candidates cross the chain constraint
  bool boundary_control = false; // control on the boundary of U
  Vec terminal;                  // x(T_bar), stacked
};

/// Both positive roots of the chain contact equation. Requires
/// u1 > u2 > 0; equal magnitudes never meet the constraint.
std::pair<double, double> hitting_times(double u1, double u2, const UsvData& data = UsvData::make());

/// Boundary multiplier making the post-contact per-axis slopes of the
/// two vessels coincide.
double boundary_multiplier(double u1, double u2);

/// Free horizon at which the two terminal positions cancel per axis.
double optimal_horizon(double u1, double u2, const UsvData& data = UsvData::make());

/// Closed-form position at time t of the two-phase trajectory.
Vec position_at(const UsvCandidate& cand, double t, const UsvData& data = UsvData::make());

/// Per-axis gap of object 2 over object 1 at time t (sum-norm gap is
/// twice the absolute value).
double axis_gap_at(const UsvCandidate& cand, double t, const UsvData& data = UsvData::make());

/// Builds the candidate for the given root choice and evaluates
/// J = 0.5*|x(T)|^2 + 0.5*T^2. Throws "contact after horizon" when the
/// selected root lands beyond the free horizon.
UsvCandidate evaluate(double u1, double u2, int root_index, const UsvData& data = UsvData::make());
double cost(double u1, double u2, int root_index, const UsvData& data = UsvData::make());

/// Grid search plus simplex polish over the control box, both roots.
/// Far-root candidates that cross the constraint are kept only when no
/// feasible candidate exists.
UsvCandidate optimize(const UsvData& data = UsvData::make());

/// Samples the closed-form trajectory on a uniform grid.
Trajectory synthesize_trajectory(const UsvCandidate& cand, Eigen::Index k,
                                 const UsvData& data = UsvData::make());

}  // namespace moreau::usv
