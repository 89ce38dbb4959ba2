#pragma once

#include "moreau/sweep_sim.hpp"

#include <array>
#include <utility>

namespace moreau::nano {

using moreau::Vec;

/// Frozen environment of the microtube study. Lengths in nanometers,
/// times in seconds unless stated otherwise.
struct NanoEnvironment {
  double tube_half_width = 500.0;   // a
  double tube_length = 7000.0;      // l
  double shear_rate = 1600e6;       // S, 1/s
  double hamaker = 5e-21;           // A (van der Waals coefficient)
  double gravity = 9.81e9;          // g
  double viscosity = 3.4e-3;        // fluid viscosity
  double density_diff = -1e3;       // particle minus fluid density
  double step_param = 0.0075;       // h
  double u_max = 3.0;               // |u1| <= 3, with |u1| = 2 |u2|

  static NanoEnvironment make() { return {}; }
};

/// Simulation frame: one simulated time unit equals this many seconds.
/// Raw velocities are O(1e14) nm/s; the scaled frame keeps step products
/// at O(10) so the projection tolerances stay meaningful.
inline constexpr double kSimTimeUnit = 1e-13;

Configuration initial_configuration();

/// Wall gaps, drag resistances, van der Waals forces and the resulting
/// spontaneous velocity of one particle.
struct ParticleForces {
  double dw1 = 0.0, dw2 = 0.0;        // near / far wall gaps
  double h6_w1 = 0.0, h6_w2 = 0.0;    // x-axis wall drag
  double h1_w1 = 0.0, h1_w2 = 0.0;    // x-axis shear resistance
  double h5 = 0.0;                    // z-axis wall drag (equal per wall)
  double f_wall = 0.0;                // net particle-wall attraction
  double f_pair = 0.0;                // particle-particle attraction
  double pair_distance = 0.0;         // surface distance to the other disk
  double vx = 0.0, vz = 0.0;          // force-balance velocity components
  double speed = 0.0;                 // Euclidean norm of (vx, vz)
};

struct NanoForces {
  std::array<ParticleForces, 2> particle;
  double s1() const { return particle[0].speed; }
  double s2() const { return particle[1].speed; }
};

/// Evaluates every force-model quantity at the given configuration.
/// Throws "wall contact" when a particle touches a wall.
NanoForces compute_forces(const NanoEnvironment& env, const Configuration& c);

/// Multiplier coefficient per unit |u2| that equalizes the post-contact
/// velocities under the coupling |u1| = 2 |u2| and 45-degree headings.
double eta_coefficient(double s1, double s2);
double eta_closed_form(double s1, double s2, double u2, double theta);

/// The two control-independent products t_*|u2| solving the sum-norm
/// contact equation (dynamics are linear in t*|u2|).
std::pair<double, double> contact_products(double s1, double s2,
                                           const NanoEnvironment& env = NanoEnvironment::make());

/// The product T_bar*|u2| at which the terminal positions cancel per
/// axis; the multiplier cancels, so it does not depend on the root.
double horizon_product(double s1, double s2,
                       const NanoEnvironment& env = NanoEnvironment::make());

struct NanoCandidate {
  int case_id = 1;          // 1: near-root contact, 2: far root
  double u2 = 0.0;          // |u2|; |u1| = 2 |u2|
  double u1 = 0.0;
  double t_star = 0.0;      // seconds
  double T_bar = 0.0;       // seconds
  double eta = 0.0;         // nm/s
  double cost = 0.0;        // J evaluated from the two-phase trajectory
  bool sweeping_feasible = true;  // case 2 crosses the chain constraint
  double min_chain_slack = 0.0;   // most negative constraint slack en route
  double pre_slope1 = 0.0;  // per-axis slopes, nm/s
  double pre_slope2 = 0.0;
  double post_slope = 0.0;
  Vec terminal;             // x(T_bar), stacked, nm
};

/// Builds the full two-phase candidate for the case and control.
/// Internal arithmetic runs in a nondimensionalized frame and is
/// rescaled exactly at the boundary.
NanoCandidate evaluate_case(int case_id, double u2,
                            const NanoEnvironment& env = NanoEnvironment::make());

struct NanoOptimum {
  NanoCandidate best;
  NanoCandidate other_case;
  /// J is flat in u2 up to the tiny 0.5*T^2 term; the whole sweep range
  /// within this spread of the minimum is reported, not a single point.
  double flat_range_lo = 0.0;
  double flat_range_hi = 0.0;
  double flat_spread = 0.0;
};

/// Simplex search per case over u2 in (0, u_max/2]; the winner is the
/// feasible case with the smaller cost.
NanoOptimum optimize(const NanoEnvironment& env = NanoEnvironment::make());

/// Closed-form position (nm) at time t (seconds).
Vec position_at(const NanoCandidate& cand, double t,
                const NanoEnvironment& env = NanoEnvironment::make());

/// Samples the closed-form trajectory on a uniform grid in the scaled
/// simulation frame (time unit kSimTimeUnit).
Trajectory synthesize_trajectory(const NanoCandidate& cand, Eigen::Index k,
                                 const NanoEnvironment& env = NanoEnvironment::make());

/// Scenario in the scaled simulation frame for the catching-up solver.
ScenarioSpec scenario(const NanoEnvironment& env = NanoEnvironment::make());

}  // namespace moreau::nano
