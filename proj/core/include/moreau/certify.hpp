#pragma once

#include "moreau/sweep_sim.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace moreau {

/// Adjoint/multiplier reconstruction along a candidate together with a
/// named residual for each necessary optimality condition. Residuals are
/// absolute, in the candidate's own units.
struct Certificate {
  double mu = 1.0;
  std::vector<Vec> eta;        // one multiplier vector per grid interval
  Vec eta_terminal;            // endpoint multipliers per constraint row
  Vec p;                       // constant adjoint arc
  struct Atom {
    double time = 0.0;
    Vec mass;                  // per constraint row, nonnegative
  };
  std::vector<Atom> gamma_atoms;
  double H_bar = 0.0;          // T^{-1} integral of <p, dx/dt>

  /// Closure of the set where every active constraint carries a positive
  /// multiplier, reported as intervals.
  std::vector<std::pair<double, double>> active_intervals;
  bool support_condition_ok = true;   // no atom interior to the active set
  bool interiority_violated = false;  // control sits on the boundary of U
  bool enhanced_nontriviality = false;  // trajectory strictly interior
  bool nontrivial = true;

  std::map<std::string, double> residuals;

  /// Right-continuous adjoint q(t) = p - sum of atoms after t.
  Vec q_at(double t, const Mat& rows) const;
  double max_residual() const;
  bool pass(double threshold = 1e-6) const;
};

struct CertifyOptions {
  double mu = 1.0;
  double tol_active = 1e-6;   // scaled by the scene size internally
  int samples = 10000;        // Sobol control samples for the max condition
};

/// Reconstructs per-interval multipliers by nonnegative least squares of
/// g - dx/dt over the active constraint rows, plus the worst residual of
/// the sweeping representation.
struct MultiplierReconstruction {
  std::vector<Vec> eta;
  double residual = 0.0;
};
MultiplierReconstruction reconstruct_multipliers(const ScenarioSpec& spec, const Trajectory& traj,
                                                 const ControlSignal& u,
                                                 double tol_active = 1e-6);

/// max over intervals and rows of eta_j * positive part of the slack at
/// the state the multiplier acts on, plus q-orthogonality on active arcs.
double check_complementary_slackness(const Trajectory& traj, const std::vector<Vec>& eta,
                                     const MovingPolyhedron& constraint, double tol_active);

/// Recomputes the adjoint-arc and maximization residuals from a finished
/// certificate: variation of the constant arc p, and the worst gap of
/// <psi(t), u> against its analytic/sampled maximum over the control set.
struct AdjointMaxResiduals {
  double adjoint_constancy = 0.0;
  double max_condition = 0.0;
};
AdjointMaxResiduals check_adjoint_and_max(const ScenarioSpec& spec, const Trajectory& traj,
                                          const ControlSignal& u, const Certificate& cert,
                                          int samples = 10000);

/// Recomputes the endpoint residuals from a finished certificate: the
/// state condition -p(T) - sum eta_T^j row_j = mu * grad phi_x, the
/// optimal-time characteristic |H_bar - mu*T| with H_bar by quadrature
/// of <p, dx/dt>, and endpoint complementary slackness.
struct TransversalityResiduals {
  double state = 0.0;
  double time = 0.0;
  double endpoint_slackness = 0.0;
};
TransversalityResiduals check_transversality(const ScenarioSpec& spec, const Trajectory& traj,
                                             const Certificate& cert);

/// Full certificate for a candidate (trajectory, constant-in-time
/// control magnitudes, horizon = trajectory horizon). Requires the
/// scenario's chain constraint geometry.
Certificate certify(const ScenarioSpec& spec, const Trajectory& traj, const ControlSignal& u,
                    const CertifyOptions& opts = {});

bool check_nontriviality(const Certificate& cert);

/// Returns a copy of `traj` with the time axis multiplied by `factor`
/// (states unchanged, velocities divided accordingly).
Trajectory rescale_time(const Trajectory& traj, double factor);

}  // namespace moreau
