#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace moreau::opt {

using Vec = Eigen::VectorXd;
using Objective = std::function<double(const Vec&)>;

/// Box with optional linear equality couplings between coordinates
/// (e.g. u1 - 2*u2 = 0). Couplings are eliminated by parameterization:
/// free coordinates sweep their box range, coupled ones follow.
struct BoxDomain {
  Vec lower;
  Vec upper;
  struct Coupling {
    Eigen::Index bound;   // coordinate expressed through the others
    Vec coeffs;           // x(bound) = <coeffs, x> + shift (coeffs(bound) == 0)
    double shift = 0.0;
  };
  std::vector<Coupling> couplings;

  Eigen::Index dim() const { return lower.size(); }
  std::vector<Eigen::Index> free_coordinates() const;
  /// Completes free coordinates to a full point and clamps to the box.
  Vec lift(const Vec& free_values) const;
  Vec clamp(const Vec& x) const;
  void validate() const;
};

struct SearchResult {
  Vec point;
  double value = 0.0;
  Eigen::Index evaluations = 0;
};

/// Exhaustive evaluation on a uniform grid over the coupling-reduced
/// box. Objectives may signal an invalid point by returning a non-finite
/// value. Ties break toward the lexicographically smallest point.
/// Evaluations run in parallel, capped by MOREAU_OPT_THREADS.
/// Resolutions are per free coordinate (>= 2 each); the scalar overload
/// applies one resolution to every axis.
SearchResult grid_search(const Objective& f, const BoxDomain& dom,
                         const std::vector<Eigen::Index>& resolutions);
SearchResult grid_search(const Objective& f, const BoxDomain& dom, Eigen::Index resolution);

struct NelderMeadOptions {
  double tol_x = 1e-8;
  double tol_f = 1e-10;
  int max_iter = 2000;
  double initial_step = 0.0;  // 0: 5% of the box range per coordinate
};

struct NelderMeadResult {
  Vec point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;      // false when max_iter was exhausted
  bool flat_spread = false;    // stopped on the f-spread criterion
};

/// Standard simplex iteration (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5) with proposals projected onto the domain.
NelderMeadResult nelder_mead(const Objective& f, const Vec& start, const BoxDomain& dom,
                             const NelderMeadOptions& opts = {});

/// Seeded multistart wrapper: `starts` uniform draws over the domain
/// guard against simplex stagnation on flat objectives. Deterministic
/// for a fixed seed.
NelderMeadResult nelder_mead_multistart(const Objective& f, const BoxDomain& dom, int starts,
                                        unsigned seed, const NelderMeadOptions& opts = {});

/// Thread cap for parallel objective sweeps (MOREAU_OPT_THREADS).
unsigned max_threads();

}  // namespace moreau::opt
